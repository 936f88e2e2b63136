#pragma once

#include "equivfuse/support/error.h"

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace equivfuse::backends {

/// S-expressions for SMT-LIB text.
struct SExpr {
  std::string atom;
  std::vector<SExpr> list;
  bool isList = false;
};

class SExprReader {
 public:
  explicit SExprReader(std::string_view s) : s_(s) {}

  std::vector<SExpr> all() {
    std::vector<SExpr> out;
    for (skip(); pos_ < s_.size(); skip())
      out.push_back(read());
    return out;
  }

 private:
  void skip() {
    while (pos_ < s_.size()) {
      if (std::isspace(static_cast<unsigned char>(s_[pos_]))) {
        ++pos_;
      } else if (s_[pos_] == ';') {
        while (pos_ < s_.size() && s_[pos_] != '\n')
          ++pos_;
      } else {
        break;
      }
    }
  }
  SExpr read() {
    SExpr e;
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      e.isList = true;
      for (skip(); pos_ < s_.size() && s_[pos_] != ')'; skip())
        e.list.push_back(read());
      if (pos_ >= s_.size())
        fail(ErrorKind::ParseFailure, "unbalanced parentheses");
      ++pos_;
      return e;
    }
    if (c == ')')
      fail(ErrorKind::ParseFailure, "unexpected ')'");
    if (c == '|') {
      std::size_t end = s_.find('|', pos_ + 1);
      if (end == std::string_view::npos)
        fail(ErrorKind::ParseFailure, "unterminated quoted symbol");
      e.atom = std::string(s_.substr(pos_ + 1, end - pos_ - 1));
      pos_ = end + 1;
      return e;
    }
    if (c == '"') {
      std::size_t end = pos_ + 1;
      while (end < s_.size() && !(s_[end] == '"' && (end + 1 >= s_.size() || s_[end + 1] != '"')))
        end += s_[end] == '"' ? 2 : 1;
      e.atom = std::string(s_.substr(pos_, end + 1 - pos_));
      pos_ = std::min(end + 1, s_.size());
      return e;
    }
    std::size_t start = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) && s_[pos_] != '(' &&
           s_[pos_] != ')')
      ++pos_;
    e.atom = std::string(s_.substr(start, pos_ - start));
    return e;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

} // namespace equivfuse::backends
