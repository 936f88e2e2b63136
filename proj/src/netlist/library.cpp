#include "equivfuse/netlist/netlist.h"

#include "equivfuse/support/error.h"

#include "json.hpp"

#include <algorithm>
#include <cctype>

namespace equivfuse::netlist {

namespace {

class FunctionParser {
 public:
  explicit FunctionParser(std::string_view text) : s_(text) {}

  CellFunction parse() {
    CellFunction f = orExpr();
    skip();
    if (pos_ != s_.size())
      bad("unexpected '" + std::string(1, s_[pos_]) + "'");
    return f;
  }

 private:
  [[noreturn]] void bad(const std::string &msg) {
    fail(ErrorKind::SchemaError, "cell function \"" + std::string(s_) + "\": " + msg);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  static CellFunction node(CellFunction::Kind k, std::vector<CellFunction> args) {
    CellFunction f;
    f.kind = k;
    f.args = std::move(args);
    return f;
  }
  CellFunction orExpr() {
    CellFunction f = xorExpr();
    while (eat('|') || eat('+'))
      f = node(CellFunction::Kind::Or, {f, xorExpr()});
    return f;
  }
  CellFunction xorExpr() {
    CellFunction f = andExpr();
    while (eat('^'))
      f = node(CellFunction::Kind::Xor, {f, andExpr()});
    return f;
  }
  CellFunction andExpr() {
    CellFunction f = unary();
    while (eat('&') || eat('*'))
      f = node(CellFunction::Kind::And, {f, unary()});
    return f;
  }
  CellFunction unary() {
    if (eat('~') || eat('!'))
      return node(CellFunction::Kind::Not, {unary()});
    CellFunction f = primary();
    while (eat('\''))
      f = node(CellFunction::Kind::Not, {f});
    return f;
  }
  CellFunction primary() {
    skip();
    if (eat('(')) {
      CellFunction f = orExpr();
      if (!eat(')'))
        bad("missing ')'");
      return f;
    }
    if (pos_ < s_.size() && (s_[pos_] == '0' || s_[pos_] == '1')) {
      CellFunction f;
      f.value = s_[pos_++] == '1';
      return f;
    }
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    if (start == pos_)
      bad("expected a pin name");
    CellFunction f;
    f.kind = CellFunction::Kind::Pin;
    f.pin = std::string(s_.substr(start, pos_ - start));
    return f;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

void checkPins(const CellFunction &f, const CellDef &c) {
  if (f.kind == CellFunction::Kind::Pin &&
      std::find(c.inputs.begin(), c.inputs.end(), f.pin) == c.inputs.end())
    fail(ErrorKind::SchemaError, "cell " + c.name + " function uses unknown pin " + f.pin);
  for (const auto &a : f.args)
    checkPins(a, c);
}

CellDef comb(std::string name, std::vector<std::string> inputs, const char *function) {
  CellDef c;
  c.name = std::move(name);
  c.inputs = std::move(inputs);
  c.output = "Y";
  c.function = CellFunction::parse(function);
  return c;
}

} // namespace

CellFunction CellFunction::parse(std::string_view text) { return FunctionParser(text).parse(); }

CellLibrary CellLibrary::builtin() {
  CellLibrary lib;
  lib.add(comb("BUF", {"A"}, "A"));
  lib.add(comb("NOT", {"A"}, "A'"));
  lib.add(comb("NAND", {"A", "B"}, "(A*B)'"));
  lib.add(comb("NOR", {"A", "B"}, "(A+B)'"));
  CellDef dff;
  dff.name = "DFF";
  dff.inputs = {"C", "D"};
  dff.output = "Q";
  dff.isRegister = true;
  dff.clock = "C";
  dff.data = "D";
  lib.add(dff);
  CellDef dffsr = dff;
  dffsr.name = "DFFSR";
  dffsr.inputs = {"C", "D", "S", "R"};
  dffsr.set = "S";
  dffsr.reset = "R";
  lib.add(dffsr);
  return lib;
}

void CellLibrary::add(CellDef cell) {
  if (cell.function)
    checkPins(*cell.function, cell);
  if (cell.isRegister) {
    for (const std::string *pin : {&cell.clock, &cell.data, &cell.set, &cell.reset})
      if (!pin->empty() && std::find(cell.inputs.begin(), cell.inputs.end(), *pin) == cell.inputs.end())
        fail(ErrorKind::SchemaError, "register cell " + cell.name + " names unknown pin " + *pin);
    if (cell.clock.empty() || cell.data.empty())
      fail(ErrorKind::SchemaError, "register cell " + cell.name + " needs clock and data pins");
  } else if (!cell.function) {
    fail(ErrorKind::SchemaError, "cell " + cell.name + " has neither a function nor a register");
  }
  std::string key = cell.name;
  cells_[key] = std::move(cell);
}

void CellLibrary::load(std::string_view text, std::string_view fileName) {
  const std::string where = fileName.empty() ? "cell library" : std::string(fileName);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    fail(ErrorKind::SchemaError, where + ": " + e.what());
  }
  try {
    for (const auto &c : doc.at("cells")) {
      CellDef cell;
      cell.name = c.at("name").get<std::string>();
      cell.inputs = c.at("inputs").get<std::vector<std::string>>();
      cell.output = c.at("output").get<std::string>();
      if (c.contains("function"))
        cell.function = CellFunction::parse(c.at("function").get<std::string>());
      if (c.contains("register")) {
        const auto &r = c.at("register");
        cell.isRegister = true;
        cell.clock = r.at("clock").get<std::string>();
        cell.data = r.at("data").get<std::string>();
        cell.set = r.value("set", "");
        cell.reset = r.value("reset", "");
      }
      add(std::move(cell));
    }
  } catch (const nlohmann::json::exception &e) {
    fail(ErrorKind::SchemaError, where + ": " + e.what());
  }
}

const CellDef *CellLibrary::find(std::string_view name) const {
  auto it = cells_.find(name);
  return it == cells_.end() ? nullptr : &it->second;
}

std::vector<std::string> CellLibrary::names() const {
  std::vector<std::string> r;
  for (const auto &[name, cell] : cells_)
    r.push_back(name);
  return r;
}

} // namespace equivfuse::netlist
