#include "equivfuse/netlist/netlist.h"

#include "equivfuse/support/error.h"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <set>

namespace equivfuse::netlist {

namespace {

enum class Tok { Ident, Number, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceLoc loc;
};

class Lexer {
 public:
  Lexer(std::string_view src, std::string file) : s_(src), file_(std::move(file)) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skipSpace();
      Token t;
      t.loc = {line_, col()};
      if (pos_ >= s_.size()) {
        out.push_back(t);
        return out;
      }
      char c = s_[pos_];
      if (c == '\\') {
        std::size_t start = ++pos_;
        while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])))
          ++pos_;
        t.kind = Tok::Ident;
        t.text = std::string(s_.substr(start, pos_ - start));
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
        std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) ||
                                    s_[pos_] == '_' || s_[pos_] == '$'))
          ++pos_;
        t.kind = Tok::Ident;
        t.text = std::string(s_.substr(start, pos_ - start));
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '\'') {
        t.kind = Tok::Number;
        t.text = number();
      } else {
        t.kind = Tok::Punct;
        t.text = std::string(1, c);
        ++pos_;
      }
      out.push_back(std::move(t));
    }
  }

 private:
  unsigned col() const { return static_cast<unsigned>(pos_ - lineStart_ + 1); }

  [[noreturn]] void bad(const std::string &msg) {
    fail(ErrorKind::SyntaxError, formatLoc(file_, {line_, col()}) + ": " + msg);
  }

  void advance() {
    if (s_[pos_] == '\n') {
      ++line_;
      lineStart_ = pos_ + 1;
    }
    ++pos_;
  }

  void skipSpace() {
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (s_.compare(pos_, 2, "//") == 0 || c == '`') {
        while (pos_ < s_.size() && s_[pos_] != '\n')
          ++pos_;
      } else if (s_.compare(pos_, 2, "/*") == 0 || (s_.compare(pos_, 2, "(*") == 0 && s_.compare(pos_, 3, "(*)") != 0)) {
        const char *close = c == '/' ? "*/" : "*)";
        pos_ += 2;
        while (pos_ < s_.size() && s_.compare(pos_, 2, close) != 0)
          advance();
        if (pos_ >= s_.size())
          bad(c == '/' ? "unterminated comment" : "unterminated attribute");
        pos_ += 2;
      } else {
        return;
      }
    }
  }

  std::string number() {
    std::string out;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      out += s_[pos_++];
    std::size_t save = pos_;
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t'))
      ++pos_;
    if (pos_ >= s_.size() || s_[pos_] != '\'') {
      pos_ = save;
      return out;
    }
    out += s_[pos_++];
    if (pos_ < s_.size() && (s_[pos_] == 's' || s_[pos_] == 'S'))
      out += s_[pos_++];
    if (pos_ >= s_.size() || !std::strchr("bBoOdDhH", s_[pos_]))
      bad("expected a base after '");
    out += s_[pos_++];
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t'))
      ++pos_;
    while (pos_ < s_.size() && (std::isxdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' ||
                                std::strchr("xXzZ?", s_[pos_])))
      out += s_[pos_++];
    return out;
  }

  std::string_view s_;
  std::string file_;
  std::size_t pos_ = 0;
  std::size_t lineStart_ = 0;
  unsigned line_ = 1;
};

const std::set<std::string, std::less<>> kUnsupported = {
    "always", "always_comb", "always_ff", "initial", "generate", "genvar", "parameter",
    "localparam", "function", "task", "integer", "reg", "logic", "inout", "specify",
    "defparam", "tri", "real", "case", "if", "for", "while", "interface", "package",
};

class Parser {
 public:
  Parser(std::vector<Token> toks, std::string file, const CellLibrary &lib,
         std::vector<std::string> *warnings)
      : t_(std::move(toks)), file_(std::move(file)), lib_(lib), warnings_(warnings) {}

  std::vector<NetlistModule> run() {
    std::vector<NetlistModule> out;
    while (peek().kind != Tok::End) {
      if (!isIdent("module"))
        unexpected("'module'");
      const Token &kw = next();
      std::string name = ident("module name");
      if (lib_.find(name)) {
        if (warnings_)
          warnings_->push_back(file_ + ": cell model " + name +
                               " ignored; built-in library semantics are used");
        while (!isIdent("endmodule")) {
          if (peek().kind == Tok::End)
            unexpected("'endmodule'");
          next();
        }
        next();
        continue;
      }
      out.push_back(module(name, kw.loc.line));
    }
    return out;
  }

 private:
  const Token &peek(std::size_t ahead = 0) const { return t_[std::min(i_ + ahead, t_.size() - 1)]; }
  const Token &next() {
    const Token &t = t_[i_];
    if (i_ + 1 < t_.size())
      ++i_;
    return t;
  }
  bool isIdent(std::string_view s) const { return peek().kind == Tok::Ident && peek().text == s; }
  bool isPunct(char c) const { return peek().kind == Tok::Punct && peek().text[0] == c; }
  bool eat(char c) {
    if (!isPunct(c))
      return false;
    next();
    return true;
  }

  [[noreturn]] void errorAt(const Token &t, ErrorKind k, const std::string &msg) {
    fail(k, formatLoc(file_, t.loc) + ": " + msg);
  }
  [[noreturn]] void unexpected(const std::string &what) {
    const Token &t = peek();
    std::string got = t.kind == Tok::End ? "end of file" : "'" + t.text + "'";
    errorAt(t, ErrorKind::SyntaxError, "expected " + what + ", got " + got);
  }
  [[noreturn]] void unsupported(const Token &t, const std::string &what) {
    errorAt(t, ErrorKind::UnsupportedConstruct, what);
  }
  void expect(char c) {
    if (!eat(c))
      unexpected("'" + std::string(1, c) + "'");
  }
  std::string ident(const std::string &what) {
    if (peek().kind != Tok::Ident)
      unexpected(what);
    if (kUnsupported.count(peek().text))
      unsupported(peek(), peek().text);
    return next().text;
  }
  int integer() {
    if (peek().kind != Tok::Number || peek().text.find('\'') != std::string::npos) {
      if (peek().kind == Tok::Ident)
        unsupported(peek(), "parameter expression");
      unexpected("an integer");
    }
    return std::stoi(next().text);
  }

  /// `[msb:lsb]`, or a single bit `[i]` when `allowBit`.
  void range(int &msb, int &lsb, bool *isBit = nullptr) {
    expect('[');
    msb = lsb = integer();
    if (eat(':')) {
      lsb = integer();
      if (isBit)
        *isBit = false;
    } else if (isBit) {
      *isBit = true;
    } else {
      unexpected("':'");
    }
    if (!isPunct(']')) {
      if (isPunct('+') || isPunct('-') || isPunct('*'))
        unsupported(peek(), "parameter expression");
      unexpected("']'");
    }
    next();
  }

  NetlistModule module(const std::string &name, unsigned line) {
    NetlistModule m;
    m.name = name;
    m.file = file_;
    m.line = line;
    if (isPunct('#'))
      unsupported(peek(), "parameter");
    std::vector<std::string> header;
    bool ansi = false;
    if (eat('(')) {
      if (!isPunct(')')) {
        if (isIdent("input") || isIdent("output") || isIdent("inout")) {
          ansiPorts(m);
          ansi = true;
        }
        else
          do
            header.push_back(ident("port name"));
          while (eat(','));
      }
      expect(')');
    }
    expect(';');
    for (const auto &h : header)
      m.ports.push_back({{h, 0, 0}, PinDir::In});
    std::set<std::string> declared;
    if (ansi)
      for (const auto &p : m.ports)
        declared.insert(p.net.name);
    for (;;) {
      const Token &t = peek();
      if (t.kind == Tok::End)
        unexpected("'endmodule'");
      if (isIdent("endmodule")) {
        next();
        break;
      }
      if (t.kind != Tok::Ident)
        unexpected("a module item");
      if (t.text == "input" || t.text == "output") {
        next();
        PinDir dir = t.text == "input" ? PinDir::In : PinDir::Out;
        eatNetType();
        NetDecl shape = declShape();
        do {
          const Token &nt = peek();
          std::string n = ident("port name");
          auto it = std::find_if(m.ports.begin(), m.ports.end(),
                                 [&](const PortDecl &p) { return p.net.name == n; });
          if (it == m.ports.end())
            errorAt(nt, ErrorKind::SyntaxError, n + " is not in the port list of " + m.name);
          if (!declared.insert(n).second)
            errorAt(nt, ErrorKind::DuplicateDefinition, "port " + n + " declared twice");
          it->dir = dir;
          it->net = {n, shape.msb, shape.lsb};
        } while (eat(','));
        expect(';');
      } else if (t.text == "wire") {
        next();
        NetDecl shape = declShape();
        do {
          const Token &nt = peek();
          std::string n = ident("wire name");
          auto port = std::find_if(m.ports.begin(), m.ports.end(),
                                   [&](const PortDecl &p) { return p.net.name == n; });
          if (port != m.ports.end()) {
            if (port->net.msb != shape.msb || port->net.lsb != shape.lsb)
              errorAt(nt, ErrorKind::WidthMismatch, "wire " + n + " redeclares port with a different range");
          } else if (std::any_of(m.wires.begin(), m.wires.end(), [&](const NetDecl &w) { return w.name == n; })) {
            errorAt(nt, ErrorKind::DuplicateDefinition, "wire " + n + " declared twice");
          } else {
            m.wires.push_back({n, shape.msb, shape.lsb});
          }
          if (eat('=')) {
            NetExpr lhs;
            lhs.name = n;
            lhs.line = nt.loc.line;
            m.assigns.push_back({lhs, expr(), nt.loc.line});
          }
        } while (eat(','));
        expect(';');
      } else if (t.text == "assign") {
        next();
        do {
          unsigned l = peek().loc.line;
          NetExpr lhs = expr();
          expect('=');
          m.assigns.push_back({lhs, expr(), l});
        } while (eat(','));
        expect(';');
      } else if (kUnsupported.count(t.text) || t.text == "supply0" || t.text == "supply1") {
        unsupported(t, t.text);
      } else {
        m.instances.push_back(instance());
      }
    }
    for (const auto &p : m.ports)
      if (!declared.count(p.net.name))
        fail(ErrorKind::SyntaxError, file_ + ": port " + p.net.name + " of " + m.name + " has no direction");
    return m;
  }

  void eatNetType() {
    if (isIdent("wire"))
      next();
    if (isIdent("reg") || isIdent("logic"))
      unsupported(peek(), peek().text);
  }

  NetDecl declShape() {
    NetDecl d;
    if (isIdent("signed"))
      next();
    if (isPunct('['))
      range(d.msb, d.lsb);
    if (isPunct('['))
      unsupported(peek(), "multi-dimensional net");
    return d;
  }

  void ansiPorts(NetlistModule &m) {
    PinDir dir = PinDir::In;
    NetDecl shape;
    do {
      if (isIdent("input") || isIdent("output")) {
        dir = next().text == "input" ? PinDir::In : PinDir::Out;
        eatNetType();
        shape = declShape();
      }
      std::string n = ident("port name");
      m.ports.push_back({{n, shape.msb, shape.lsb}, dir});
    } while (eat(','));
  }

  Instance instance() {
    Instance inst;
    inst.line = peek().loc.line;
    inst.cell = ident("cell name");
    if (isPunct('#'))
      unsupported(peek(), "parameter");
    inst.name = ident("instance name");
    expect('(');
    if (!isPunct(')')) {
      do {
        if (!isPunct('.'))
          unsupported(peek(), "positional port connection");
        next();
        std::string pin = ident("pin name");
        expect('(');
        std::optional<NetExpr> e;
        if (!isPunct(')'))
          e = expr();
        expect(')');
        inst.connections.emplace_back(pin, std::move(e));
      } while (eat(','));
    }
    expect(')');
    expect(';');
    return inst;
  }

  NetExpr constant(const Token &t) {
    NetExpr e;
    e.kind = NetExpr::Kind::Const;
    e.line = t.loc.line;
    std::string s;
    for (char c : t.text)
      if (c != '_')
        s += c;
    auto q = s.find('\'');
    if (q == std::string::npos) {
      e.sized = false;
      e.value = BitVec::fromDecimal(s, 32);
      return e;
    }
    unsigned width = q == 0 ? 32 : static_cast<unsigned>(std::stoul(s.substr(0, q)));
    if (width == 0)
      errorAt(t, ErrorKind::SyntaxError, "zero-width constant");
    std::size_t b = q + 1;
    if (s[b] == 's' || s[b] == 'S')
      ++b;
    char base = static_cast<char>(std::tolower(static_cast<unsigned char>(s[b])));
    std::string digits = s.substr(b + 1);
    if (digits.empty())
      errorAt(t, ErrorKind::SyntaxError, "constant without digits");
    for (char c : digits)
      if (std::strchr("xXzZ?", c))
        unsupported(t, "x/z constant");
    try {
      if (base == 'd') {
        e.value = BitVec::fromDecimal(digits, width);
      } else if (base == 'h') {
        e.value = BitVec::fromHex(digits, width);
      } else {
        std::string bits;
        for (char c : digits) {
          if (base == 'b') {
            bits += c;
          } else {
            if (c < '0' || c > '7')
              errorAt(t, ErrorKind::SyntaxError, "invalid octal digit");
            int v = c - '0';
            bits += {static_cast<char>('0' + ((v >> 2) & 1)), static_cast<char>('0' + ((v >> 1) & 1)),
                     static_cast<char>('0' + (v & 1))};
          }
        }
        e.value = BitVec::fromBinary(bits).resize(width, false);
      }
    } catch (const Error &err) {
      errorAt(t, ErrorKind::SyntaxError, err.detail());
    }
    return e;
  }

  NetExpr expr() {
    const Token &t = peek();
    if (t.kind == Tok::Number) {
      next();
      return constant(t);
    }
    if (eat('{')) {
      NetExpr e;
      e.line = t.loc.line;
      if (peek().kind == Tok::Number && peek(1).kind == Tok::Punct && peek(1).text == "{") {
        e.kind = NetExpr::Kind::Repeat;
        e.msb = integer();
        expect('{');
        NetExpr inner;
        inner.kind = NetExpr::Kind::Concat;
        inner.line = t.loc.line;
        do
          inner.parts.push_back(expr());
        while (eat(','));
        expect('}');
        e.parts.push_back(std::move(inner));
      } else {
        e.kind = NetExpr::Kind::Concat;
        do
          e.parts.push_back(expr());
        while (eat(','));
      }
      expect('}');
      return e;
    }
    if (t.kind == Tok::Ident) {
      NetExpr e;
      e.line = t.loc.line;
      e.name = ident("net name");
      if (isPunct('[')) {
        bool bit = false;
        range(e.msb, e.lsb, &bit);
        e.kind = bit ? NetExpr::Kind::Bit : NetExpr::Kind::Part;
        if (isPunct('['))
          unsupported(peek(), "multi-dimensional select");
      }
      return e;
    }
    if (t.kind == Tok::Punct && std::strchr("~!&|^+-*?", t.text[0]))
      unsupported(t, "operator '" + t.text + "' in assign");
    unexpected("a net expression");
  }

  std::vector<Token> t_;
  std::size_t i_ = 0;
  std::string file_;
  const CellLibrary &lib_;
  std::vector<std::string> *warnings_;
};

} // namespace

std::vector<NetlistModule> parseStructuralVerilog(const std::vector<VerilogSource> &sources,
                                                  const CellLibrary &lib,
                                                  std::vector<std::string> *warnings) {
  std::vector<NetlistModule> out;
  for (const auto &src : sources) {
    auto mods = Parser(Lexer(src.text, src.name).run(), src.name, lib, warnings).run();
    for (auto &m : mods) {
      for (const auto &prev : out)
        if (prev.name == m.name)
          fail(ErrorKind::DuplicateDefinition, src.name + ": module " + m.name + " already defined in " + prev.file);
      out.push_back(std::move(m));
    }
  }
  return out;
}

} // namespace equivfuse::netlist
