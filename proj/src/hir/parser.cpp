#include "equivfuse/hir/parser.h"

#include "equivfuse/support/error.h"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>

namespace equivfuse::hir {

namespace {

enum class Tok { Ident, Number, String, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  uint64_t number = 0;
  SourceLoc loc;
};

class Lexer {
 public:
  Lexer(std::string_view src, std::string_view file) : src_(src), file_(file) {}

  std::vector<Token> run() {
    std::vector<Token> raw;
    while (true) {
      skipSpaceAndComments();
      if (pos_ >= src_.size())
        break;
      if (src_[pos_] == '#' && atLineStart_) {
        directive();
        continue;
      }
      atLineStart_ = false;
      raw.push_back(next());
    }
    std::vector<Token> out;
    std::set<std::string> expanding;
    for (auto &t : raw)
      expand(t, out, expanding);
    Token end;
    end.kind = Tok::End;
    end.loc = {line_, col_};
    out.push_back(end);
    return out;
  }

 private:
  [[noreturn]] void error(const std::string &msg) {
    fail(ErrorKind::SyntaxError, formatLoc(file_, {line_, col_}) + ": " + msg);
  }

  char peek(std::size_t off = 0) const {
    return pos_ + off < src_.size() ? src_[pos_ + off] : '\0';
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
      atLineStart_ = true;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skipSpaceAndComments() {
    while (pos_ < src_.size()) {
      char c = peek();
      if (c == '\n' || c == ' ' || c == '\t' || c == '\r') {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (pos_ < src_.size() && peek() != '\n')
          advance();
      } else if (c == '/' && peek(1) == '*') {
        advance();
        advance();
        while (pos_ < src_.size() && !(peek() == '*' && peek(1) == '/'))
          advance();
        if (pos_ >= src_.size())
          error("unterminated block comment");
        advance();
        advance();
      } else if (c == '\\' && peek(1) == '\n') {
        advance();
        advance();
      } else {
        break;
      }
    }
  }

  void directive() {
    SourceLoc start{line_, col_};
    std::string lineText;
    while (pos_ < src_.size() && peek() != '\n') {
      if (peek() == '\\' && peek(1) == '\n') {
        advance();
        advance();
        lineText.push_back(' ');
        continue;
      }
      lineText.push_back(peek());
      advance();
    }
    std::size_t i = 1;
    while (i < lineText.size() && std::isspace(static_cast<unsigned char>(lineText[i])))
      ++i;
    std::size_t j = i;
    while (j < lineText.size() && std::isalpha(static_cast<unsigned char>(lineText[j])))
      ++j;
    std::string name = lineText.substr(i, j - i);
    if (name == "include" || name == "pragma")
      return;
    if (name != "define")
      fail(ErrorKind::UnsupportedConstruct,
           formatLoc(file_, start) + ": #" + name + " (only #define of integer macros is supported)");
    // Lex the remainder of the line as a macro definition.
    std::string rest = lineText.substr(j);
    Lexer sub(rest, file_);
    sub.line_ = start.line;
    std::vector<Token> toks;
    while (true) {
      sub.skipSpaceAndComments();
      if (sub.pos_ >= sub.src_.size())
        break;
      toks.push_back(sub.next());
    }
    if (toks.empty() || toks[0].kind != Tok::Ident)
      fail(ErrorKind::SyntaxError, formatLoc(file_, start) + ": malformed #define");
    if (rest.find(toks[0].text + "(") != std::string::npos)
      fail(ErrorKind::UnsupportedConstruct,
           formatLoc(file_, start) + ": function-like macro " + toks[0].text);
    std::string macro = toks[0].text;
    toks.erase(toks.begin());
    for (const auto &t : toks)
      if (t.kind == Tok::String)
        fail(ErrorKind::UnsupportedConstruct,
             formatLoc(file_, start) + ": non-integer macro " + macro);
    macros_[macro] = std::move(toks);
  }

  void expand(const Token &t, std::vector<Token> &out, std::set<std::string> &expanding) {
    if (t.kind == Tok::Ident) {
      auto it = macros_.find(t.text);
      if (it != macros_.end() && !expanding.count(t.text)) {
        expanding.insert(t.text);
        for (auto sub : it->second) {
          sub.loc = t.loc;
          expand(sub, out, expanding);
        }
        expanding.erase(t.text);
        return;
      }
    }
    out.push_back(t);
  }

  Token next() {
    Token t;
    t.loc = {line_, col_};
    char c = peek();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      t.kind = Tok::Ident;
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') {
        t.text.push_back(peek());
        advance();
      }
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      t.kind = Tok::Number;
      std::string digits;
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '.' ||
             ((peek() == '+' || peek() == '-') && !digits.empty() &&
              (digits.back() == 'e' || digits.back() == 'E') && digits.rfind("0x", 0) != 0)) {
        digits.push_back(peek());
        advance();
      }
      t.text = digits;
      t.number = parseNumber(digits);
      return t;
    }
    if (c == '"') {
      t.kind = Tok::String;
      advance();
      while (pos_ < src_.size() && peek() != '"') {
        t.text.push_back(peek());
        advance();
      }
      if (pos_ >= src_.size())
        error("unterminated string literal");
      advance();
      return t;
    }
    if (c == '\'')
      fail(ErrorKind::UnsupportedConstruct, formatLoc(file_, t.loc) + ": character literal");
    static const char *kPuncts[] = {"<<=", ">>=", "...", "<<", ">>", "<=", ">=", "==", "!=",
                                    "&&", "||", "++", "--", "+=", "-=", "*=", "/=", "%=",
                                    "&=", "|=", "^=", "::", "->"};
    for (const char *p : kPuncts) {
      std::string_view pv(p);
      if (src_.substr(pos_, pv.size()) == pv) {
        t.kind = Tok::Punct;
        t.text = std::string(pv);
        for (std::size_t k = 0; k < pv.size(); ++k)
          advance();
        return t;
      }
    }
    if (std::string_view("{}()[];,=<>+-*/%&|^~!?:.").find(c) != std::string_view::npos) {
      t.kind = Tok::Punct;
      t.text = std::string(1, c);
      advance();
      return t;
    }
    error(std::string("unexpected character '") + c + "'");
  }

  uint64_t parseNumber(const std::string &digits) {
    std::string d = digits;
    bool isHex = d.size() > 2 && d[0] == '0' && (d[1] == 'x' || d[1] == 'X');
    bool isBin = d.size() > 2 && d[0] == '0' && (d[1] == 'b' || d[1] == 'B');
    if (!isHex && (d.find('.') != std::string::npos || d.find('e') != std::string::npos ||
                   d.find('E') != std::string::npos || d.back() == 'f' || d.back() == 'F'))
      fail(ErrorKind::UnsupportedConstruct, formatLoc(file_, {line_, col_}) + ": float literal " + d);
    while (!d.empty() && (d.back() == 'u' || d.back() == 'U' || d.back() == 'l' || d.back() == 'L'))
      d.pop_back();
    uint64_t value = 0;
    std::size_t start = (isHex || isBin) ? 2 : 0;
    unsigned base = isHex ? 16 : isBin ? 2 : (d.size() > 1 && d[0] == '0' ? 8 : 10);
    if (start >= d.size() && (isHex || isBin))
      error("malformed integer literal " + digits);
    for (std::size_t i = start; i < d.size(); ++i) {
      char ch = d[i];
      unsigned v;
      if (std::isdigit(static_cast<unsigned char>(ch)))
        v = ch - '0';
      else if (std::isxdigit(static_cast<unsigned char>(ch)))
        v = std::tolower(ch) - 'a' + 10;
      else
        error("malformed integer literal " + digits);
      if (v >= base)
        error("malformed integer literal " + digits);
      value = value * base + v;
    }
    return value;
  }

  std::string_view src_;
  std::string file_;
  std::size_t pos_ = 0;
  unsigned line_ = 1;
  unsigned col_ = 1;
  bool atLineStart_ = true;
  std::map<std::string, std::vector<Token>> macros_;
};

/// Scoped name resolution; shadowing an enclosing name is an error, while a
/// name reused in a disjoint scope gets a fresh slot.
class Scopes {
 public:
  void push() { stack_.emplace_back(); }
  void pop() { stack_.pop_back(); }
  std::optional<unsigned> lookup(const std::string &name) const {
    for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end())
        return f->second;
    }
    return std::nullopt;
  }
  void bind(const std::string &name, unsigned slot) { stack_.back()[name] = slot; }

 private:
  std::vector<std::unordered_map<std::string, unsigned>> stack_;
};

struct ParsedType {
  HirType scalar;
  bool isVoid = false;
  bool isConst = false;
};

class Parser {
 public:
  Parser(std::vector<Token> toks, std::string_view file) : toks_(std::move(toks)), file_(file) {}

  HirProgram run() {
    HirProgram prog;
    std::set<std::string> names;
    while (!at(Tok::End)) {
      if (acceptPunct(";"))
        continue;
      if (isIdent("extern")) {
        next();
        if (at(Tok::String))
          next();
        if (acceptPunct("{"))
          fail(ErrorKind::UnsupportedConstruct, where() + ": extern \"C\" block");
      }
      if (isIdent("typedef") || isIdent("struct") || isIdent("class") || isIdent("template") ||
          isIdent("namespace") || isIdent("using") || isIdent("union") || isIdent("enum"))
        fail(ErrorKind::UnsupportedConstruct, where() + ": " + cur().text);
      auto fn = topLevel();
      if (!fn)
        continue;
      if (!names.insert(fn->name).second)
        fail(ErrorKind::DuplicateDefinition, where() + ": function " + fn->name);
      prog.functions.push_back(std::move(*fn));
    }
    return prog;
  }

 private:
  // ---- token helpers -------------------------------------------------------
  const Token &cur() const { return toks_[pos_]; }
  const Token &peekTok(std::size_t off) const {
    return toks_[std::min(pos_ + off, toks_.size() - 1)];
  }
  bool at(Tok k) const { return cur().kind == k; }
  bool isPunct(std::string_view p) const { return cur().kind == Tok::Punct && cur().text == p; }
  bool isIdent(std::string_view p) const { return cur().kind == Tok::Ident && cur().text == p; }
  Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool acceptPunct(std::string_view p) {
    if (!isPunct(p))
      return false;
    next();
    return true;
  }
  std::string where() const { return formatLoc(file_, cur().loc); }
  [[noreturn]] void syntax(const std::string &msg) {
    fail(ErrorKind::SyntaxError, where() + ": " + msg +
                                     (at(Tok::End) ? " at end of input" : " near '" + cur().text + "'"));
  }
  void expectPunct(std::string_view p) {
    if (!acceptPunct(p))
      syntax("expected '" + std::string(p) + "'");
  }
  std::string expectIdent() {
    if (!at(Tok::Ident))
      syntax("expected identifier");
    return next().text;
  }
  unsigned line() const { return cur().loc.line; }

  // ---- types ---------------------------------------------------------------
  bool startsType() const {
    if (!at(Tok::Ident))
      return false;
    static const std::set<std::string> kWords = {
        "void", "char", "short", "int", "long", "signed", "unsigned", "bool", "_Bool",
        "const", "volatile", "static", "inline", "_BitInt", "float", "double", "auto",
        "int8_t", "int16_t", "int32_t", "int64_t", "uint8_t", "uint16_t", "uint32_t",
        "uint64_t", "size_t", "register", "constexpr"};
    return kWords.count(cur().text) > 0;
  }

  ParsedType parseType() {
    ParsedType pt;
    bool sawSigned = false, sawUnsigned = false;
    int longs = 0;
    std::optional<unsigned> base;
    bool any = false;
    while (at(Tok::Ident)) {
      const std::string w = cur().text;
      if (w == "const" || w == "constexpr") {
        pt.isConst = true;
      } else if (w == "volatile" || w == "static" || w == "inline" || w == "register") {
      } else if (w == "signed") {
        sawSigned = true;
      } else if (w == "unsigned") {
        sawUnsigned = true;
      } else if (w == "char") {
        base = 8;
      } else if (w == "short") {
        base = 16;
      } else if (w == "int") {
        if (!base)
          base = 32;
      } else if (w == "long") {
        ++longs;
        base = 64;
      } else if (w == "bool" || w == "_Bool") {
        base = 1;
        sawUnsigned = true;
      } else if (w == "void") {
        pt.isVoid = true;
      } else if (w == "float" || w == "double") {
        fail(ErrorKind::UnsupportedConstruct, where() + ": float");
      } else if (w == "auto") {
        fail(ErrorKind::UnsupportedConstruct, where() + ": auto");
      } else if (w == "_BitInt") {
        next();
        expectPunct("(");
        Expr e = expression();
        auto v = literalValue(e);
        if (!v || *v < 1 || *v > 64)
          fail(ErrorKind::UnsupportedConstruct, where() + ": _BitInt width must be 1..64");
        expectPunct(")");
        base = static_cast<unsigned>(*v);
        any = true;
        continue;
      } else if (w.size() > 2 && w.rfind("_t") == w.size() - 2 &&
                 (w.rfind("int", 0) == 0 || w.rfind("uint", 0) == 0 || w == "size_t")) {
        if (w == "size_t") {
          base = 64;
          sawUnsigned = true;
        } else {
          bool u = w[0] == 'u';
          base = static_cast<unsigned>(std::stoul(w.substr(u ? 4 : 3)));
          if (u)
            sawUnsigned = true;
          else
            sawSigned = true;
        }
      } else {
        break;
      }
      any = true;
      next();
    }
    if (!any)
      syntax("expected type");
    if (pt.isVoid)
      return pt;
    if (!base)
      base = 32;  // bare `signed` / `unsigned`
    (void)longs;
    pt.scalar = HirType::scalar(sawUnsigned ? Signedness::Unsigned : Signedness::Signed, *base);
    (void)sawSigned;
    return pt;
  }

  // ---- constant expressions -------------------------------------------------
  static std::optional<int64_t> literalValue(const Expr &e) {
    if (e.kind == ExprKind::Const && e.untypedLiteral)
      return e.value;
    return std::nullopt;
  }

  std::optional<int64_t> constEval(const Expr &e) {
    switch (e.kind) {
    case ExprKind::Const:
      if (e.untypedLiteral)
        return e.value;
      return std::nullopt;
    case ExprKind::Unary: {
      auto a = constEval(e.args[0]);
      if (!a)
        return std::nullopt;
      return e.unop == UnOp::Neg ? -*a : ~*a;
    }
    case ExprKind::Binary: {
      auto a = constEval(e.args[0]);
      auto b = constEval(e.args[1]);
      if (!a || !b)
        return std::nullopt;
      switch (e.binop) {
      case BinOp::Add: return *a + *b;
      case BinOp::Sub: return *a - *b;
      case BinOp::Mul: return *a * *b;
      case BinOp::And: return *a & *b;
      case BinOp::Or: return *a | *b;
      case BinOp::Xor: return *a ^ *b;
      case BinOp::Shl: return *b >= 0 && *b < 64 ? (*a << *b) : 0;
      case BinOp::Lshr:
      case BinOp::Ashr: return *b >= 0 && *b < 64 ? (*a >> *b) : 0;
      case BinOp::Eq: return *a == *b;
      case BinOp::Ne: return *a != *b;
      case BinOp::Lt: return *a < *b;
      case BinOp::Le: return *a <= *b;
      case BinOp::Gt: return *a > *b;
      case BinOp::Ge: return *a >= *b;
      }
      return std::nullopt;
    }
    case ExprKind::Cast:
      return constEval(e.args[0]);
    default:
      return std::nullopt;
    }
  }

  /// Folds literal-only subtrees so bounds like `N - 1` become literals.
  Expr foldLiterals(Expr e) {
    if (e.kind == ExprKind::Binary || e.kind == ExprKind::Unary) {
      for (auto &a : e.args)
        a = foldLiterals(std::move(a));
      if (std::all_of(e.args.begin(), e.args.end(),
                      [](const Expr &a) { return a.kind == ExprKind::Const && a.untypedLiteral; })) {
        auto v = constEval(e);
        if (v)
          return Expr::literal(*v, e.line);
      }
    }
    return e;
  }

  // ---- top level -------------------------------------------------------------
  std::optional<HirFunction> topLevel() {
    ParsedType rt = parseType();
    std::string name = expectIdent();
    if (acceptPunct("=")) {
      // Global integer constant: behaves like a macro.
      Expr e = foldLiterals(expression());
      auto v = constEval(e);
      if (!v || !rt.isConst)
        fail(ErrorKind::UnsupportedConstruct, where() + ": global variable " + name);
      globals_[name] = *v;
      expectPunct(";");
      return std::nullopt;
    }
    if (isPunct("[") || isPunct(";"))
      fail(ErrorKind::UnsupportedConstruct, where() + ": global variable " + name);
    if (isPunct("::"))
      fail(ErrorKind::UnsupportedConstruct, where() + ": qualified name");
    HirFunction fn;
    fn.name = name;
    fn.line = line();
    vars_ = &fn.vars;
    dims_.clear();
    scopes_ = Scopes();
    scopes_.push();
    expectPunct("(");
    if (!acceptPunct(")")) {
      if (isIdent("void") && peekTok(1).kind == Tok::Punct && peekTok(1).text == ")") {
        next();
        next();
      } else {
        do {
          parameter();
        } while (acceptPunct(","));
        expectPunct(")");
      }
    }
    if (acceptPunct(";"))
      return std::nullopt;  // prototype only
    if (!rt.isVoid) {
      Variable out;
      out.name = "out_0";
      out.type = rt.scalar;
      out.isParam = true;
      out.dir = ParamDir::Out;
      out.dirExplicit = true;
      if (scopes_.lookup(out.name))
        fail(ErrorKind::DuplicateDefinition, where() + ": out_0 conflicts with a parameter");
      returnSlot_ = declare(out);
    } else {
      returnSlot_.reset();
    }
    expectPunct("{");
    sawReturn_ = false;
    std::vector<Stmt> body;
    while (!acceptPunct("}")) {
      if (at(Tok::End))
        syntax("unterminated function body");
      if (sawReturn_)
        fail(ErrorKind::UnsupportedConstruct, where() + ": return before end of function");
      statement(body, /*topLevel=*/true);
    }
    if (returnSlot_ && !sawReturn_)
      fail(ErrorKind::UnassignedOutput, "function " + fn.name + " never returns a value");
    fn.body = std::move(body);
    vars_ = nullptr;
    return fn;
  }

  unsigned declare(Variable v) {
    if (scopes_.lookup(v.name) || globals_.count(v.name))
      fail(ErrorKind::DuplicateDefinition, where() + ": " + v.name);
    std::string base = v.name;
    std::string unique = base;
    for (unsigned n = 1; std::any_of(vars_->begin(), vars_->end(),
                                     [&](const Variable &x) { return x.name == unique; });
         ++n)
      unique = base + "." + std::to_string(n);
    std::string visible = v.name;
    v.name = unique;
    vars_->push_back(std::move(v));
    unsigned slot = static_cast<unsigned>(vars_->size() - 1);
    scopes_.bind(visible, slot);
    return slot;
  }

  std::vector<unsigned> arrayDims() {
    std::vector<unsigned> dims;
    while (acceptPunct("[")) {
      Expr e = foldLiterals(expression());
      auto v = constEval(e);
      if (!v)
        fail(ErrorKind::NonConstantBound, where() + ": array size must be a constant");
      if (*v < 1)
        fail(ErrorKind::TypeMismatch, where() + ": array length must be >= 1");
      dims.push_back(static_cast<unsigned>(*v));
      expectPunct("]");
    }
    return dims;
  }

  static unsigned product(const std::vector<unsigned> &dims) {
    unsigned n = 1;
    for (unsigned d : dims)
      n *= d;
    return n;
  }

  void parameter() {
    ParsedType pt = parseType();
    if (pt.isVoid)
      fail(ErrorKind::TypeMismatch, where() + ": void parameter");
    Variable v;
    v.isParam = true;
    bool byRef = false;
    std::vector<unsigned> dims;
    if (isPunct("*"))
      fail(ErrorKind::UnsupportedConstruct, where() + ": pointer parameter");
    if (acceptPunct("(")) {
      if (isPunct("*"))
        fail(ErrorKind::UnsupportedConstruct, where() + ": pointer parameter");
      expectPunct("&");
      v.name = expectIdent();
      expectPunct(")");
      dims = arrayDims();
      byRef = true;
    } else {
      if (acceptPunct("&") || acceptPunct("&&"))
        byRef = true;
      v.name = expectIdent();
      dims = arrayDims();
    }
    if (!dims.empty()) {
      v.type = HirType::array(pt.scalar.sign, pt.scalar.width, product(dims));
      if (pt.isConst) {
        v.dir = ParamDir::In;
        v.dirExplicit = true;
      }
    } else {
      v.type = pt.scalar;
      if (!byRef || pt.isConst) {
        v.dir = ParamDir::In;
        v.dirExplicit = true;
      }
    }
    unsigned slot = declare(v);
    if (dims.size() > 1)
      dims_[slot] = dims;
  }

  // ---- statements --------------------------------------------------------------
  void block(std::vector<Stmt> &out) {
    scopes_.push();
    while (!acceptPunct("}")) {
      if (at(Tok::End))
        syntax("unterminated block");
      statement(out, false);
    }
    scopes_.pop();
  }

  /// Parses a statement as its own scope (loop and branch bodies).
  std::vector<Stmt> body() {
    std::vector<Stmt> out;
    if (acceptPunct("{")) {
      block(out);
    } else {
      scopes_.push();
      statement(out, false);
      scopes_.pop();
    }
    return out;
  }

  void statement(std::vector<Stmt> &out, bool topLevel) {
    unsigned ln = line();
    if (acceptPunct(";"))
      return;
    if (acceptPunct("{")) {
      block(out);
      return;
    }
    if (at(Tok::Ident)) {
      const std::string &w = cur().text;
      if (w == "while" || w == "do" || w == "break" || w == "continue" || w == "goto" ||
          w == "switch" || w == "case" || w == "default")
        fail(ErrorKind::UnsupportedConstruct, where() + ": " + w);
      if (w == "return") {
        next();
        if (!topLevel)
          fail(ErrorKind::UnsupportedConstruct, where() + ": return inside nested control flow");
        if (returnSlot_) {
          Expr e = foldLiterals(expression());
          out.push_back(Stmt::assign(Expr::varRef(*returnSlot_, ln), std::move(e), ln));
        }
        expectPunct(";");
        sawReturn_ = true;
        return;
      }
      if (w == "if") {
        next();
        expectPunct("(");
        Expr cond = foldLiterals(expression());
        expectPunct(")");
        std::vector<Stmt> thenBody = body();
        std::vector<Stmt> elseBody;
        if (isIdent("else")) {
          next();
          elseBody = body();
        }
        out.push_back(Stmt::ifElse(std::move(cond), std::move(thenBody), std::move(elseBody), ln));
        return;
      }
      if (w == "for") {
        forStatement(out);
        return;
      }
      if (startsType()) {
        declaration(out);
        return;
      }
    }
    simpleStatement(out);
    expectPunct(";");
  }

  void declaration(std::vector<Stmt> &out) {
    ParsedType pt = parseType();
    if (pt.isVoid)
      fail(ErrorKind::TypeMismatch, where() + ": void variable");
    do {
      unsigned ln = line();
      if (isPunct("*") || isPunct("&"))
        fail(ErrorKind::UnsupportedConstruct, where() + ": pointer or reference local");
      Variable v;
      v.name = expectIdent();
      std::vector<unsigned> dims = arrayDims();
      v.type = dims.empty() ? pt.scalar
                            : HirType::array(pt.scalar.sign, pt.scalar.width, product(dims));
      // Parse the initializer before the name becomes visible.
      std::optional<Expr> init;
      std::vector<Expr> inits;
      bool hasList = false;
      if (acceptPunct("=")) {
        if (acceptPunct("{")) {
          hasList = true;
          if (!acceptPunct("}")) {
            do {
              inits.push_back(foldLiterals(expression()));
            } while (acceptPunct(",") && !isPunct("}"));
            expectPunct("}");
          }
        } else {
          init = foldLiterals(expression());
        }
      }
      unsigned slot = declare(v);
      if (dims.size() > 1)
        dims_[slot] = dims;
      if (v.type.isArray) {
        if (init)
          fail(ErrorKind::TypeMismatch, where() + ": array initialized from scalar");
        if (inits.size() > v.type.length)
          fail(ErrorKind::StaticOutOfBounds, where() + ": too many initializers for " + v.name);
        for (unsigned i = 0; i < v.type.length; ++i) {
          Expr value = i < inits.size() ? std::move(inits[i]) : Expr::literal(0, ln);
          out.push_back(Stmt::assign(Expr::index(slot, Expr::literal(i, ln), ln), std::move(value), ln));
        }
      } else {
        if (hasList && inits.size() > 1)
          fail(ErrorKind::TypeMismatch, where() + ": scalar initialized from list");
        Expr value = init ? std::move(*init) : (inits.empty() ? Expr::literal(0, ln) : std::move(inits[0]));
        out.push_back(Stmt::assign(Expr::varRef(slot, ln), std::move(value), ln));
      }
    } while (acceptPunct(","));
    expectPunct(";");
  }

  std::optional<BinOp> compoundOp(const std::string &p) {
    if (p == "+=") return BinOp::Add;
    if (p == "-=") return BinOp::Sub;
    if (p == "*=") return BinOp::Mul;
    if (p == "&=") return BinOp::And;
    if (p == "|=") return BinOp::Or;
    if (p == "^=") return BinOp::Xor;
    if (p == "<<=") return BinOp::Shl;
    if (p == ">>=") return BinOp::Lshr;
    if (p == "/=" || p == "%=")
      fail(ErrorKind::UnsupportedConstruct, where() + ": division");
    return std::nullopt;
  }

  void checkWritable(const Expr &lv) {
    const Variable &v = (*vars_)[lv.var];
    if (v.loopVar)
      fail(ErrorKind::UnsupportedConstruct, where() + ": assignment to loop variable " + v.name);
  }

  void simpleStatement(std::vector<Stmt> &out) {
    unsigned ln = line();
    if (isPunct("++") || isPunct("--")) {
      bool inc = next().text == "++";
      Expr lv = lvalue();
      checkWritable(lv);
      Expr rhs = Expr::binary(inc ? BinOp::Add : BinOp::Sub, lv, Expr::literal(1, ln), ln);
      out.push_back(Stmt::assign(std::move(lv), std::move(rhs), ln));
      return;
    }
    Expr lv = lvalue();
    checkWritable(lv);
    if (isPunct("++") || isPunct("--")) {
      bool inc = next().text == "++";
      Expr rhs = Expr::binary(inc ? BinOp::Add : BinOp::Sub, lv, Expr::literal(1, ln), ln);
      out.push_back(Stmt::assign(std::move(lv), std::move(rhs), ln));
      return;
    }
    if (acceptPunct("=")) {
      Expr rhs = foldLiterals(expression());
      out.push_back(Stmt::assign(std::move(lv), std::move(rhs), ln));
      return;
    }
    if (at(Tok::Punct)) {
      std::string p = cur().text;
      if (auto op = compoundOp(p)) {
        next();
        Expr rhs = foldLiterals(expression());
        Expr value = Expr::binary(*op, lv, std::move(rhs), ln);
        if (p == ">>=")
          value.shrBySign = true;
        out.push_back(Stmt::assign(std::move(lv), std::move(value), ln));
        return;
      }
    }
    syntax("expected assignment");
  }

  Expr lvalue() {
    unsigned ln = line();
    if (!at(Tok::Ident))
      syntax("expected assignable expression");
    std::string name = next().text;
    auto slot = scopes_.lookup(name);
    if (!slot)
      fail(ErrorKind::UseBeforeDecl, where() + ": " + name);
    if (isPunct("["))
      return indexExpr(*slot, ln);
    return Expr::varRef(*slot, ln);
  }

  void forStatement(std::vector<Stmt> &out) {
    unsigned ln = line();
    next();  // for
    expectPunct("(");
    scopes_.push();
    if (!startsType())
      fail(ErrorKind::UnsupportedConstruct, where() + ": for loop must declare its induction variable");
    ParsedType pt = parseType();
    Variable v;
    v.name = expectIdent();
    v.type = pt.scalar;
    v.loopVar = true;
    expectPunct("=");
    Expr initExpr = foldLiterals(expression());
    auto init = constEval(initExpr);
    if (!init)
      fail(ErrorKind::NonConstantBound, where() + ": loop start must be a constant");
    unsigned slot = declare(v);
    expectPunct(";");

    ForHeader h;
    h.var = slot;
    h.init = *init;
    // Condition: `v cmp bound` or `bound cmp v`.
    Expr cond = foldLiterals(expression());
    if (cond.kind != ExprKind::Binary || !isComparison(cond.binop) || cond.binop == BinOp::Eq)
      fail(ErrorKind::UnsupportedConstruct, where() + ": loop condition must compare the induction variable");
    auto isLoopVar = [&](const Expr &e) { return e.kind == ExprKind::Var && e.var == slot; };
    auto mirror = [](BinOp op) {
      switch (op) {
      case BinOp::Lt: return BinOp::Gt;
      case BinOp::Le: return BinOp::Ge;
      case BinOp::Gt: return BinOp::Lt;
      case BinOp::Ge: return BinOp::Le;
      default: return op;
      }
    };
    const Expr *boundExpr;
    if (isLoopVar(cond.args[0])) {
      h.cmp = cond.binop;
      boundExpr = &cond.args[1];
    } else if (isLoopVar(cond.args[1])) {
      h.cmp = mirror(cond.binop);
      boundExpr = &cond.args[0];
    } else {
      fail(ErrorKind::UnsupportedConstruct, where() + ": loop condition must compare the induction variable");
    }
    auto bound = constEval(*boundExpr);
    if (!bound)
      fail(ErrorKind::NonConstantBound, where() + ": loop bound must be a compile-time constant");
    h.bound = *bound;
    expectPunct(";");

    // Step.
    std::string vname = v.name;
    auto expectLoopVar = [&] {
      std::string n = expectIdent();
      auto s = scopes_.lookup(n);
      if (!s || *s != slot)
        fail(ErrorKind::UnsupportedConstruct, where() + ": loop step must update the induction variable");
    };
    if (isPunct("++") || isPunct("--")) {
      h.step = next().text == "++" ? 1 : -1;
      expectLoopVar();
    } else {
      expectLoopVar();
      if (isPunct("++") || isPunct("--")) {
        h.step = next().text == "++" ? 1 : -1;
      } else if (isPunct("+=") || isPunct("-=")) {
        bool add = next().text == "+=";
        auto s = constEval(foldLiterals(expression()));
        if (!s)
          fail(ErrorKind::NonConstantBound, where() + ": loop step must be a constant");
        h.step = add ? *s : -*s;
      } else if (acceptPunct("=")) {
        Expr e = foldLiterals(expression());
        if (e.kind != ExprKind::Binary || (e.binop != BinOp::Add && e.binop != BinOp::Sub) ||
            !isLoopVar(e.args[0]))
          fail(ErrorKind::UnsupportedConstruct, where() + ": unsupported loop step");
        auto s = constEval(e.args[1]);
        if (!s)
          fail(ErrorKind::NonConstantBound, where() + ": loop step must be a constant");
        h.step = e.binop == BinOp::Add ? *s : -*s;
      } else {
        fail(ErrorKind::UnsupportedConstruct, where() + ": unsupported loop step");
      }
    }
    if (h.step == 0)
      fail(ErrorKind::UnsupportedConstruct, where() + ": zero loop step");
    expectPunct(")");
    std::vector<Stmt> loopBody = body();
    scopes_.pop();
    out.push_back(Stmt::forLoop(h, std::move(loopBody), ln));
  }

  // ---- expressions ---------------------------------------------------------------
  Expr expression() {
    Expr e = logicalOr();
    if (isPunct("?"))
      fail(ErrorKind::UnsupportedConstruct, where() + ": conditional operator ?: (use if/else)");
    if (isPunct("=") || isPunct("+=") || isPunct("-="))
      fail(ErrorKind::UnsupportedConstruct, where() + ": assignment inside expression");
    if (isPunct(","))
      return e;
    return e;
  }

  static Expr truth(Expr e) {
    unsigned ln = e.line;
    return Expr::binary(BinOp::Ne, std::move(e), Expr::literal(0, ln), ln);
  }

  Expr logicalOr() {
    Expr lhs = logicalAnd();
    while (isPunct("||")) {
      unsigned ln = line();
      next();
      Expr rhs = logicalAnd();
      lhs = Expr::binary(BinOp::Or, truth(std::move(lhs)), truth(std::move(rhs)), ln);
    }
    return lhs;
  }

  Expr logicalAnd() {
    Expr lhs = binaryLevel(0);
    while (isPunct("&&")) {
      unsigned ln = line();
      next();
      Expr rhs = binaryLevel(0);
      lhs = Expr::binary(BinOp::And, truth(std::move(lhs)), truth(std::move(rhs)), ln);
    }
    return lhs;
  }

  /// Precedence levels from loosest to tightest.
  Expr binaryLevel(int level) {
    static const std::vector<std::vector<std::pair<std::string, BinOp>>> kLevels = {
        {{"|", BinOp::Or}},
        {{"^", BinOp::Xor}},
        {{"&", BinOp::And}},
        {{"==", BinOp::Eq}, {"!=", BinOp::Ne}},
        {{"<", BinOp::Lt}, {"<=", BinOp::Le}, {">", BinOp::Gt}, {">=", BinOp::Ge}},
        {{"<<", BinOp::Shl}, {">>", BinOp::Lshr}},
        {{"+", BinOp::Add}, {"-", BinOp::Sub}},
        {{"*", BinOp::Mul}},
    };
    if (level == static_cast<int>(kLevels.size()))
      return unary();
    Expr lhs = binaryLevel(level + 1);
    while (at(Tok::Punct)) {
      if (level + 1 == static_cast<int>(kLevels.size()) && (isPunct("/") || isPunct("%")))
        fail(ErrorKind::UnsupportedConstruct, where() + ": division");
      std::optional<BinOp> op;
      for (const auto &[p, o] : kLevels[level])
        if (cur().text == p)
          op = o;
      if (!op)
        break;
      bool shr = cur().text == ">>";
      unsigned ln = line();
      next();
      Expr rhs = binaryLevel(level + 1);
      lhs = Expr::binary(*op, std::move(lhs), std::move(rhs), ln);
      lhs.shrBySign = shr;
    }
    return lhs;
  }

  Expr unary() {
    unsigned ln = line();
    if (acceptPunct("-"))
      return Expr::unary(UnOp::Neg, unary(), ln);
    if (acceptPunct("~"))
      return Expr::unary(UnOp::Not, unary(), ln);
    if (acceptPunct("+"))
      return unary();
    if (acceptPunct("!"))
      return Expr::binary(BinOp::Eq, unary(), Expr::literal(0, ln), ln);
    if (isPunct("&") || isPunct("*"))
      fail(ErrorKind::UnsupportedConstruct, where() + ": pointer arithmetic");
    if (isPunct("++") || isPunct("--"))
      fail(ErrorKind::UnsupportedConstruct, where() + ": increment inside expression");
    if (isPunct("(") && peekTok(1).kind == Tok::Ident) {
      std::size_t save = pos_;
      next();
      if (startsType()) {
        ParsedType pt = parseType();
        if (pt.isVoid)
          fail(ErrorKind::TypeMismatch, where() + ": cast to void");
        expectPunct(")");
        Expr operand = unary();
        Expr c = Expr::castTo(CastKind::Zext, pt.scalar, std::move(operand), ln);
        c.autoCast = true;
        return c;
      }
      pos_ = save;
    }
    if (isIdent("static_cast")) {
      next();
      expectPunct("<");
      ParsedType pt = parseType();
      expectPunct(">");
      expectPunct("(");
      Expr operand = expression();
      expectPunct(")");
      Expr c = Expr::castTo(CastKind::Zext, pt.scalar, std::move(operand), ln);
      c.autoCast = true;
      return c;
    }
    return postfix();
  }

  Expr indexExpr(unsigned slot, unsigned ln) {
    std::vector<Expr> idx;
    while (acceptPunct("[")) {
      idx.push_back(foldLiterals(expression()));
      expectPunct("]");
    }
    const Variable &v = (*vars_)[slot];
    if (!v.type.isArray)
      fail(ErrorKind::TypeMismatch, where() + ": indexing scalar " + v.name);
    auto dIt = dims_.find(slot);
    std::vector<unsigned> dims = dIt == dims_.end() ? std::vector<unsigned>{v.type.length} : dIt->second;
    if (idx.size() != dims.size())
      fail(ErrorKind::TypeMismatch, where() + ": " + v.name + " expects " +
                                        std::to_string(dims.size()) + " index(es)");
    if (idx.size() == 1)
      return Expr::index(slot, std::move(idx[0]), ln);
    // Row-major linearization; all-constant indices fold to a literal.
    std::vector<std::optional<int64_t>> consts;
    bool allConst = true;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      consts.push_back(constEval(idx[i]));
      if (!consts.back())
        allConst = false;
      else if (*consts.back() < 0 || *consts.back() >= dims[i])
        fail(ErrorKind::StaticOutOfBounds, where() + ": index " + std::to_string(*consts.back()) +
                                               " into dimension of " + std::to_string(dims[i]));
    }
    if (allConst) {
      int64_t lin = 0;
      for (std::size_t i = 0; i < idx.size(); ++i)
        lin = lin * dims[i] + *consts[i];
      return Expr::index(slot, Expr::literal(lin, ln), ln);
    }
    HirType u64 = HirType::scalar(Signedness::Unsigned, 64);
    auto widen = [&](Expr e) {
      if (e.kind == ExprKind::Const && e.untypedLiteral)
        return e;
      Expr c = Expr::castTo(CastKind::Zext, u64, std::move(e), ln);
      c.autoCast = true;
      return c;
    };
    Expr lin = widen(std::move(idx[0]));
    for (std::size_t i = 1; i < idx.size(); ++i) {
      lin = Expr::binary(BinOp::Mul, std::move(lin), Expr::literal(dims[i], ln), ln);
      lin = Expr::binary(BinOp::Add, std::move(lin), widen(std::move(idx[i])), ln);
    }
    if (lin.kind != ExprKind::Cast && lin.kind != ExprKind::Binary) {
      Expr c = Expr::castTo(CastKind::Zext, u64, std::move(lin), ln);
      c.autoCast = true;
      lin = std::move(c);
    }
    return Expr::index(slot, std::move(lin), ln);
  }

  Expr postfix() {
    unsigned ln = line();
    if (acceptPunct("(")) {
      Expr e = expression();
      expectPunct(")");
      return e;
    }
    if (at(Tok::Number)) {
      uint64_t v = next().number;
      return Expr::literal(static_cast<int64_t>(v), ln);
    }
    if (at(Tok::Ident)) {
      std::string name = next().text;
      if (name == "true" || name == "false")
        return Expr::literal(name == "true" ? 1 : 0, ln);
      if (isPunct("("))
        fail(ErrorKind::UnsupportedConstruct, where() + ": function call " + name);
      auto g = globals_.find(name);
      if (g != globals_.end())
        return Expr::literal(g->second, ln);
      auto slot = scopes_.lookup(name);
      if (!slot)
        fail(ErrorKind::UseBeforeDecl, where() + ": " + name);
      if (isPunct("["))
        return indexExpr(*slot, ln);
      if (isPunct("."))
        fail(ErrorKind::UnsupportedConstruct, where() + ": member access");
      return Expr::varRef(*slot, ln);
    }
    syntax("expected expression");
  }

  std::vector<Token> toks_;
  std::string file_;
  std::size_t pos_ = 0;
  std::vector<Variable> *vars_ = nullptr;
  std::map<unsigned, std::vector<unsigned>> dims_;
  std::map<std::string, int64_t> globals_;
  Scopes scopes_;
  std::optional<unsigned> returnSlot_;
  bool sawReturn_ = false;
};

} // namespace

HirProgram parseMiniC(std::string_view source, std::string_view fileName) {
  Lexer lexer(source, fileName);
  Parser parser(lexer.run(), fileName);
  return parser.run();
}

} // namespace equivfuse::hir
