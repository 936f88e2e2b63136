#include "equivfuse/hir/text.h"

#include "equivfuse/support/error.h"

#include <cctype>
#include <map>
#include <memory>

namespace equivfuse::hir {

// ---- dump ---------------------------------------------------------------

namespace {

class Dumper {
 public:
  explicit Dumper(const HirFunction &f) : f_(f) {}

  std::string run() {
    out_ += "(function " + f_.name + "\n";
    for (const auto &v : f_.vars) {
      if (v.isParam) {
        out_ += "  (param ";
        if (v.dirExplicit)
          out_ += v.dir == ParamDir::In ? "in " : "out ";
        out_ += typeName(v.type) + " " + v.name + (v.splitPort ? " split" : "") + ")\n";
      } else {
        out_ += std::string("  (") + (v.loopVar ? "loopvar " : "local ") + typeName(v.type) + " " +
                v.name + ")\n";
      }
    }
    out_ += "  (body";
    for (const auto &s : f_.body)
      stmt(s, 2);
    out_ += "))\n";
    return out_;
  }

 private:
  void newline(int depth) {
    out_ += "\n";
    out_.append(static_cast<std::size_t>(depth) * 2, ' ');
  }

  void block(const std::vector<Stmt> &body, int depth) {
    out_ += " (";
    for (const auto &s : body)
      stmt(s, depth + 1);
    out_ += ")";
  }

  void stmt(const Stmt &s, int depth) {
    newline(depth);
    switch (s.kind) {
    case StmtKind::Assign:
      out_ += "(assign " + expr(s.lhs) + " " + expr(s.rhs) + ")";
      break;
    case StmtKind::If:
      out_ += "(if " + expr(s.rhs);
      block(s.body, depth);
      block(s.elseBody, depth);
      out_ += ")";
      break;
    case StmtKind::For:
      out_ += "(for " + f_.vars[s.loop.var].name + " " + std::to_string(s.loop.init) + " " +
              std::string(binOpName(s.loop.cmp)) + " " + std::to_string(s.loop.bound) + " " +
              std::to_string(s.loop.step);
      block(s.body, depth);
      out_ += ")";
      break;
    }
  }

  std::string expr(const Expr &e) {
    switch (e.kind) {
    case ExprKind::Const:
      if (e.untypedLiteral)
        return std::to_string(e.value);
      return "(const " + typeName(e.type) + " " + std::to_string(static_cast<uint64_t>(e.value)) + ")";
    case ExprKind::Var:
      return f_.vars[e.var].name;
    case ExprKind::Index:
      return "(index " + f_.vars[e.var].name + " " + expr(e.args[0]) + ")";
    case ExprKind::Unary:
      return "(" + std::string(unOpName(e.unop)) + " " + expr(e.args[0]) + ")";
    case ExprKind::Cast:
      return "(" + std::string(e.autoCast ? "cast" : castKindName(e.cast)) + " " + typeName(e.type) +
             " " + expr(e.args[0]) + ")";
    case ExprKind::Binary: {
      std::string op = e.shrBySign ? "shr" : std::string(binOpName(e.binop));
      return "(" + op + " " + expr(e.args[0]) + " " + expr(e.args[1]) + ")";
    }
    }
    return "?";
  }

  const HirFunction &f_;
  std::string out_;
};

} // namespace

std::string dumpHir(const HirFunction &f) { return Dumper(f).run(); }

std::string dumpHir(const HirProgram &p) {
  std::string out;
  for (const auto &f : p.functions)
    out += dumpHir(f);
  return out;
}

// ---- parse ---------------------------------------------------------------

HirType parseHirType(std::string_view text) {
  auto bad = [&]() -> HirType { fail(ErrorKind::SyntaxError, "bad type '" + std::string(text) + "'"); };
  if (text.size() < 2 || (text[0] != 'u' && text[0] != 's'))
    return bad();
  Signedness sign = text[0] == 's' ? Signedness::Signed : Signedness::Unsigned;
  std::size_t x = text.find('x');
  auto num = [&](std::string_view d) -> unsigned {
    if (d.empty() || d.size() > 9)
      bad();
    unsigned v = 0;
    for (char c : d) {
      if (!std::isdigit(static_cast<unsigned char>(c)))
        bad();
      v = v * 10 + static_cast<unsigned>(c - '0');
    }
    return v;
  };
  unsigned width = num(text.substr(1, x == std::string_view::npos ? std::string_view::npos : x - 1));
  if (width < 1 || width > 64)
    return bad();
  if (x == std::string_view::npos)
    return HirType::scalar(sign, width);
  unsigned len = num(text.substr(x + 1));
  if (len < 1)
    return bad();
  return HirType::array(sign, width, len);
}

namespace {

struct SExpr {
  bool isList = false;
  std::string atom;
  std::vector<SExpr> items;
  SourceLoc loc;
};

class Reader {
 public:
  Reader(std::string_view src, std::string_view file) : src_(src), file_(file) {}

  std::vector<SExpr> all() {
    std::vector<SExpr> out;
    while (true) {
      skip();
      if (pos_ >= src_.size())
        return out;
      out.push_back(read());
    }
  }

 private:
  [[noreturn]] void error(const std::string &msg) {
    fail(ErrorKind::SyntaxError, formatLoc(file_, {line_, col_}) + ": " + msg);
  }

  void bump() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ';') {
        while (pos_ < src_.size() && src_[pos_] != '\n')
          bump();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        bump();
      } else {
        break;
      }
    }
  }

  SExpr read() {
    SExpr e;
    e.loc = {line_, col_};
    if (src_[pos_] == '(') {
      e.isList = true;
      bump();
      while (true) {
        skip();
        if (pos_ >= src_.size())
          error("unbalanced '('");
        if (src_[pos_] == ')') {
          bump();
          return e;
        }
        e.items.push_back(read());
      }
    }
    if (src_[pos_] == ')')
      error("unexpected ')'");
    while (pos_ < src_.size() && src_[pos_] != '(' && src_[pos_] != ')' && src_[pos_] != ';' &&
           !std::isspace(static_cast<unsigned char>(src_[pos_]))) {
      e.atom.push_back(src_[pos_]);
      bump();
    }
    return e;
  }

  std::string_view src_;
  std::string file_;
  std::size_t pos_ = 0;
  unsigned line_ = 1;
  unsigned col_ = 1;
};

class Builder {
 public:
  explicit Builder(std::string_view file) : file_(file) {}

  HirFunction function(const SExpr &s) {
    if (!s.isList || s.items.size() < 2 || atom(s.items[0]) != "function")
      error(s, "expected (function NAME ...)");
    f_ = HirFunction();
    f_.name = atom(s.items[1]);
    f_.line = s.loc.line;
    names_.clear();
    bool sawBody = false;
    for (std::size_t i = 2; i < s.items.size(); ++i) {
      const SExpr &d = s.items[i];
      if (!d.isList || d.items.empty())
        error(d, "expected declaration or body");
      std::string head = atom(d.items[0]);
      if (head == "param") {
        param(d);
      } else if (head == "local" || head == "loopvar") {
        if (d.items.size() != 3)
          error(d, "expected (" + head + " TYPE NAME)");
        Variable v;
        v.type = parseType(d.items[1]);
        v.name = atom(d.items[2]);
        v.loopVar = head == "loopvar";
        declare(d, std::move(v));
      } else if (head == "body") {
        if (sawBody)
          error(d, "duplicate body");
        sawBody = true;
        for (std::size_t k = 1; k < d.items.size(); ++k)
          f_.body.push_back(stmt(d.items[k]));
      } else {
        error(d, "unknown form '" + head + "'");
      }
    }
    return std::move(f_);
  }

 private:
  [[noreturn]] void error(const SExpr &s, const std::string &msg) {
    fail(ErrorKind::SyntaxError, formatLoc(file_, s.loc) + ": " + msg);
  }

  const std::string &atom(const SExpr &s) {
    if (s.isList)
      error(s, "expected atom");
    return s.atom;
  }

  HirType parseType(const SExpr &s) {
    try {
      return parseHirType(atom(s));
    } catch (const Error &e) {
      error(s, e.detail());
    }
  }

  void declare(const SExpr &at, Variable v) {
    if (names_.count(v.name))
      fail(ErrorKind::DuplicateDefinition, formatLoc(file_, at.loc) + ": " + v.name);
    names_[v.name] = static_cast<unsigned>(f_.vars.size());
    f_.vars.push_back(std::move(v));
  }

  void param(const SExpr &d) {
    Variable v;
    v.isParam = true;
    std::size_t k = 1;
    if (k < d.items.size() && !d.items[k].isList && (d.items[k].atom == "in" || d.items[k].atom == "out")) {
      v.dir = d.items[k].atom == "in" ? ParamDir::In : ParamDir::Out;
      v.dirExplicit = true;
      ++k;
    }
    if (k + 2 > d.items.size())
      error(d, "expected (param [in|out] TYPE NAME [split])");
    v.type = parseType(d.items[k]);
    v.name = atom(d.items[k + 1]);
    k += 2;
    if (k < d.items.size()) {
      if (atom(d.items[k]) != "split" || k + 1 != d.items.size())
        error(d, "unexpected parameter flag");
      v.splitPort = true;
    }
    declare(d, std::move(v));
  }

  unsigned lookup(const SExpr &s) {
    auto it = names_.find(atom(s));
    if (it == names_.end())
      fail(ErrorKind::UseBeforeDecl, formatLoc(file_, s.loc) + ": " + s.atom);
    return it->second;
  }

  int64_t integer(const SExpr &s) {
    const std::string &a = atom(s);
    try {
      std::size_t used = 0;
      long long v = std::stoll(a, &used, 0);
      if (used != a.size())
        error(s, "bad integer '" + a + "'");
      return v;
    } catch (const std::logic_error &) {
      // Full-range unsigned constants.
      try {
        std::size_t used = 0;
        unsigned long long v = std::stoull(a, &used, 0);
        if (used == a.size())
          return static_cast<int64_t>(v);
      } catch (const std::logic_error &) {
      }
      error(s, "bad integer '" + a + "'");
    }
  }

  std::vector<Stmt> block(const SExpr &s) {
    if (!s.isList)
      error(s, "expected statement list");
    std::vector<Stmt> out;
    for (const auto &i : s.items)
      out.push_back(stmt(i));
    return out;
  }

  Stmt stmt(const SExpr &s) {
    if (!s.isList || s.items.empty())
      error(s, "expected statement");
    const std::string head = atom(s.items[0]);
    unsigned line = s.loc.line;
    if (head == "assign" && s.items.size() == 3)
      return Stmt::assign(expr(s.items[1]), expr(s.items[2]), line);
    if (head == "if" && s.items.size() == 4)
      return Stmt::ifElse(expr(s.items[1]), block(s.items[2]), block(s.items[3]), line);
    if (head == "for" && s.items.size() == 7) {
      ForHeader h;
      h.var = lookup(s.items[1]);
      h.init = integer(s.items[2]);
      static const std::map<std::string, BinOp> kCmp = {
          {"lt", BinOp::Lt}, {"le", BinOp::Le}, {"gt", BinOp::Gt}, {"ge", BinOp::Ge}, {"ne", BinOp::Ne}};
      auto c = kCmp.find(atom(s.items[3]));
      if (c == kCmp.end())
        error(s.items[3], "bad loop comparison");
      h.cmp = c->second;
      h.bound = integer(s.items[4]);
      h.step = integer(s.items[5]);
      return Stmt::forLoop(h, block(s.items[6]), line);
    }
    error(s, "malformed statement '" + head + "'");
  }

  Expr expr(const SExpr &s) {
    unsigned line = s.loc.line;
    if (!s.isList) {
      char c = s.atom.empty() ? '\0' : s.atom[0];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '-')
        return Expr::literal(integer(s), line);
      return Expr::varRef(lookup(s), line);
    }
    if (s.items.empty())
      error(s, "empty expression");
    const std::string head = atom(s.items[0]);
    auto arity = [&](std::size_t n) {
      if (s.items.size() != n + 1)
        error(s, "'" + head + "' expects " + std::to_string(n) + " operands");
    };
    if (head == "const") {
      arity(2);
      HirType t = parseType(s.items[1]);
      Expr e = Expr::constant(t, static_cast<uint64_t>(integer(s.items[2])));
      e.line = line;
      return e;
    }
    if (head == "index") {
      arity(2);
      return Expr::index(lookup(s.items[1]), expr(s.items[2]), line);
    }
    if (head == "not" || head == "neg") {
      arity(1);
      return Expr::unary(head == "not" ? UnOp::Not : UnOp::Neg, expr(s.items[1]), line);
    }
    if (head == "trunc" || head == "zext" || head == "sext" || head == "cast") {
      arity(2);
      CastKind k = head == "trunc" ? CastKind::Trunc : head == "sext" ? CastKind::Sext : CastKind::Zext;
      Expr e = Expr::castTo(k, parseType(s.items[1]), expr(s.items[2]), line);
      e.autoCast = head == "cast";
      return e;
    }
    static const std::map<std::string, BinOp> kOps = {
        {"add", BinOp::Add}, {"sub", BinOp::Sub},   {"mul", BinOp::Mul},   {"and", BinOp::And},
        {"or", BinOp::Or},   {"xor", BinOp::Xor},   {"shl", BinOp::Shl},   {"lshr", BinOp::Lshr},
        {"ashr", BinOp::Ashr}, {"shr", BinOp::Lshr}, {"eq", BinOp::Eq},    {"ne", BinOp::Ne},
        {"lt", BinOp::Lt},   {"le", BinOp::Le},     {"gt", BinOp::Gt},     {"ge", BinOp::Ge}};
    auto op = kOps.find(head);
    if (op == kOps.end())
      error(s, "unknown operator '" + head + "'");
    arity(2);
    Expr e = Expr::binary(op->second, expr(s.items[1]), expr(s.items[2]), line);
    e.shrBySign = head == "shr";
    return e;
  }

  std::string file_;
  HirFunction f_;
  std::map<std::string, unsigned> names_;
};

} // namespace

HirProgram parseHirText(std::string_view source, std::string_view fileName) {
  HirProgram prog;
  Builder b(fileName);
  for (const auto &s : Reader(source, fileName).all()) {
    HirFunction f = b.function(s);
    if (prog.find(f.name))
      fail(ErrorKind::DuplicateDefinition, "function " + f.name);
    prog.functions.push_back(std::move(f));
  }
  return prog;
}

} // namespace equivfuse::hir
