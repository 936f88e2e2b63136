#include "equivfuse/hir/check.h"

#include "equivfuse/support/error.h"
#include "eval.h"

#include <algorithm>
#include <map>
#include <set>

namespace equivfuse::hir {

uint64_t maskTo(uint64_t v, unsigned width) {
  return width >= 64 ? v : v & ((uint64_t{1} << width) - 1);
}

int64_t signedView(uint64_t v, unsigned width) {
  if (width >= 64)
    return static_cast<int64_t>(v);
  uint64_t sign = uint64_t{1} << (width - 1);
  return static_cast<int64_t>((v ^ sign) - sign);
}

std::vector<int64_t> tripSequence(const ForHeader &h, const HirType &t, std::size_t limit) {
  std::vector<int64_t> seq;
  uint64_t bits = maskTo(static_cast<uint64_t>(h.init), t.width);
  auto view = [&](uint64_t b) -> __int128 {
    return t.isSigned() ? __int128(signedView(b, t.width)) : __int128(b);
  };
  const __int128 bound = h.bound;
  auto holds = [&](__int128 v) {
    switch (h.cmp) {
    case BinOp::Lt: return v < bound;
    case BinOp::Le: return v <= bound;
    case BinOp::Gt: return v > bound;
    case BinOp::Ge: return v >= bound;
    case BinOp::Ne: return v != bound;
    default: return false;
    }
  };
  while (holds(view(bits))) {
    if (seq.size() >= limit)
      fail(ErrorKind::TripCountOverflow,
           "loop exceeds " + std::to_string(limit) + " iterations (non-terminating or too large to unroll)");
    seq.push_back(static_cast<int64_t>(view(bits)));
    bits = maskTo(bits + static_cast<uint64_t>(h.step), t.width);
  }
  return seq;
}

std::vector<unsigned> ValidatedFunction::inputs() const {
  std::vector<unsigned> out;
  for (unsigned s : fn_.paramSlots())
    if (fn_.vars[s].dir == ParamDir::In)
      out.push_back(s);
  return out;
}

std::vector<unsigned> ValidatedFunction::outputs() const {
  std::vector<unsigned> out;
  for (unsigned s : fn_.paramSlots())
    if (fn_.vars[s].dir == ParamDir::Out)
      out.push_back(s);
  return out;
}

const ValidatedFunction *ValidatedProgram::find(const std::string &name) const {
  for (const auto &f : functions)
    if (f.name() == name)
      return &f;
  return nullptr;
}

void applyDirectives(HirFunction &f, const std::vector<PortDirective> &directives,
                     std::vector<std::string> *warnings) {
  for (const auto &d : directives) {
    Variable *target = nullptr;
    for (auto &v : f.vars)
      if (v.isParam && v.name == d.name)
        target = &v;
    if (!target) {
      if (warnings)
        warnings->push_back("directive for '" + d.name + "' matches no parameter of " + f.name);
      continue;
    }
    if (d.dir) {
      target->dir = *d.dir;
      target->dirExplicit = true;
    }
    if (d.split) {
      if (!target->type.isArray) {
        if (warnings)
          warnings->push_back("split ignored for scalar parameter '" + d.name + "'");
      } else {
        target->splitPort = true;
      }
    }
    if (d.rename)
      target->name = *d.rename;
  }
}

namespace {

constexpr std::size_t kStaticEnumLimit = 1u << 16;

class Checker {
 public:
  Checker(HirFunction &f, std::size_t limit, std::vector<std::string> &warnings)
      : f_(f), limit_(limit), warnings_(warnings) {}

  void run() {
    for (auto &v : f_.vars)
      if (v.type.width < 1 || v.type.width > 64)
        fail(ErrorKind::TypeMismatch, v.name + ": width must be 1..64");
    for (auto &s : f_.body)
      stmt(s);
    std::size_t count = countStatements(f_.body);
    if (count > limit_)
      fail(ErrorKind::TripCountOverflow, f_.name + ": unrolling needs " + std::to_string(count) +
                                             " statements (limit " + std::to_string(limit_) + ")");
    inferDirections();
    checkPortNames();
    checkCoverage();
  }

 private:
  [[noreturn]] void error(ErrorKind k, unsigned line, const std::string &msg) {
    fail(k, f_.name + (line ? ":" + std::to_string(line) : std::string()) + ": " + msg);
  }

  static bool untyped(const Expr &e) { return e.kind == ExprKind::Const && e.untypedLiteral; }

  void settleLiteral(Expr &e, const HirType &t) {
    HirType st = t.isArray ? t.element() : t;
    if (st.width < 63) {
      int64_t lo = -(int64_t{1} << (st.width - 1));
      int64_t hi = (int64_t{1} << st.width) - 1;
      if (e.value < lo || e.value > hi)
        error(ErrorKind::TypeMismatch, e.line,
              "literal " + std::to_string(e.value) + " does not fit " + typeName(st));
    }
    e.untypedLiteral = false;
    e.type = st;
    e.value = static_cast<int64_t>(maskTo(static_cast<uint64_t>(e.value), st.width));
  }

  void requireScalar(const Expr &e, const char *what) {
    if (e.type.isArray)
      error(ErrorKind::TypeMismatch, e.line, std::string("array used as ") + what);
  }

  void expr(Expr &e, std::optional<HirType> ctx) {
    switch (e.kind) {
    case ExprKind::Const:
      if (e.untypedLiteral)
        settleLiteral(e, ctx.value_or(HirType::scalar(Signedness::Signed, 64)));
      return;
    case ExprKind::Var:
      slotCheck(e.var, e.line);
      e.type = f_.vars[e.var].type;
      requireScalar(e, "scalar (missing index?)");
      return;
    case ExprKind::Index: {
      slotCheck(e.var, e.line);
      const Variable &v = f_.vars[e.var];
      if (!v.type.isArray)
        error(ErrorKind::TypeMismatch, e.line, "indexing scalar " + v.name);
      Expr &idx = e.args[0];
      if (untyped(idx)) {
        if (idx.value < 0 || static_cast<uint64_t>(idx.value) >= v.type.length)
          error(ErrorKind::StaticOutOfBounds, e.line,
                "index " + std::to_string(idx.value) + " into " + v.name + "[" +
                    std::to_string(v.type.length) + "]");
        settleLiteral(idx, HirType::scalar(Signedness::Unsigned, 64));
      } else {
        expr(idx, std::nullopt);
        requireScalar(idx, "index");
        checkStaticIndex(idx, v, e.line);
      }
      e.type = v.type.element();
      return;
    }
    case ExprKind::Unary:
      expr(e.args[0], ctx);
      requireScalar(e.args[0], "operand");
      e.type = e.args[0].type;
      return;
    case ExprKind::Cast: {
      Expr &a = e.args[0];
      HirType to = e.type;
      if (untyped(a)) {
        // A cast literal is just a literal of the target type.
        uint64_t bits = maskTo(static_cast<uint64_t>(a.value), to.width);
        unsigned line = e.line;
        e = Expr::constant(to, bits);
        e.line = line;
        return;
      }
      expr(a, std::nullopt);
      requireScalar(a, "cast operand");
      const HirType &from = a.type;
      if (e.autoCast) {
        if (to.width < from.width)
          e.cast = CastKind::Trunc;
        else
          e.cast = from.isSigned() ? CastKind::Sext : CastKind::Zext;
        e.autoCast = false;
      } else if ((e.cast == CastKind::Trunc && to.width > from.width) ||
                 (e.cast != CastKind::Trunc && to.width < from.width)) {
        error(ErrorKind::TypeMismatch, e.line,
              std::string(castKindName(e.cast)) + " from " + typeName(from) + " to " + typeName(to));
      }
      return;
    }
    case ExprKind::Binary:
      binary(e, ctx);
      return;
    }
  }

  void binary(Expr &e, std::optional<HirType> ctx) {
    Expr &l = e.args[0];
    Expr &r = e.args[1];
    if (isShift(e.binop)) {
      expr(l, ctx);
      requireScalar(l, "shift operand");
      if (untyped(r)) {
        if (r.value < 0)
          error(ErrorKind::TypeMismatch, e.line, "negative shift amount");
        settleLiteral(r, HirType::scalar(Signedness::Unsigned, 64));
      } else {
        expr(r, std::nullopt);
        requireScalar(r, "shift amount");
      }
      if (e.shrBySign) {
        e.binop = l.type.isSigned() ? BinOp::Ashr : BinOp::Lshr;
        e.shrBySign = false;
      }
      e.type = l.type;
      return;
    }
    const bool cmp = isComparison(e.binop);
    std::optional<HirType> operandCtx = cmp ? std::nullopt : ctx;
    if (untyped(l) && !untyped(r)) {
      expr(r, operandCtx);
      expr(l, r.type);
    } else {
      expr(l, operandCtx);
      expr(r, l.type);
    }
    requireScalar(l, "operand");
    requireScalar(r, "operand");
    if (l.type != r.type)
      error(ErrorKind::TypeMismatch, e.line,
            std::string(binOpName(e.binop)) + " operands " + typeName(l.type) + " and " +
                typeName(r.type) + " differ (add an explicit cast)");
    e.type = cmp ? HirType::scalar(Signedness::Unsigned, 1) : l.type;
  }

  void slotCheck(unsigned slot, unsigned line) {
    if (slot >= f_.vars.size())
      error(ErrorKind::UseBeforeDecl, line, "unknown variable slot " + std::to_string(slot));
  }

  void stmt(Stmt &s) {
    switch (s.kind) {
    case StmtKind::Assign: {
      Expr &lhs = s.lhs;
      if (lhs.kind != ExprKind::Var && lhs.kind != ExprKind::Index)
        error(ErrorKind::TypeMismatch, s.line, "assignment target is not a variable");
      slotCheck(lhs.var, s.line);
      const Variable &v = f_.vars[lhs.var];
      if (v.loopVar && loopVars_.count(lhs.var))
        error(ErrorKind::UnsupportedConstruct, s.line, "assignment to loop variable " + v.name);
      if (lhs.kind == ExprKind::Var && v.type.isArray)
        error(ErrorKind::TypeMismatch, s.line, "whole-array assignment to " + v.name);
      expr(lhs, std::nullopt);
      expr(s.rhs, lhs.type);
      requireScalar(s.rhs, "value");
      if (s.rhs.type != lhs.type)
        error(ErrorKind::TypeMismatch, s.line,
              "assigning " + typeName(s.rhs.type) + " to " + typeName(lhs.type) + " " + v.name +
                  " (add an explicit cast)");
      written_.insert(lhs.var);
      return;
    }
    case StmtKind::If:
      expr(s.rhs, std::nullopt);
      requireScalar(s.rhs, "condition");
      for (auto &b : s.body)
        stmt(b);
      for (auto &b : s.elseBody)
        stmt(b);
      return;
    case StmtKind::For: {
      slotCheck(s.loop.var, s.line);
      const Variable &v = f_.vars[s.loop.var];
      if (v.type.isArray)
        error(ErrorKind::TypeMismatch, s.line, "array induction variable");
      if (s.loop.step == 0)
        error(ErrorKind::UnsupportedConstruct, s.line, "zero loop step");
      auto seq = tripSequence(s.loop, v.type, limit_);
      std::vector<uint64_t> bits;
      bits.reserve(seq.size());
      for (int64_t x : seq)
        bits.push_back(maskTo(static_cast<uint64_t>(x), v.type.width));
      loopVars_[s.loop.var] = std::move(bits);
      for (auto &b : s.body)
        stmt(b);
      loopVars_.erase(s.loop.var);
      return;
    }
    }
  }

  static std::size_t satAdd(std::size_t a, std::size_t b) {
    return a + b < a ? SIZE_MAX : a + b;
  }

  std::size_t countStatements(const std::vector<Stmt> &body) {
    std::size_t n = 0;
    for (const auto &s : body) {
      switch (s.kind) {
      case StmtKind::Assign:
        n = satAdd(n, 1);
        break;
      case StmtKind::If:
        n = satAdd(n, satAdd(1, satAdd(countStatements(s.body), countStatements(s.elseBody))));
        break;
      case StmtKind::For: {
        std::size_t trips = tripSequence(s.loop, f_.vars[s.loop.var].type, limit_).size();
        std::size_t inner = countStatements(s.body);
        n = satAdd(n, trips != 0 && inner > SIZE_MAX / trips ? SIZE_MAX : trips * inner);
        break;
      }
      }
    }
    return n;
  }

  // ---- static evaluation over loop variables ---------------------------------

  static void collectVars(const Expr &e, const std::map<unsigned, std::vector<uint64_t>> &loops,
                          std::set<unsigned> &vars, bool &pure) {
    if (e.kind == ExprKind::Var) {
      if (loops.count(e.var))
        vars.insert(e.var);
      else
        pure = false;
    } else if (e.kind == ExprKind::Index) {
      pure = false;
    }
    for (const auto &a : e.args)
      collectVars(a, loops, vars, pure);
  }

  uint64_t evalStatic(const Expr &e, const std::map<unsigned, uint64_t> &env) {
    switch (e.kind) {
    case ExprKind::Const: return static_cast<uint64_t>(e.value);
    case ExprKind::Var: return env.at(e.var);
    case ExprKind::Unary: return detail::evalUnary(e.unop, evalStatic(e.args[0], env), e.type.width);
    case ExprKind::Cast:
      return detail::evalCast(e.cast, evalStatic(e.args[0], env), e.args[0].type, e.type);
    case ExprKind::Binary:
      return detail::evalBinary(e.binop, evalStatic(e.args[0], env), evalStatic(e.args[1], env),
                                e.args[0].type);
    case ExprKind::Index: break;
    }
    return 0;
  }

  /// Every value `e` takes across the enclosing loops, or nullopt when it
  /// depends on anything but induction variables.
  std::optional<std::vector<int64_t>> staticValues(const Expr &e,
                                                   const std::map<unsigned, std::vector<uint64_t>> &loops) {
    std::set<unsigned> vars;
    bool pure = true;
    collectVars(e, loops, vars, pure);
    if (!pure)
      return std::nullopt;
    std::vector<unsigned> order(vars.begin(), vars.end());
    std::size_t combos = 1;
    for (unsigned v : order) {
      std::size_t n = loops.at(v).size();
      if (n == 0)
        return std::vector<int64_t>{};
      if (combos > kStaticEnumLimit / n)
        return std::nullopt;
      combos *= n;
    }
    std::vector<int64_t> out;
    std::map<unsigned, uint64_t> env;
    std::vector<std::size_t> pos(order.size(), 0);
    for (std::size_t c = 0; c < combos; ++c) {
      for (std::size_t i = 0; i < order.size(); ++i)
        env[order[i]] = loops.at(order[i])[pos[i]];
      uint64_t bits = evalStatic(e, env);
      out.push_back(e.type.isSigned() ? signedView(bits, e.type.width) : static_cast<int64_t>(bits));
      for (std::size_t i = 0; i < order.size(); ++i) {
        if (++pos[i] < loops.at(order[i]).size())
          break;
        pos[i] = 0;
      }
    }
    return out;
  }

  void checkStaticIndex(const Expr &idx, const Variable &arr, unsigned line) {
    auto values = staticValues(idx, loopVars_);
    if (!values)
      return;
    for (int64_t v : *values) {
      bool unsignedHuge = !idx.type.isSigned() && idx.type.width == 64 && v < 0;
      if (v < 0 || unsignedHuge || static_cast<uint64_t>(v) >= arr.type.length)
        error(ErrorKind::StaticOutOfBounds, line,
              "index reaches " + (unsignedHuge ? std::to_string(static_cast<uint64_t>(v)) : std::to_string(v)) +
                  " in " + arr.name + "[" + std::to_string(arr.type.length) + "]");
    }
  }

  // ---- directions and coverage ---------------------------------------------------

  void inferDirections() {
    for (auto &v : f_.vars) {
      if (!v.isParam || v.dirExplicit)
        continue;
      unsigned slot = static_cast<unsigned>(&v - f_.vars.data());
      v.dir = written_.count(slot) ? ParamDir::Out : ParamDir::In;
    }
  }

  void checkPortNames() {
    std::set<std::string> names;
    auto add = [&](const std::string &n) {
      if (!names.insert(n).second)
        fail(ErrorKind::DuplicateDefinition, f_.name + ": port name " + n + " used twice");
    };
    for (const auto &v : f_.vars) {
      if (!v.isParam)
        continue;
      if (v.splitPort)
        for (unsigned i = 0; i < v.type.length; ++i)
          add(v.name + "_" + std::to_string(i));
      else
        add(v.name);
    }
  }

  struct Coverage {
    std::set<unsigned> scalars;
    std::map<unsigned, std::set<uint64_t>> elements;
  };

  static Coverage intersect(const Coverage &a, const Coverage &b) {
    Coverage c;
    std::set_intersection(a.scalars.begin(), a.scalars.end(), b.scalars.begin(), b.scalars.end(),
                          std::inserter(c.scalars, c.scalars.begin()));
    for (const auto &[slot, ea] : a.elements) {
      auto it = b.elements.find(slot);
      if (it == b.elements.end())
        continue;
      std::set<uint64_t> both;
      std::set_intersection(ea.begin(), ea.end(), it->second.begin(), it->second.end(),
                            std::inserter(both, both.begin()));
      c.elements[slot] = std::move(both);
    }
    return c;
  }

  void cover(const std::vector<Stmt> &body, std::map<unsigned, std::vector<uint64_t>> &loops, Coverage &c) {
    for (const auto &s : body) {
      switch (s.kind) {
      case StmtKind::Assign:
        if (s.lhs.kind == ExprKind::Var) {
          c.scalars.insert(s.lhs.var);
        } else if (auto vals = staticValues(s.lhs.args[0], loops)) {
          for (int64_t v : *vals)
            c.elements[s.lhs.var].insert(static_cast<uint64_t>(v));
        }
        break;
      case StmtKind::If: {
        Coverage t = c, e = c;
        cover(s.body, loops, t);
        cover(s.elseBody, loops, e);
        c = intersect(t, e);
        break;
      }
      case StmtKind::For: {
        const Variable &v = f_.vars[s.loop.var];
        auto seq = tripSequence(s.loop, v.type, limit_);
        std::vector<uint64_t> bits;
        for (int64_t x : seq)
          bits.push_back(maskTo(static_cast<uint64_t>(x), v.type.width));
        loops[s.loop.var] = std::move(bits);
        if (!seq.empty())
          cover(s.body, loops, c);
        loops.erase(s.loop.var);
        break;
      }
      }
    }
  }

  void checkCoverage() {
    Coverage c;
    std::map<unsigned, std::vector<uint64_t>> loops;
    cover(f_.body, loops, c);
    for (unsigned slot : f_.paramSlots()) {
      const Variable &v = f_.vars[slot];
      if (v.dir != ParamDir::Out)
        continue;
      if (!written_.count(slot))
        fail(ErrorKind::UnassignedOutput, f_.name + ": output " + v.name + " is never assigned");
      bool full = v.type.isArray ? c.elements[slot].size() == v.type.length : c.scalars.count(slot) > 0;
      if (!full)
        warnings_.push_back(f_.name + ": output " + v.name +
                            " may be unassigned on some path (defaults to 0)");
    }
  }

  HirFunction &f_;
  std::size_t limit_;
  std::vector<std::string> &warnings_;
  std::map<unsigned, std::vector<uint64_t>> loopVars_;
  std::set<unsigned> written_;
};

} // namespace

ValidatedFunction checkFunction(HirFunction f, std::size_t unrollLimit) {
  ValidatedFunction vf;
  Checker(f, unrollLimit, vf.warnings_).run();
  vf.fn_ = std::move(f);
  return vf;
}

ValidatedProgram check(const HirProgram &program) {
  ValidatedProgram out;
  for (const auto &f : program.functions)
    out.functions.push_back(checkFunction(f));
  return out;
}

} // namespace equivfuse::hir
