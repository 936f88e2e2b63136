#include "equivfuse/hir/interpret.h"

#include "equivfuse/support/error.h"
#include "eval.h"

namespace equivfuse::hir {

namespace {

class Interpreter {
 public:
  explicit Interpreter(const HirFunction &f) : f_(f), store_(f.vars.size()) {
    for (unsigned i = 0; i < f.vars.size(); ++i)
      store_[i].assign(f.vars[i].type.isArray ? f.vars[i].type.length : 1, 0);
  }

  HirValues run(const HirValues &inputs) {
    for (unsigned slot : f_.paramSlots()) {
      const Variable &v = f_.vars[slot];
      if (v.dir != ParamDir::In)
        continue;
      auto it = inputs.find(v.name);
      if (it == inputs.end())
        fail(ErrorKind::TypeMismatch, "missing input " + v.name);
      if (it->second.size() != store_[slot].size())
        fail(ErrorKind::TypeMismatch, "input " + v.name + " has " + std::to_string(it->second.size()) +
                                          " elements, expected " + std::to_string(store_[slot].size()));
      for (uint64_t x : it->second)
        if (maskTo(x, v.type.width) != x)
          fail(ErrorKind::TypeMismatch, "input " + v.name + " value " + std::to_string(x) +
                                            " exceeds " + std::to_string(v.type.width) + " bits");
      store_[slot] = it->second;
    }
    exec(f_.body);
    HirValues out;
    for (unsigned slot : f_.paramSlots())
      if (f_.vars[slot].dir == ParamDir::Out)
        out[f_.vars[slot].name] = store_[slot];
    return out;
  }

 private:
  std::size_t index(const Expr &arrayRef) {
    const Expr &idx = arrayRef.args[0];
    uint64_t bits = eval(idx);
    const Variable &v = f_.vars[arrayRef.var];
    bool negative = idx.type.isSigned() && signedView(bits, idx.type.width) < 0;
    if (negative || bits >= v.type.length)
      fail(ErrorKind::DynamicOutOfBounds,
           f_.name + ":" + std::to_string(arrayRef.line) + ": index " +
               (negative ? std::to_string(signedView(bits, idx.type.width)) : std::to_string(bits)) +
               " out of range for " + v.name + "[" + std::to_string(v.type.length) + "]");
    return static_cast<std::size_t>(bits);
  }

  uint64_t eval(const Expr &e) {
    switch (e.kind) {
    case ExprKind::Const: return static_cast<uint64_t>(e.value);
    case ExprKind::Var: return store_[e.var][0];
    case ExprKind::Index: return store_[e.var][index(e)];
    case ExprKind::Unary: return detail::evalUnary(e.unop, eval(e.args[0]), e.type.width);
    case ExprKind::Cast: return detail::evalCast(e.cast, eval(e.args[0]), e.args[0].type, e.type);
    case ExprKind::Binary: {
      uint64_t a = eval(e.args[0]);
      uint64_t b = eval(e.args[1]);
      return detail::evalBinary(e.binop, a, b, e.args[0].type);
    }
    }
    return 0;
  }

  void exec(const std::vector<Stmt> &body) {
    for (const auto &s : body) {
      switch (s.kind) {
      case StmtKind::Assign: {
        uint64_t value = eval(s.rhs);
        if (s.lhs.kind == ExprKind::Var)
          store_[s.lhs.var][0] = value;
        else
          store_[s.lhs.var][index(s.lhs)] = value;
        break;
      }
      case StmtKind::If:
        exec(eval(s.rhs) != 0 ? s.body : s.elseBody);
        break;
      case StmtKind::For: {
        const Variable &v = f_.vars[s.loop.var];
        for (int64_t x : tripSequence(s.loop, v.type)) {
          store_[s.loop.var][0] = maskTo(static_cast<uint64_t>(x), v.type.width);
          exec(s.body);
        }
        break;
      }
      }
    }
  }

  const HirFunction &f_;
  std::vector<HirValue> store_;
};

} // namespace

HirValues interpret(const ValidatedFunction &f, const HirValues &inputs) {
  return Interpreter(f.fn()).run(inputs);
}

} // namespace equivfuse::hir
