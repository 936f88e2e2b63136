#include "equivfuse/core/passes.h"

#include "equivfuse/support/error.h"

namespace equivfuse::core {

namespace {

using hir::BinOp;
using hir::Expr;
using hir::ExprKind;
using hir::Stmt;
using hir::StmtKind;

class Lowering {
 public:
  Lowering(const hir::HirFunction &f, std::size_t limit) : f_(f), b_(f.name), limit_(limit) {}

  CoreModule run() {
    env_.resize(f_.vars.size());
    for (unsigned slot = 0; slot < f_.vars.size(); ++slot) {
      const hir::Variable &v = f_.vars[slot];
      const unsigned n = v.type.isArray ? v.type.length : 1;
      const unsigned w = v.type.width;
      if (v.isParam && v.dir == hir::ParamDir::In) {
        if (v.splitPort) {
          for (unsigned i = 0; i < n; ++i)
            env_[slot].push_back(b_.input(v.name + "_" + std::to_string(i), w));
        } else {
          NodeId port = b_.input(v.name, n * w);
          for (unsigned i = 0; i < n; ++i)
            env_[slot].push_back(b_.extract(port, i * w + w - 1, i * w));
        }
      } else {
        env_[slot].assign(n, b_.constant(BitVec(w)));
      }
    }
    exec(f_.body);
    for (unsigned slot : f_.paramSlots()) {
      const hir::Variable &v = f_.vars[slot];
      if (v.dir != hir::ParamDir::Out)
        continue;
      if (v.splitPort) {
        for (std::size_t i = 0; i < env_[slot].size(); ++i)
          b_.output(v.name + "_" + std::to_string(i), env_[slot][i]);
      } else {
        b_.output(v.name, b_.concatLsbFirst(env_[slot]));
      }
    }
    return constFold(b_.finish());
  }

 private:
  NodeId elementIndex(const Expr &idxExpr, unsigned length, std::optional<uint64_t> *constant) {
    NodeId idx = lower(idxExpr);
    if (auto c = b_.constValue(idx)) {
      *constant = c->toU64Saturating() % length;
      return idx;
    }
    *constant = std::nullopt;
    return b_.modConst(idx, length);
  }

  NodeId read(const Expr &e) {
    const auto &elems = env_[e.var];
    std::optional<uint64_t> c;
    NodeId r = elementIndex(e.args[0], static_cast<unsigned>(elems.size()), &c);
    if (c)
      return elems[*c];
    return select(elems, r, indexBits(elems.size()) - 1, 0);
  }

  static int indexBits(std::size_t n) {
    int k = 0;
    while ((std::size_t{1} << k) < n)
      ++k;
    return k;
  }

  /// Balanced mux tree over the low bits of `r`, which is below the length.
  NodeId select(const std::vector<NodeId> &elems, NodeId r, int bit, std::size_t base) {
    if (bit < 0)
      return elems[std::min(base, elems.size() - 1)];
    std::size_t upper = base + (std::size_t{1} << bit);
    if (static_cast<unsigned>(bit) >= b_.width(r) || upper >= elems.size())
      return select(elems, r, bit - 1, base);
    return b_.mux(b_.extract(r, bit, bit), select(elems, r, bit - 1, upper),
                  select(elems, r, bit - 1, base));
  }

  void write(const Expr &lhs, NodeId value) {
    auto &elems = env_[lhs.var];
    if (lhs.kind == ExprKind::Var) {
      elems[0] = value;
      return;
    }
    std::optional<uint64_t> c;
    NodeId r = elementIndex(lhs.args[0], static_cast<unsigned>(elems.size()), &c);
    if (c) {
      elems[*c] = value;
      return;
    }
    const unsigned w = b_.width(r);
    for (std::size_t i = 0; i < elems.size(); ++i) {
      if (w < 64 && i >> w)
        break;
      elems[i] = b_.mux(b_.eq(r, b_.constant(BitVec(w, i))), value, elems[i]);
    }
  }

  NodeId lower(const Expr &e) {
    switch (e.kind) {
    case ExprKind::Const:
      return b_.constant(BitVec(e.type.width, hir::maskTo(static_cast<uint64_t>(e.value), e.type.width)));
    case ExprKind::Var: return env_[e.var][0];
    case ExprKind::Index: return read(e);
    case ExprKind::Unary: {
      NodeId a = lower(e.args[0]);
      if (e.unop == hir::UnOp::Not)
        return b_.bitNot(a);
      return b_.sub(b_.constant(BitVec(b_.width(a))), a);
    }
    case ExprKind::Cast:
      return b_.resize(lower(e.args[0]), e.type.width, e.cast == hir::CastKind::Sext);
    case ExprKind::Binary: return binary(e);
    }
    fail(ErrorKind::InvalidModule, "unknown expression kind");
  }

  NodeId binary(const Expr &e) {
    NodeId a = lower(e.args[0]);
    NodeId b = lower(e.args[1]);
    const bool s = e.args[0].type.isSigned();
    switch (e.binop) {
    case BinOp::Add: return b_.add(a, b);
    case BinOp::Sub: return b_.sub(a, b);
    case BinOp::Mul: return b_.mul(a, b);
    case BinOp::And: return b_.bitAnd(a, b);
    case BinOp::Or: return b_.bitOr(a, b);
    case BinOp::Xor: return b_.bitXor(a, b);
    case BinOp::Shl:
    case BinOp::Lshr:
    case BinOp::Ashr: {
      const unsigned w = b_.width(a);
      NodeId amount = b_.resize(b_.modConst(b, w), w, false);
      Op op = e.binop == BinOp::Shl ? Op::Shl : e.binop == BinOp::Lshr ? Op::Lshr : Op::Ashr;
      return b_.op(op, {a, amount});
    }
    case BinOp::Eq: return b_.eq(a, b);
    case BinOp::Ne: return b_.ne(a, b);
    case BinOp::Lt: return s ? b_.slt(a, b) : b_.ult(a, b);
    case BinOp::Le: return s ? b_.sle(a, b) : b_.ule(a, b);
    case BinOp::Gt: return s ? b_.slt(b, a) : b_.ult(b, a);
    case BinOp::Ge: return s ? b_.sle(b, a) : b_.ule(b, a);
    }
    fail(ErrorKind::InvalidModule, "unknown binary operator");
  }

  void count() {
    if (++executed_ > limit_)
      fail(ErrorKind::TripCountOverflow,
           f_.name + ": unrolling exceeds " + std::to_string(limit_) + " statements");
  }

  void exec(const std::vector<Stmt> &body) {
    for (const Stmt &s : body) {
      switch (s.kind) {
      case StmtKind::Assign:
        count();
        write(s.lhs, lower(s.rhs));
        break;
      case StmtKind::If: {
        count();
        NodeId cond = b_.reduceOr(lower(s.rhs));
        if (auto c = b_.constValue(cond)) {
          exec(c->isZero() ? s.elseBody : s.body);
          break;
        }
        auto saved = env_;
        exec(s.body);
        auto thenEnv = std::move(env_);
        env_ = std::move(saved);
        exec(s.elseBody);
        for (std::size_t v = 0; v < env_.size(); ++v)
          for (std::size_t i = 0; i < env_[v].size(); ++i)
            if (thenEnv[v][i] != env_[v][i])
              env_[v][i] = b_.mux(cond, thenEnv[v][i], env_[v][i]);
        break;
      }
      case StmtKind::For: {
        const hir::Variable &v = f_.vars[s.loop.var];
        for (int64_t x : hir::tripSequence(s.loop, v.type, limit_)) {
          count();
          env_[s.loop.var][0] =
              b_.constant(BitVec(v.type.width, hir::maskTo(static_cast<uint64_t>(x), v.type.width)));
          exec(s.body);
        }
        break;
      }
      }
    }
  }

  const hir::HirFunction &f_;
  ModuleBuilder b_;
  std::size_t limit_;
  std::size_t executed_ = 0;
  std::vector<std::vector<NodeId>> env_;
};

} // namespace

CoreModule lowerHir(const hir::ValidatedFunction &f, std::size_t unrollLimit) {
  return Lowering(f.fn(), unrollLimit).run();
}

} // namespace equivfuse::core
