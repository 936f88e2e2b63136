#include "equivfuse/hir/ast.h"

namespace equivfuse::hir {

std::string typeName(const HirType &t) {
  std::string s = (t.isSigned() ? "s" : "u") + std::to_string(t.width);
  if (t.isArray)
    s += "x" + std::to_string(t.length);
  return s;
}

std::string_view binOpName(BinOp op) {
  switch (op) {
  case BinOp::Add: return "add";
  case BinOp::Sub: return "sub";
  case BinOp::Mul: return "mul";
  case BinOp::And: return "and";
  case BinOp::Or: return "or";
  case BinOp::Xor: return "xor";
  case BinOp::Shl: return "shl";
  case BinOp::Lshr: return "lshr";
  case BinOp::Ashr: return "ashr";
  case BinOp::Eq: return "eq";
  case BinOp::Ne: return "ne";
  case BinOp::Lt: return "lt";
  case BinOp::Le: return "le";
  case BinOp::Gt: return "gt";
  case BinOp::Ge: return "ge";
  }
  return "?";
}

std::string_view unOpName(UnOp op) { return op == UnOp::Not ? "not" : "neg"; }

std::string_view castKindName(CastKind kind) {
  switch (kind) {
  case CastKind::Trunc: return "trunc";
  case CastKind::Zext: return "zext";
  case CastKind::Sext: return "sext";
  }
  return "?";
}

bool isComparison(BinOp op) {
  switch (op) {
  case BinOp::Eq:
  case BinOp::Ne:
  case BinOp::Lt:
  case BinOp::Le:
  case BinOp::Gt:
  case BinOp::Ge:
    return true;
  default:
    return false;
  }
}

bool isShift(BinOp op) { return op == BinOp::Shl || op == BinOp::Lshr || op == BinOp::Ashr; }

Expr Expr::literal(int64_t v, unsigned line) {
  Expr e;
  e.kind = ExprKind::Const;
  e.untypedLiteral = true;
  e.value = v;
  e.line = line;
  return e;
}

Expr Expr::constant(HirType t, uint64_t bits) {
  Expr e;
  e.kind = ExprKind::Const;
  e.type = t;
  e.value = static_cast<int64_t>(bits);
  return e;
}

Expr Expr::varRef(unsigned slot, unsigned line) {
  Expr e;
  e.kind = ExprKind::Var;
  e.var = slot;
  e.line = line;
  return e;
}

Expr Expr::index(unsigned slot, Expr idx, unsigned line) {
  Expr e;
  e.kind = ExprKind::Index;
  e.var = slot;
  e.args.push_back(std::move(idx));
  e.line = line;
  return e;
}

Expr Expr::binary(BinOp op, Expr lhs, Expr rhs, unsigned line) {
  Expr e;
  e.kind = ExprKind::Binary;
  e.binop = op;
  e.args.push_back(std::move(lhs));
  e.args.push_back(std::move(rhs));
  e.line = line;
  return e;
}

Expr Expr::unary(UnOp op, Expr operand, unsigned line) {
  Expr e;
  e.kind = ExprKind::Unary;
  e.unop = op;
  e.args.push_back(std::move(operand));
  e.line = line;
  return e;
}

Expr Expr::castTo(CastKind kind, HirType to, Expr operand, unsigned line) {
  Expr e;
  e.kind = ExprKind::Cast;
  e.cast = kind;
  e.type = to;
  e.args.push_back(std::move(operand));
  e.line = line;
  return e;
}

Stmt Stmt::assign(Expr lhs, Expr rhs, unsigned line) {
  Stmt s;
  s.kind = StmtKind::Assign;
  s.lhs = std::move(lhs);
  s.rhs = std::move(rhs);
  s.line = line;
  return s;
}

Stmt Stmt::ifElse(Expr cond, std::vector<Stmt> thenBody, std::vector<Stmt> elseBody,
                  unsigned line) {
  Stmt s;
  s.kind = StmtKind::If;
  s.rhs = std::move(cond);
  s.body = std::move(thenBody);
  s.elseBody = std::move(elseBody);
  s.line = line;
  return s;
}

Stmt Stmt::forLoop(ForHeader header, std::vector<Stmt> body, unsigned line) {
  Stmt s;
  s.kind = StmtKind::For;
  s.loop = header;
  s.body = std::move(body);
  s.line = line;
  return s;
}

std::vector<unsigned> HirFunction::paramSlots() const {
  std::vector<unsigned> out;
  for (unsigned i = 0; i < vars.size(); ++i)
    if (vars[i].isParam)
      out.push_back(i);
  return out;
}

std::optional<unsigned> HirFunction::findVar(const std::string &n) const {
  for (unsigned i = 0; i < vars.size(); ++i)
    if (vars[i].name == n)
      return i;
  return std::nullopt;
}

const HirFunction *HirProgram::find(const std::string &name) const {
  for (const auto &f : functions)
    if (f.name == name)
      return &f;
  return nullptr;
}

} // namespace equivfuse::hir
