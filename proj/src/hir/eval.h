#pragma once

// Scalar operator semantics shared by the interpreter and static checks.

#include "equivfuse/hir/ast.h"
#include "equivfuse/hir/check.h"

namespace equivfuse::hir::detail {

inline uint64_t evalUnary(UnOp op, uint64_t a, unsigned width) {
  return maskTo(op == UnOp::Not ? ~a : uint64_t{0} - a, width);
}

inline uint64_t evalCast(CastKind kind, uint64_t a, const HirType &from, const HirType &to) {
  if (kind == CastKind::Sext)
    return maskTo(static_cast<uint64_t>(signedView(a, from.width)), to.width);
  return maskTo(a, to.width);
}

/// `a` and `b` carry `operand`'s width, except a shift amount which is any
/// unsigned bit pattern.
inline uint64_t evalBinary(BinOp op, uint64_t a, uint64_t b, const HirType &operand) {
  const unsigned w = operand.width;
  const bool s = operand.isSigned();
  auto lt = [&] { return s ? signedView(a, w) < signedView(b, w) : a < b; };
  auto le = [&] { return s ? signedView(a, w) <= signedView(b, w) : a <= b; };
  switch (op) {
  case BinOp::Add: return maskTo(a + b, w);
  case BinOp::Sub: return maskTo(a - b, w);
  case BinOp::Mul: return maskTo(a * b, w);
  case BinOp::And: return a & b;
  case BinOp::Or: return a | b;
  case BinOp::Xor: return a ^ b;
  case BinOp::Shl: return maskTo(a << (b % w), w);
  case BinOp::Lshr: return a >> (b % w);
  case BinOp::Ashr:
    return maskTo(static_cast<uint64_t>(signedView(a, w) >> (b % w)), w);
  case BinOp::Eq: return a == b;
  case BinOp::Ne: return a != b;
  case BinOp::Lt: return lt();
  case BinOp::Le: return le();
  case BinOp::Gt: return !le();
  case BinOp::Ge: return !lt();
  }
  return 0;
}

} // namespace equivfuse::hir::detail
