#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace equivfuse::hir {

enum class Signedness { Unsigned, Signed };

/// Scalar or one-dimensional array of fixed-width integers.
struct HirType {
  bool isArray = false;
  Signedness sign = Signedness::Unsigned;
  unsigned width = 32;  // 1..64
  unsigned length = 1;  // element count, arrays only

  static HirType scalar(Signedness s, unsigned w) { return {false, s, w, 1}; }
  static HirType array(Signedness s, unsigned w, unsigned n) { return {true, s, w, n}; }
  bool isSigned() const { return sign == Signedness::Signed; }
  HirType element() const { return scalar(sign, width); }
  /// Total bits once flattened into a port.
  unsigned packedWidth() const { return width * (isArray ? length : 1); }

  bool operator==(const HirType &o) const {
    return isArray == o.isArray && sign == o.sign && width == o.width &&
           (!isArray || length == o.length);
  }
  bool operator!=(const HirType &o) const { return !(*this == o); }
};

std::string typeName(const HirType &t);

enum class BinOp {
  Add, Sub, Mul, And, Or, Xor, Shl, Lshr, Ashr, Eq, Ne, Lt, Le, Gt, Ge,
};
enum class UnOp { Not, Neg };
enum class CastKind { Trunc, Zext, Sext };

std::string_view binOpName(BinOp op);
std::string_view unOpName(UnOp op);
std::string_view castKindName(CastKind kind);
bool isComparison(BinOp op);
bool isShift(BinOp op);

enum class ExprKind { Const, Var, Index, Binary, Unary, Cast };

/// Expression tree. `type` is filled by `check`; before that, literal
/// constants carry `untypedLiteral = true` and adopt their type from context.
struct Expr {
  ExprKind kind = ExprKind::Const;
  HirType type;
  bool untypedLiteral = false;
  int64_t value = 0;  // Const: signed view for untyped, raw bits otherwise
  unsigned var = 0;   // Var / Index: variable slot
  BinOp binop = BinOp::Add;
  UnOp unop = UnOp::Not;
  CastKind cast = CastKind::Zext;
  /// Cast written in C syntax; `check` picks trunc/zext/sext from widths.
  bool autoCast = false;
  /// `>>` written in C syntax; `check` picks lshr/ashr from the lhs sign.
  bool shrBySign = false;
  std::vector<Expr> args;
  unsigned line = 0;

  static Expr literal(int64_t v, unsigned line = 0);
  static Expr constant(HirType t, uint64_t bits);
  static Expr varRef(unsigned slot, unsigned line = 0);
  static Expr index(unsigned slot, Expr idx, unsigned line = 0);
  static Expr binary(BinOp op, Expr lhs, Expr rhs, unsigned line = 0);
  static Expr unary(UnOp op, Expr operand, unsigned line = 0);
  static Expr castTo(CastKind kind, HirType to, Expr operand, unsigned line = 0);
};

enum class StmtKind { Assign, If, For };

/// Loop over a compile-time sequence: var = init; while (var cmp bound)
/// { body; var += step; }. `step` may be negative for counting down.
struct ForHeader {
  unsigned var = 0;
  int64_t init = 0;
  BinOp cmp = BinOp::Lt;
  int64_t bound = 0;
  int64_t step = 1;
};

struct Stmt {
  StmtKind kind = StmtKind::Assign;
  Expr lhs;   // Assign: Var or Index
  Expr rhs;   // Assign: value; If: condition
  ForHeader loop;
  std::vector<Stmt> body;      // If: then-branch; For: body
  std::vector<Stmt> elseBody;  // If only
  unsigned line = 0;

  static Stmt assign(Expr lhs, Expr rhs, unsigned line = 0);
  static Stmt ifElse(Expr cond, std::vector<Stmt> thenBody, std::vector<Stmt> elseBody,
                     unsigned line = 0);
  static Stmt forLoop(ForHeader header, std::vector<Stmt> body, unsigned line = 0);
};

enum class ParamDir { In, Out };

/// Every named storage location. Parameters come first, in declaration order.
struct Variable {
  std::string name;
  HirType type;
  bool isParam = false;
  ParamDir dir = ParamDir::In;
  bool loopVar = false;
  /// Direction was fixed by source (const, by-value) or a directive rather
  /// than inferred from writes.
  bool dirExplicit = false;
  /// Lower an array parameter to one port per element (`name_i`).
  bool splitPort = false;
};

struct HirFunction {
  std::string name;
  std::vector<Variable> vars;
  std::vector<Stmt> body;
  unsigned line = 0;

  std::vector<unsigned> paramSlots() const;
  std::optional<unsigned> findVar(const std::string &name) const;
};

struct HirProgram {
  std::vector<HirFunction> functions;
  const HirFunction *find(const std::string &name) const;
};

} // namespace equivfuse::hir
