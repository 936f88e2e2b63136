#pragma once

#include "equivfuse/hir/ast.h"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace equivfuse::hir {

/// A session-level override for one parameter, applied before `check`.
struct PortDirective {
  std::string name;
  std::optional<ParamDir> dir;
  bool split = false;
  std::optional<std::string> rename;
};

/// A function that passed `check`: every expression is typed, every C-style
/// cast and `>>` is resolved, and every parameter has a final direction.
/// Only `check` can construct one.
class ValidatedFunction {
 public:
  const HirFunction &fn() const { return fn_; }
  const std::string &name() const { return fn_.name; }
  const std::vector<std::string> &warnings() const { return warnings_; }

  /// Parameter slots, in declaration order.
  std::vector<unsigned> inputs() const;
  std::vector<unsigned> outputs() const;

 private:
  friend ValidatedFunction checkFunction(HirFunction, std::size_t);
  ValidatedFunction() = default;
  HirFunction fn_;
  std::vector<std::string> warnings_;
};

struct ValidatedProgram {
  std::vector<ValidatedFunction> functions;
  const ValidatedFunction *find(const std::string &name) const;
};

/// Default cap on statements executed by full unrolling.
inline constexpr std::size_t kDefaultUnrollLimit = std::size_t{1} << 20;

ValidatedFunction checkFunction(HirFunction f, std::size_t unrollLimit = kDefaultUnrollLimit);
ValidatedProgram check(const HirProgram &program);

/// Applies port directives to an unchecked function. Directives naming no
/// parameter are reported in `warnings` and otherwise ignored.
void applyDirectives(HirFunction &f, const std::vector<PortDirective> &directives,
                     std::vector<std::string> *warnings = nullptr);

/// Values taken by the induction variable, in iteration order. Throws
/// TripCountOverflow past `limit` iterations.
std::vector<int64_t> tripSequence(const ForHeader &h, const HirType &varType,
                                  std::size_t limit = kDefaultUnrollLimit);

/// Two's-complement helpers shared by the interpreter and lowering.
uint64_t maskTo(uint64_t v, unsigned width);
int64_t signedView(uint64_t v, unsigned width);

} // namespace equivfuse::hir
