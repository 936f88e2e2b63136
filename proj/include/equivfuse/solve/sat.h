#pragma once

#include "equivfuse/backends/backends.h"

#include <cstdint>
#include <vector>

namespace equivfuse::solve {

enum class SatStatus { Sat, Unsat, Unknown };

enum class SatAlgorithm {
  Cdcl,  // watched literals, first-UIP learning, Luby restarts
  Dpll,  // chronological backtracking with unit propagation only
};

struct SatOptions {
  SatAlgorithm algorithm = SatAlgorithm::Cdcl;
  /// Conflicts (CDCL) or backtracks (DPLL) before giving up; 0 is unlimited.
  uint64_t conflictLimit = 0;
};

struct SatResult {
  SatStatus status = SatStatus::Unknown;
  /// Sat only: `model[v]` for variables 1..numVars (index 0 unused).
  std::vector<bool> model;
  uint64_t conflicts = 0;
  uint64_t decisions = 0;
};

/// Decides a CNF formula. Literals are DIMACS-style nonzero integers.
SatResult solveCnf(const backends::Cnf &cnf, const SatOptions &opts = {});

} // namespace equivfuse::solve
