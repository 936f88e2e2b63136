#pragma once

#include "equivfuse/solve/solve.h"

#include <string>

namespace equivfuse::cli {

/// Verdict line plus, for NotEquivalent, the counterexample table (port,
/// frame, value in hex and decimal) and the replayed output pairs.
std::string formatVerdict(const solve::Verdict &v);

} // namespace equivfuse::cli
