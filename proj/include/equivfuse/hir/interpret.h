#pragma once

#include "equivfuse/hir/check.h"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace equivfuse::hir {

/// A parameter value: one entry for a scalar, `length` entries for an
/// array. Each entry holds the raw bits at the element width.
using HirValue = std::vector<uint64_t>;
using HirValues = std::map<std::string, HirValue>;

/// Reference semantics for a checked function. `inputs` is keyed by
/// parameter name and must cover every in-parameter; the result holds every
/// out-parameter. Out-parameters and locals start at zero.
///
/// Throws DynamicOutOfBounds when a computed index leaves its array, and
/// TypeMismatch when an input is missing or does not fit its width.
HirValues interpret(const ValidatedFunction &f, const HirValues &inputs);

} // namespace equivfuse::hir
