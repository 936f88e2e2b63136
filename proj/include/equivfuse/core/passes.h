#pragma once

#include "equivfuse/core/module.h"
#include "equivfuse/hir/check.h"

#include <string>

namespace equivfuse::core {

/// HIR to Core: full loop unrolling, array flattening into per-element
/// values, if/else to muxes, constant folding, then op mapping.
///
/// Ports follow the flattening convention: one packed port per array
/// parameter with element 0 at the least significant bits, or one port per
/// element (`name_i`) for split parameters. Dynamic indices select element
/// `index mod N`. Throws TripCountOverflow past `unrollLimit` executed
/// statements.
CoreModule lowerHir(const hir::ValidatedFunction &f,
                    std::size_t unrollLimit = hir::kDefaultUnrollLimit);

/// Name of port `name` in frame `t` of an unrolled module.
std::string framePortName(const std::string &name, unsigned t);

/// Expands `k` frames into a combinational module with ports `p@t`.
/// Registers start from their init constants. With `holdInputs`, each input
/// is a single port `p@0` shared by all frames.
CoreModule unrollSequential(const CoreModule &m, unsigned k, bool holdInputs = false);

/// Evaluates constant operations, merges structurally identical nodes and
/// prunes nodes that reach neither an output nor a register.
CoreModule constFold(const CoreModule &m);

} // namespace equivfuse::core
