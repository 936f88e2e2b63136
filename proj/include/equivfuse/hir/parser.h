#pragma once

#include "equivfuse/hir/ast.h"

#include <string_view>

namespace equivfuse::hir {

/// Parses the synthesizable mini-C subset.
///
/// Accepted: `#define NAME <integer expr>`, `#include`/`#pragma` (ignored),
/// `extern "C"`, integer types from `char` to `long long`, `<cstdint>`
/// aliases and `_BitInt(N)`, fixed-size array parameters (including
/// `const T (&a)[N]`), scalar references, `for` loops with constant bounds,
/// `if`/`else`, assignments and compound assignments, and a trailing
/// `return`. Anything else raises `UnsupportedConstruct`.
///
/// The result is untyped; run `check` before interpreting or lowering.
HirProgram parseMiniC(std::string_view source, std::string_view fileName = {});

} // namespace equivfuse::hir
