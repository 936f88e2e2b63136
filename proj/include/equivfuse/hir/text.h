#pragma once

#include "equivfuse/hir/ast.h"

#include <string>
#include <string_view>

namespace equivfuse::hir {

/// S-expression form of the AST, used for `--emit hir` and for authoring
/// tests without going through C syntax:
///
///   (function f
///     (param in s32 a) (param out u8x4 y split) (local s32 t) (loopvar s32 i)
///     (body
///       (for i 0 lt 4 1 ((assign (index y i) (cast u8 a))))
///       (if (ult a 3) ((assign t 1)) ())))
///
/// A parameter without `in`/`out` gets its direction inferred by `check`.
/// Bare integers are untyped literals; `(const u8 5)` is typed. `shr` and
/// `cast` are the unresolved C forms of `>>` and `(T)e`.
std::string dumpHir(const HirFunction &f);
std::string dumpHir(const HirProgram &p);
HirProgram parseHirText(std::string_view source, std::string_view fileName = {});

/// Parses `u8`, `s32`, `u8x4`.
HirType parseHirType(std::string_view text);

} // namespace equivfuse::hir
