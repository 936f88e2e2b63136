#pragma once

#include "equivfuse/core/module.h"

#include <string>
#include <string_view>

namespace equivfuse::core {

/// Line-oriented dump used by `--emit core`:
///
///   module dot
///     port in arg_0 8
///     port out out_0 4
///     %0 = input arg_0 : 8
///     %1 = const 4'h3
///     %2 = extract %0 [3:0] : 4
///     %3 = add %2, %1 : 4
///     %4 = reg r init 1'h0 : 1
///     next r = %5
///     output out_0 = %3
///   end
///
/// Node numbering is preserved by `parseCore`.
std::string dumpCore(const CoreModule &m);
CoreModule parseCore(std::string_view text);

} // namespace equivfuse::core
