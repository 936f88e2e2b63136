#pragma once

#include "equivfuse/core/aig.h"
#include "equivfuse/core/module.h"

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace equivfuse::miter {

enum class MiterMode { Smtlib, Btor2, Aiger };

std::string_view modeName(MiterMode mode);
/// Accepts smtlib, btor2 and aiger; throws Usage otherwise.
MiterMode parseMode(std::string_view text);

struct PortPair {
  std::string spec;
  std::string impl;
  core::PortDir dir = core::PortDir::In;
  unsigned width = 1;
};

/// Bijection between spec and impl ports, in spec port order.
struct PortMap {
  std::vector<PortPair> pairs;
};

/// Binds ports by exact name and checks count, direction and width. Errors
/// name the offending side and are mirrored when spec and impl swap.
PortMap matchPorts(const core::CoreModule &spec, const core::CoreModule &impl);

/// Renames a port in place; throws NameMissing when `from` does not exist
/// and DuplicateDefinition when `to` is taken.
void renamePort(core::CoreModule &m, const std::string &from, const std::string &to);

/// Output frames compared for sequential pairs.
struct CompareFrames {
  enum class Kind { Last, All, List };
  Kind kind = Kind::Last;
  std::vector<unsigned> frames;  // List

  /// Parses `last`, `all` or a comma-separated frame list.
  static CompareFrames parse(std::string_view text);
};

struct MiterOptions {
  std::optional<unsigned> k;
  std::optional<unsigned> specK;  // overrides k for the spec side
  std::optional<unsigned> implK;
  CompareFrames compare;
};

/// One miter input port: base port `port` at frame `frame`. Combinational
/// miters use the base names and frame 0.
struct SharedInput {
  std::string name;
  std::string port;
  unsigned frame = 0;
  unsigned width = 1;
};

/// One compared output pair, named in the (possibly unrolled) modules.
struct ComparedOutput {
  std::string spec;
  std::string impl;
  std::string port;  // base name on the spec side
  unsigned specFrame = 0;
  unsigned implFrame = 0;
  unsigned width = 1;
};

struct MiterModule {
  /// Shared inputs in `inputs` order followed by the single output `neq`.
  core::CoreModule module;
  std::string specName;
  std::string implName;
  MiterMode mode = MiterMode::Smtlib;
  /// Frame counts per side; 1 for combinational pairs.
  unsigned specFrames = 1;
  unsigned implFrames = 1;
  bool sequential = false;
  std::vector<SharedInput> inputs;
  std::vector<ComparedOutput> compared;
  PortMap ports;  // on base names
  /// The original modules, kept for replay.
  core::CoreModule spec;
  core::CoreModule impl;
  /// Aiger mode: one input per shared input bit (inputs order, LSB first)
  /// and one output, the OR of per-bit XORs.
  std::optional<core::Aig> aig;

  unsigned frames() const { return std::max(specFrames, implFrames); }
  unsigned inputBits() const;
};

/// Builds the miter. Stateful pairs need `k` (or both per-side depths) and
/// are unrolled first; inputs are shared per frame and outputs compared per
/// `opts.compare`. Throws NeedsUnrollDepth when a depth is missing.
MiterModule buildMiter(const core::CoreModule &spec, const core::CoreModule &impl, const PortMap &pm,
                       MiterMode mode, const MiterOptions &opts = {});

/// Bit-blasts a combinational miter into a single-output AIG.
core::Aig miterAig(const core::CoreModule &miter);

} // namespace equivfuse::miter
