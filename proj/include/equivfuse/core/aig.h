#pragma once

#include "equivfuse/core/module.h"

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace equivfuse::core {

/// AIGER literal: variable v has literals 2v and 2v+1 (negated); 0 is
/// false and 1 is true.
using Lit = uint32_t;
inline constexpr Lit kFalse = 0;
inline constexpr Lit kTrue = 1;
inline Lit litNot(Lit l) { return l ^ 1u; }
inline Lit litOf(uint32_t var, bool negated = false) { return 2 * var + (negated ? 1 : 0); }
inline uint32_t litVar(Lit l) { return l >> 1; }
inline bool litNegated(Lit l) { return l & 1u; }

struct AndGate {
  Lit lhs = 0;
  Lit rhs0 = 0;
  Lit rhs1 = 0;
};

struct Latch {
  Lit current = 0;
  Lit next = 0;
  bool init = false;
};

/// And-inverter graph. Inputs occupy variables 1..I, latches the next L
/// variables, and AND gates the rest in increasing order.
struct Aig {
  uint32_t numVars = 0;
  std::vector<Lit> inputs;
  std::vector<Latch> latches;
  std::vector<Lit> outputs;
  std::vector<AndGate> ands;
  /// Optional symbol names, parallel to `inputs` and `outputs`.
  std::vector<std::string> inputNames;
  std::vector<std::string> outputNames;

  /// Throws InvalidModule unless the numbering and ordering rules hold.
  void validate() const;
  /// Combinational evaluation (latches read their init values).
  std::vector<bool> evaluate(const std::vector<bool> &inputValues) const;
};

/// Builds an AIG with constant propagation and structural hashing. All
/// inputs must be created before the first AND gate.
class AigBuilder {
 public:
  Lit input(const std::string &name = {});
  Lit land(Lit a, Lit b);
  Lit lor(Lit a, Lit b) { return litNot(land(litNot(a), litNot(b))); }
  Lit lxor(Lit a, Lit b);
  Lit lxnor(Lit a, Lit b) { return litNot(lxor(a, b)); }
  Lit mux(Lit sel, Lit then, Lit otherwise);
  void output(Lit l, const std::string &name = {});
  Aig finish();

 private:
  Aig aig_;
  std::unordered_map<uint64_t, Lit> strash_;
};

/// Bits of one port, least significant first.
struct PortBits {
  std::string name;
  PortDir dir = PortDir::In;
  std::vector<Lit> bits;
};

struct BlastResult {
  Aig aig;
  std::vector<PortBits> ports;  // in module port order
};

/// Lowers a combinational module to an AIG: one AIG input per input-port
/// bit (port order, LSB first) and one AIG output per output-port bit.
/// Throws HasState when `m` has registers.
BlastResult bitBlast(const CoreModule &m);

} // namespace equivfuse::core
