#pragma once

#include "equivfuse/core/module.h"

#include <map>
#include <string>
#include <vector>

namespace equivfuse::core {

/// Port values of one frame, keyed by port name.
using Frame = std::map<std::string, BitVec>;

/// Cycle-accurate evaluation. Frame 0 starts from the register init values;
/// every frame must assign all input ports. Returns the output ports of each
/// frame.
std::vector<Frame> simulate(const CoreModule &m, const std::vector<Frame> &stimuli);

/// Repeated evaluation without per-call allocation of the node table.
class Evaluator {
 public:
  explicit Evaluator(const CoreModule &m);

  /// Restores register init values.
  void reset();
  /// Evaluates one frame with inputs in input-port order, then advances the
  /// registers. Returns outputs in output-port order.
  std::vector<BitVec> step(const std::vector<BitVec> &inputs);
  /// Node values of the most recent step.
  const BitVec &value(NodeId n) const { return values_[n]; }

 private:
  const CoreModule &m_;
  std::vector<unsigned> inPorts_, outPorts_;
  std::vector<BitVec> values_;
  std::vector<BitVec> state_;
};

} // namespace equivfuse::core
