#include "equivfuse/core/simulate.h"

#include "equivfuse/support/error.h"

namespace equivfuse::core {

Evaluator::Evaluator(const CoreModule &m)
    : m_(m), inPorts_(m.inputPorts()), outPorts_(m.outputPorts()), values_(m.nodes.size()) {
  reset();
}

void Evaluator::reset() {
  state_.clear();
  for (const auto &r : m_.registers)
    state_.push_back(r.init);
}

std::vector<BitVec> Evaluator::step(const std::vector<BitVec> &inputs) {
  if (inputs.size() != inPorts_.size())
    fail(ErrorKind::InvalidModule, "expected " + std::to_string(inPorts_.size()) +
                                       " input values, got " + std::to_string(inputs.size()));
  for (std::size_t k = 0; k < inPorts_.size(); ++k) {
    const Port &p = m_.ports[inPorts_[k]];
    if (inputs[k].width() != p.width)
      fail(ErrorKind::WidthMismatch, "input " + p.name + " expects " + std::to_string(p.width) +
                                         " bits, got " + std::to_string(inputs[k].width()));
    values_[p.node] = inputs[k];
  }
  BitVec args[3];
  for (NodeId i = 0; i < m_.nodes.size(); ++i) {
    const Node &n = m_.nodes[i];
    if (n.op == Op::Input)
      continue;
    if (n.op == Op::Reg) {
      values_[i] = state_[n.aux];
      continue;
    }
    for (std::size_t k = 0; k < n.args.size(); ++k)
      args[k] = values_[n.args[k]];
    values_[i] = evalNode(n, args);
  }
  std::vector<BitVec> out;
  out.reserve(outPorts_.size());
  for (unsigned p : outPorts_)
    out.push_back(values_[m_.ports[p].node]);
  for (std::size_t r = 0; r < m_.registers.size(); ++r)
    state_[r] = values_[m_.registers[r].next];
  return out;
}

std::vector<Frame> simulate(const CoreModule &m, const std::vector<Frame> &stimuli) {
  Evaluator ev(m);
  const auto inPorts = m.inputPorts();
  const auto outPorts = m.outputPorts();
  std::vector<Frame> result;
  for (std::size_t t = 0; t < stimuli.size(); ++t) {
    std::vector<BitVec> in;
    for (unsigned p : inPorts) {
      auto it = stimuli[t].find(m.ports[p].name);
      if (it == stimuli[t].end())
        fail(ErrorKind::InvalidModule,
             "frame " + std::to_string(t) + " does not assign input " + m.ports[p].name);
      in.push_back(it->second);
    }
    std::vector<BitVec> out = ev.step(in);
    Frame f;
    for (std::size_t k = 0; k < outPorts.size(); ++k)
      f[m.ports[outPorts[k]].name] = out[k];
    result.push_back(std::move(f));
  }
  return result;
}

} // namespace equivfuse::core
