#include "equivfuse/core/passes.h"

#include "equivfuse/support/error.h"

namespace equivfuse::core {

std::string framePortName(const std::string &name, unsigned t) {
  return name + "@" + std::to_string(t);
}

CoreModule unrollSequential(const CoreModule &m, unsigned k, bool holdInputs) {
  if (k == 0)
    fail(ErrorKind::Usage, "unroll depth must be at least 1");
  ModuleBuilder b(m.name);
  const auto inPorts = m.inputPorts();
  std::vector<std::vector<NodeId>> frameInputs(k);
  for (unsigned t = 0; t < k; ++t)
    for (unsigned p : inPorts)
      frameInputs[t].push_back(holdInputs && t > 0
                                   ? frameInputs[0][frameInputs[t].size()]
                                   : b.input(framePortName(m.ports[p].name, t), m.ports[p].width));

  std::vector<NodeId> state;
  for (const auto &r : m.registers)
    state.push_back(b.constant(r.init));
  std::vector<std::pair<std::string, NodeId>> outputs;
  std::vector<NodeId> map(m.nodes.size());
  for (unsigned t = 0; t < k; ++t) {
    for (NodeId i = 0; i < m.nodes.size(); ++i) {
      const Node &n = m.nodes[i];
      switch (n.op) {
      case Op::Input: {
        std::size_t slot = 0;
        while (inPorts[slot] != n.aux)
          ++slot;
        map[i] = frameInputs[t][slot];
        break;
      }
      case Op::Reg: map[i] = state[n.aux]; break;
      case Op::Const: map[i] = b.constant(n.value); break;
      default: {
        Args args;
        for (NodeId a : n.args)
          args.push_back(map[a]);
        map[i] = b.op(n.op, args, n.aux, n.width);
      }
      }
    }
    for (const auto &p : m.ports)
      if (p.dir == PortDir::Out)
        outputs.emplace_back(framePortName(p.name, t), map[p.node]);
    for (std::size_t r = 0; r < m.registers.size(); ++r)
      state[r] = map[m.registers[r].next];
  }
  for (const auto &[name, node] : outputs)
    b.output(name, node);
  return constFold(b.finish());
}

} // namespace equivfuse::core
