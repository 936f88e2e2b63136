#include "equivfuse/core/passes.h"

namespace equivfuse::core {

namespace {

/// Copies `m` through a simplifying builder, keeping only live nodes.
CoreModule rebuild(const CoreModule &m, bool simplify) {
  std::vector<char> live(m.nodes.size(), 0);
  std::vector<NodeId> stack;
  for (const auto &p : m.ports)
    stack.push_back(p.node);
  for (const auto &r : m.registers) {
    stack.push_back(r.node);
    stack.push_back(r.next);
  }
  while (!stack.empty()) {
    NodeId n = stack.back();
    stack.pop_back();
    if (live[n])
      continue;
    live[n] = 1;
    for (NodeId a : m.nodes[n].args)
      stack.push_back(a);
  }

  ModuleBuilder b(m.name, simplify);
  std::vector<NodeId> map(m.nodes.size(), 0);
  // Ports keep their order: inputs are created in port order, outputs last.
  for (const auto &p : m.ports)
    if (p.dir == PortDir::In)
      map[p.node] = b.input(p.name, p.width);
  for (const auto &r : m.registers)
    map[r.node] = b.reg(r.name, r.width, r.init);
  for (NodeId i = 0; i < m.nodes.size(); ++i) {
    const Node &n = m.nodes[i];
    if (!live[i] || n.op == Op::Input || n.op == Op::Reg)
      continue;
    if (n.op == Op::Const) {
      map[i] = b.constant(n.value);
      continue;
    }
    Args args;
    for (NodeId a : n.args)
      args.push_back(map[a]);
    map[i] = b.op(n.op, args, n.aux, n.width);
  }
  for (const auto &r : m.registers)
    b.setNext(map[r.node], map[r.next]);
  for (const auto &p : m.ports)
    if (p.dir == PortDir::Out)
      b.output(p.name, map[p.node]);
  CoreModule out = b.finish();
  // Restore the original interleaving of input and output ports.
  std::vector<Port> ordered;
  for (const auto &p : m.ports) {
    ordered.push_back(out.ports[*out.findPort(p.name)]);
    if (p.dir == PortDir::In)
      out.nodes[ordered.back().node].aux = static_cast<unsigned>(ordered.size() - 1);
  }
  out.ports = std::move(ordered);
  return out;
}

} // namespace

CoreModule constFold(const CoreModule &m) {
  CoreModule once = rebuild(m, true);
  // The second pass prunes nodes orphaned by rewrites in the first.
  return rebuild(once, true);
}

} // namespace equivfuse::core
