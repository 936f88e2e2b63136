#pragma once

// Small design pairs shared by the miter, backend and solver tests.

#include "equivfuse/core/module.h"
#include "equivfuse/core/passes.h"
#include "equivfuse/hir/check.h"
#include "equivfuse/hir/parser.h"
#include "equivfuse/miter/miter.h"

#include "coregen.h"
#include "fixtures.h"

#include <string>
#include <utility>
#include <vector>

namespace equivfuse::testkit {

/// `y = a` or `y = ~a`.
inline core::CoreModule bufOrNot(const std::string &name, bool invert, unsigned width = 1) {
  core::ModuleBuilder b(name);
  core::NodeId a = b.input("a", width);
  b.output("y", invert ? b.bitNot(a) : a);
  return b.finish();
}

/// A Sort fixture with `#define N 4` replaced by `n`.
inline core::CoreModule sortFixture(const std::string &file, unsigned n) {
  std::string text = readFixture("c/" + file);
  auto pos = text.find("#define N 4");
  text.replace(pos, 11, "#define N " + std::to_string(n));
  auto prog = hir::parseMiniC(text, file);
  return core::lowerHir(hir::checkFunction(*prog.find("Sort")));
}

inline miter::MiterModule makeMiter(const core::CoreModule &s, const core::CoreModule &i,
                                    miter::MiterMode mode = miter::MiterMode::Smtlib,
                                    const miter::MiterOptions &o = {}) {
  return miter::buildMiter(s, i, miter::matchPorts(s, i), mode, o);
}

/// The design pairs whose emissions are kept as golden files, by file stem.
inline std::vector<std::pair<std::string, miter::MiterModule>> goldenMiters() {
  auto sort2 = [](miter::MiterMode mode) {
    return makeMiter(sortFixture("sort_bubble4.cpp", 2), sortFixture("sort_desc4.cpp", 2), mode);
  };
  return {{"not_buf", makeMiter(bufOrNot("spec", false), bufOrNot("impl", true))},
          {"sort2_asc_desc", sort2(miter::MiterMode::Smtlib)},
          {"sort2_aiger", sort2(miter::MiterMode::Aiger)}};
}

/// Mutates one binary node that feeds an output or register into another op
/// of the same shape.
inline core::CoreModule mutateModule(Gen &g, const core::CoreModule &m) {
  using core::Op;
  core::CoreModule out = m;
  std::vector<bool> live(out.nodes.size(), false);
  std::vector<core::NodeId> stack;
  for (const auto &p : out.ports)
    if (p.dir == core::PortDir::Out)
      stack.push_back(p.node);
  for (const auto &r : out.registers)
    stack.push_back(r.next);
  while (!stack.empty()) {
    core::NodeId n = stack.back();
    stack.pop_back();
    if (live[n])
      continue;
    live[n] = true;
    for (core::NodeId a : out.nodes[n].args)
      stack.push_back(a);
  }
  std::vector<core::NodeId> candidates;
  for (core::NodeId i = 0; i < out.nodes.size(); ++i) {
    Op op = out.nodes[i].op;
    if (live[i] && (op == Op::Add || op == Op::Sub || op == Op::And || op == Op::Or || op == Op::Xor))
      candidates.push_back(i);
  }
  if (candidates.empty())
    return out;
  static const Op kOps[] = {Op::Add, Op::Sub, Op::And, Op::Or, Op::Xor};
  auto &node = out.nodes[g.pick(candidates)];
  Op next;
  do
    next = kOps[g.range(0, 4)];
  while (next == node.op);
  node.op = next;
  return out;
}

/// A random spec and either an equivalent copy or a mutant of it.
inline miter::MiterModule randomMiter(Gen &g, unsigned inputBits, miter::MiterMode mode) {
  ModuleShape shape;
  shape.inputBits = inputBits;
  shape.nodes = static_cast<unsigned>(g.range(4, 20));
  shape.outputs = static_cast<unsigned>(g.range(1, 3));
  auto s = randomModule(g, shape, "s");
  auto i = g.coin() ? core::constFold(s) : mutateModule(g, s);
  i.name = "i";
  return makeMiter(s, i, mode);
}

} // namespace equivfuse::testkit
