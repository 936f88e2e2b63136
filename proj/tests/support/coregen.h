#pragma once

// Random Core modules for property tests.

#include "equivfuse/core/module.h"
#include "equivfuse/core/simulate.h"

#include "gen.h"

#include <string>
#include <vector>

namespace equivfuse::testkit {

struct ModuleShape {
  unsigned inputBits = 12;   // total across input ports
  unsigned maxWidth = 6;
  unsigned nodes = 24;
  unsigned stateBits = 0;    // total across registers
  unsigned outputs = 2;
  bool simplify = false;
};

inline BitVec randomBits(Gen &g, unsigned width) {
  BitVec v(width);
  for (unsigned i = 0; i < width; ++i)
    v.setBit(i, g.coin());
  return v;
}

inline core::CoreModule randomModule(Gen &g, const ModuleShape &s, const std::string &name = "rnd") {
  using namespace core;
  ModuleBuilder b(name, s.simplify);
  std::vector<NodeId> pool;
  unsigned left = s.inputBits;
  for (unsigned i = 0; left > 0; ++i) {
    unsigned w = static_cast<unsigned>(g.range(1, std::min(left, s.maxWidth)));
    pool.push_back(b.input("in" + std::to_string(i), w));
    left -= w;
  }
  std::vector<NodeId> regs;
  left = s.stateBits;
  for (unsigned i = 0; left > 0; ++i) {
    unsigned w = static_cast<unsigned>(g.range(1, std::min(left, s.maxWidth)));
    regs.push_back(b.reg("r" + std::to_string(i), w, randomBits(g, w)));
    pool.push_back(regs.back());
    left -= w;
  }
  if (pool.empty())
    pool.push_back(b.constant(randomBits(g, static_cast<unsigned>(g.range(1, s.maxWidth)))));
  auto any = [&] { return pool[g.range(0, pool.size() - 1)]; };
  auto fit = [&](NodeId n, unsigned w) { return b.resize(n, w, g.coin()); };
  static const Op kBinary[] = {Op::Add, Op::Sub, Op::Mul, Op::And, Op::Or, Op::Xor, Op::Shl,
                               Op::Lshr, Op::Ashr, Op::Eq, Op::Ult, Op::Slt, Op::Ule, Op::Sle};
  for (unsigned k = 0; k < s.nodes; ++k) {
    NodeId a = any();
    unsigned w = b.width(a);
    NodeId n;
    switch (g.range(0, 7)) {
    case 0: n = b.bitNot(a); break;
    case 1: n = b.mux(fit(any(), 1), a, fit(any(), w)); break;
    case 2:
      n = b.width(a) + b.width(any()) <= s.maxWidth * 2 ? b.concat(a, any()) : b.bitNot(a);
      break;
    case 3: {
      unsigned lo = static_cast<unsigned>(g.range(0, w - 1));
      n = b.extract(a, static_cast<unsigned>(g.range(lo, w - 1)), lo);
      break;
    }
    case 4:
      n = b.constant(randomBits(g, static_cast<unsigned>(g.range(1, s.maxWidth))));
      break;
    default: {
      Op op = kBinary[g.range(0, std::size(kBinary) - 1)];
      NodeId c = fit(any(), w);
      n = b.op(op, {a, c});
    }
    }
    if (b.width(n) > 2 * s.maxWidth)
      n = b.extract(n, s.maxWidth - 1, 0);
    pool.push_back(n);
  }
  for (NodeId r : regs)
    b.setNext(r, fit(any(), b.width(r)));
  for (unsigned o = 0; o < s.outputs; ++o)
    b.output("out" + std::to_string(o), any());
  return b.finish();
}

/// Random values for every input port, in input-port order.
inline std::vector<BitVec> randomInputs(Gen &g, const core::CoreModule &m) {
  std::vector<BitVec> v;
  for (unsigned p : m.inputPorts())
    v.push_back(randomBits(g, m.ports[p].width));
  return v;
}

/// The `index`-th assignment of all input bits, LSB-first across ports in
/// port order.
inline std::vector<BitVec> enumeratedInputs(const core::CoreModule &m, uint64_t index) {
  std::vector<BitVec> v;
  unsigned shift = 0;
  for (unsigned p : m.inputPorts()) {
    BitVec x(m.ports[p].width);
    for (unsigned i = 0; i < x.width(); ++i, ++shift)
      x.setBit(i, shift < 64 && ((index >> shift) & 1));
    v.push_back(x);
  }
  return v;
}

} // namespace equivfuse::testkit
