#include "equivfuse/core/passes.h"
#include "equivfuse/core/simulate.h"
#include "equivfuse/core/text.h"

#include "coregen.h"

#include <gtest/gtest.h>

using namespace equivfuse;
using namespace equivfuse::core;

namespace {

CoreModule toggle() {
  ModuleBuilder b("toggle");
  NodeId q = b.reg("q", 1, BitVec(1, 0));
  b.setNext(q, b.bitNot(q));
  b.output("Q", q);
  return b.finish();
}

CoreModule counter2() {
  ModuleBuilder b("counter");
  NodeId lo = b.reg("c0", 1, BitVec(1, 0));
  NodeId hi = b.reg("c1", 1, BitVec(1, 0));
  b.setNext(lo, b.bitNot(lo));
  b.setNext(hi, b.bitXor(hi, lo));
  b.output("count", b.concat(hi, lo));
  return b.finish();
}

} // namespace

TEST(Unroll, CombinationalRenamesPorts) {
  ModuleBuilder b("c");
  b.output("y", b.bitNot(b.input("a", 3)));
  CoreModule u = unrollSequential(b.finish(), 1);
  ASSERT_EQ(u.ports.size(), 2u);
  EXPECT_EQ(u.ports[0].name, "a@0");
  EXPECT_EQ(u.ports[1].name, "y@0");
  EXPECT_EQ(simulate(u, {{{"a@0", BitVec(3, 5)}}})[0].at("y@0"), BitVec(3, 2));
}

TEST(Unroll, ToggleSimulatesZeroOneZero) {
  auto out = simulate(toggle(), {{}, {}, {}});
  EXPECT_EQ(out[0].at("Q").toU64(), 0u);
  EXPECT_EQ(out[1].at("Q").toU64(), 1u);
  EXPECT_EQ(out[2].at("Q").toU64(), 0u);
}

TEST(Unroll, ToggleFoldsToConstants) {
  CoreModule u = unrollSequential(toggle(), 3);
  EXPECT_TRUE(u.isCombinational());
  const uint64_t expect[] = {0, 1, 0};
  for (unsigned t = 0; t < 3; ++t) {
    const Node &n = u.nodes[u.ports[*u.findPort(framePortName("Q", t))].node];
    ASSERT_EQ(n.op, Op::Const);
    EXPECT_EQ(n.value.toU64(), expect[t]);
  }
}

TEST(Unroll, TwoBitCounterCounts) {
  CoreModule u = unrollSequential(counter2(), 4);
  auto out = simulate(u, {{}});
  for (unsigned t = 0; t < 4; ++t)
    EXPECT_EQ(out[0].at(framePortName("count", t)).toU64(), t);
}

TEST(Unroll, HoldInputsSharesOnePortPerInput) {
  ModuleBuilder b("acc");
  NodeId r = b.reg("r", 4, BitVec(4, 0));
  NodeId in = b.input("x", 4);
  b.setNext(r, b.add(r, in));
  b.output("y", r);
  CoreModule u = unrollSequential(b.finish(), 3, true);
  ASSERT_EQ(u.inputPorts().size(), 1u);
  auto out = simulate(u, {{{"x@0", BitVec(4, 3)}}});
  EXPECT_EQ(out[0].at("y@2").toU64(), 6u);
}

TEST(UnrollProperty, MatchesCycleAccurateSimulation) {
  testkit::Gen g(61);
  for (int i = 0; i < 100; ++i) {
    testkit::ModuleShape s;
    s.inputBits = static_cast<unsigned>(g.range(0, 8));
    s.stateBits = static_cast<unsigned>(g.range(1, 8));
    s.maxWidth = 4;
    CoreModule m = testkit::randomModule(g, s);
    unsigned k = static_cast<unsigned>(g.range(1, 5));
    CoreModule u = unrollSequential(m, k);
    for (int seq = 0; seq < 100; ++seq) {
      std::vector<Frame> stim(k);
      Frame flat;
      for (unsigned t = 0; t < k; ++t)
        for (unsigned p : m.inputPorts()) {
          BitVec v = testkit::randomBits(g, m.ports[p].width);
          stim[t][m.ports[p].name] = v;
          flat[framePortName(m.ports[p].name, t)] = v;
        }
      auto ref = simulate(m, stim);
      auto got = simulate(u, {flat});
      for (unsigned t = 0; t < k; ++t)
        for (const auto &[name, v] : ref[t])
          ASSERT_EQ(got[0].at(framePortName(name, t)), v) << dumpCore(m) << " t=" << t;
    }
  }
}
