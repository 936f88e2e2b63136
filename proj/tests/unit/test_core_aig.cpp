#include "equivfuse/core/aig.h"
#include "equivfuse/core/passes.h"
#include "equivfuse/core/simulate.h"
#include "equivfuse/core/text.h"
#include "equivfuse/support/error.h"

#include "coregen.h"

#include <gtest/gtest.h>

using namespace equivfuse;
using namespace equivfuse::core;

namespace {

CoreModule binary(Op op, unsigned w) {
  ModuleBuilder b("bin");
  b.output("y", b.op(op, {b.input("a", w), b.input("b", w)}));
  return b.finish();
}

std::vector<bool> flatten(const std::vector<BitVec> &v) {
  std::vector<bool> bits;
  for (const auto &x : v)
    for (unsigned i = 0; i < x.width(); ++i)
      bits.push_back(x.bit(i));
  return bits;
}

/// AIG evaluation against word-level simulation on one vector.
void expectSame(const CoreModule &m, const BlastResult &r, Evaluator &ev, const std::vector<BitVec> &in) {
  auto words = ev.step(in);
  auto bits = r.aig.evaluate(flatten(in));
  ASSERT_EQ(bits, flatten(words));
}

} // namespace

TEST(BitBlast, OneBitAndIsOneGate) {
  BlastResult r = bitBlast(binary(Op::And, 1));
  ASSERT_EQ(r.aig.ands.size(), 1u);
  ASSERT_EQ(r.aig.outputs.size(), 1u);
  EXPECT_EQ(r.aig.outputs[0], r.aig.ands[0].lhs);
}

TEST(BitBlast, OneBitXorIsThreeGates) {
  BlastResult r = bitBlast(binary(Op::Xor, 1));
  EXPECT_EQ(r.aig.ands.size(), 3u);
  for (int x = 0; x < 4; ++x)
    EXPECT_EQ(r.aig.evaluate({bool(x & 1), bool(x & 2)})[0], bool((x & 1) ^ ((x >> 1) & 1)));
}

TEST(BitBlast, FourBitAdderExhaustive) {
  CoreModule m = binary(Op::Add, 4);
  BlastResult r = bitBlast(m);
  Evaluator ev(m);
  for (uint64_t x = 0; x < 256; ++x)
    expectSame(m, r, ev, {BitVec(4, x & 15), BitVec(4, x >> 4)});
}

TEST(BitBlast, EveryOpExhaustiveAtFourBits) {
  for (Op op : {Op::Sub, Op::Mul, Op::And, Op::Or, Op::Shl, Op::Lshr, Op::Ashr, Op::Eq, Op::Ult,
                Op::Slt, Op::Ule, Op::Sle}) {
    SCOPED_TRACE(std::string(opName(op)));
    CoreModule m = binary(op, 4);
    BlastResult r = bitBlast(m);
    Evaluator ev(m);
    for (uint64_t x = 0; x < 256; ++x)
      expectSame(m, r, ev, {BitVec(4, x & 15), BitVec(4, x >> 4)});
  }
}

TEST(BitBlast, PortBitMapCoversEveryBit) {
  ModuleBuilder b("m");
  NodeId a = b.input("a", 3);
  b.output("y", b.zext(a, 5));
  BlastResult r = bitBlast(b.finish());
  ASSERT_EQ(r.ports.size(), 2u);
  EXPECT_EQ(r.ports[0].bits, (std::vector<Lit>{2, 4, 6}));
  EXPECT_EQ(r.ports[1].bits, (std::vector<Lit>{2, 4, 6, kFalse, kFalse}));
  EXPECT_EQ(r.aig.inputNames[1], "a[1]");
}

TEST(BitBlast, RejectsState) {
  ModuleBuilder b("s");
  NodeId q = b.reg("q", 1, BitVec(1));
  b.setNext(q, q);
  b.output("q", q);
  try {
    bitBlast(b.finish());
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::HasState);
  }
}

TEST(BitBlastProperty, MatchesSimulation) {
  testkit::Gen g(91);
  for (int i = 0; i < 200; ++i) {
    testkit::ModuleShape s;
    s.inputBits = static_cast<unsigned>(g.range(1, 24));
    s.maxWidth = 8;
    CoreModule m = testkit::randomModule(g, s);
    BlastResult r = bitBlast(m);
    ASSERT_NO_THROW(r.aig.validate());
    Evaluator ev(m);
    if (s.inputBits <= 16) {
      for (uint64_t x = 0; x < (uint64_t{1} << s.inputBits); ++x)
        expectSame(m, r, ev, testkit::enumeratedInputs(m, x));
    } else {
      for (int v = 0; v < 1000; ++v)
        expectSame(m, r, ev, testkit::randomInputs(g, m));
    }
    if (HasFatalFailure()) {
      ADD_FAILURE() << dumpCore(m);
      return;
    }
  }
}
