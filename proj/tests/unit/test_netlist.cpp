#include "equivfuse/core/simulate.h"
#include "equivfuse/netlist/netlist.h"
#include "equivfuse/support/error.h"

#include "fixtures.h"
#include "gen.h"

#include <gtest/gtest.h>

#include <functional>

using namespace equivfuse;
using namespace equivfuse::netlist;
using testkit::Gen;

namespace {

std::vector<NetlistModule> parse(const std::string &text, std::vector<std::string> *warnings = nullptr) {
  return parseStructuralVerilog({{"t.v", text}}, CellLibrary::builtin(), warnings);
}

core::CoreModule build(const std::string &text, const std::string &top, std::vector<std::string> *warnings = nullptr) {
  auto lib = CellLibrary::builtin();
  auto mods = parseStructuralVerilog({{"t.v", text}}, lib, warnings);
  return elaborate(mods, top, lib, warnings);
}

ErrorKind kindOf(const std::function<void()> &f) {
  try {
    f();
  } catch (const Error &e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error";
  return ErrorKind::Usage;
}

uint64_t run1(const core::CoreModule &m, const core::Frame &in, const std::string &out) {
  return core::simulate(m, {in}).at(0).at(out).toU64();
}

} // namespace

TEST(NetlistLibrary, FunctionsParseBothSpellings) {
  auto f = CellFunction::parse("(A*B)'");
  EXPECT_EQ(f.kind, CellFunction::Kind::Not);
  EXPECT_EQ(f.args.at(0).kind, CellFunction::Kind::And);
  auto g = CellFunction::parse("~(A | !B) ^ 1");
  EXPECT_EQ(g.kind, CellFunction::Kind::Xor);
  EXPECT_EQ(kindOf([] { CellFunction::parse("A +"); }), ErrorKind::SchemaError);
}

TEST(NetlistLibrary, BuiltinCells) {
  auto lib = CellLibrary::builtin();
  for (const char *n : {"BUF", "NOT", "NAND", "NOR", "DFF", "DFFSR"})
    EXPECT_NE(lib.find(n), nullptr) << n;
  EXPECT_TRUE(lib.find("DFFSR")->isRegister);
  EXPECT_EQ(lib.find("NAND")->inputs, (std::vector<std::string>{"A", "B"}));
}

TEST(NetlistLibrary, JsonCells) {
  auto lib = CellLibrary::builtin();
  lib.load(R"({"cells":[{"name":"XOR2","inputs":["A","B"],"output":"Y","function":"A^B"}]})");
  auto m = elaborate(parseStructuralVerilog({{"t.v", "module t(input a, input b, output y); XOR2 g(.A(a), .B(b), .Y(y)); endmodule"}}, lib),
                     "t", lib);
  for (uint64_t a = 0; a < 2; ++a)
    for (uint64_t b = 0; b < 2; ++b)
      EXPECT_EQ(run1(m, {{"a", BitVec(1, a)}, {"b", BitVec(1, b)}}, "y"), a ^ b);
  EXPECT_EQ(kindOf([&] { lib.load(R"({"cells":[{"name":"X"}]})"); }), ErrorKind::SchemaError);
}

TEST(NetlistParse, AnsiAssign) {
  auto mods = parse("module id(input a, output y); assign y = a; endmodule");
  ASSERT_EQ(mods.size(), 1u);
  EXPECT_EQ(mods[0].name, "id");
  EXPECT_EQ(mods[0].assigns.size(), 1u);
  EXPECT_EQ(mods[0].ports.size(), 2u);
  EXPECT_EQ(run1(build("module id(input a, output y); assign y = a; endmodule", "id"), {{"a", BitVec(1, 1)}}, "y"), 1u);
}

TEST(NetlistParse, SynthesizedShape) {
  const char *text = R"(/* Generated by a synthesis tool */

(* top =  1  *)
(* src = "dot.v:1.1-20.10" *)
module dot2_comb(arg_0, arg_1, out_0);
  wire _0000_;
  (* src = "dot.v:8.5-8.12" *)
  wire [31:0] sum_reg;
  wire [31:0] k;
  input [15:0] arg_0;
  wire [15:0] arg_0;
  input [15:0] arg_1;
  wire [15:0] arg_1;
  output [7:0] out_0;
  wire [7:0] out_0;
  NOT _0852_ (
    .A(arg_0[8]),
    .Y(_0000_)
  );
  NAND _0853_ (.A(_0000_), .B(arg_1[0]), .Y(out_0[0]));
  assign out_0[7:1] = 7'b0000000;
  assign k = 32'd2;
  assign sum_reg[7:0] = out_0;
endmodule
)";
  std::vector<std::string> warnings;
  auto mods = parse(text);
  ASSERT_EQ(mods.size(), 1u);
  EXPECT_EQ(mods[0].instances.size(), 2u);
  EXPECT_EQ(mods[0].ports[0].net.width(), 16u);
  auto m = build(text, "dot2_comb", &warnings);
  EXPECT_EQ(m.ports.size(), 3u);
  EXPECT_EQ(m.ports[2].width, 8u);
  // out_0[0] = NAND(NOT(arg_0[8]), arg_1[0])
  EXPECT_EQ(run1(m, {{"arg_0", BitVec(16, 0)}, {"arg_1", BitVec(16, 1)}}, "out_0"), 0u);
  EXPECT_EQ(run1(m, {{"arg_0", BitVec(16, 0x100)}, {"arg_1", BitVec(16, 1)}}, "out_0"), 1u);
  bool sawK = false, sawSum = false;
  for (const auto &w : warnings) {
    sawK |= w.find("wire k drives nothing") != std::string::npos;
    sawSum |= w.find("wire sum_reg drives nothing") != std::string::npos;
  }
  EXPECT_TRUE(sawK);
  EXPECT_TRUE(sawSum);
}

TEST(NetlistParse, Constants) {
  auto m = build("module c(output [7:0] a, output [7:0] b, output [7:0] c, output [3:0] d);"
                 " assign a = 8'hA5; assign b = 8'o17; assign c = 200; assign d = {2{2'b10}}; endmodule",
                 "c");
  auto out = core::simulate(m, {{}}).at(0);
  EXPECT_EQ(out.at("a").toU64(), 0xA5u);
  EXPECT_EQ(out.at("b").toU64(), 15u);
  EXPECT_EQ(out.at("c").toU64(), 200u);
  EXPECT_EQ(out.at("d").toU64(), 0xAu);
}

TEST(NetlistParse, ConcatAndReversedRange) {
  auto m = build("module r(input [0:3] a, output [3:0] y, output [3:0] z); assign y = a; assign z = {a[3], a[2:0]}; endmodule",
                 "r");
  // a[0] is the MSB of a declared [0:3].
  auto out = core::simulate(m, {{{"a", BitVec(4, 0b1000)}}}).at(0);
  EXPECT_EQ(out.at("y").toU64(), 0b1000u);
  EXPECT_EQ(out.at("z").toU64(), 0b0001u);
}

TEST(NetlistParse, Errors) {
  EXPECT_EQ(kindOf([] { parse("module m(input a, output y); always @(*) y = a; endmodule"); }),
            ErrorKind::UnsupportedConstruct);
  try {
    parse("module m(input a, output y);\n  always @(*) y = a; endmodule");
  } catch (const Error &e) {
    EXPECT_NE(e.detail().find("always"), std::string::npos);
    EXPECT_NE(e.detail().find("t.v:2:3"), std::string::npos) << e.detail();
  }
  EXPECT_EQ(kindOf([] { parse("module m #(parameter N = 2)(input a); endmodule"); }), ErrorKind::UnsupportedConstruct);
  EXPECT_EQ(kindOf([] { parse("module m(input [N-1:0] a); endmodule"); }), ErrorKind::UnsupportedConstruct);
  EXPECT_EQ(kindOf([] { parse("module m(input a, output y); NOT g(a, y); endmodule"); }), ErrorKind::UnsupportedConstruct);
  EXPECT_EQ(kindOf([] { parse("module m(input a, output y); assign y = ~a; endmodule"); }), ErrorKind::UnsupportedConstruct);
  EXPECT_EQ(kindOf([] { parse("module m(input a, output y) assign y = a; endmodule"); }), ErrorKind::SyntaxError);
  EXPECT_EQ(kindOf([] { parse("module m(input a); "); }), ErrorKind::SyntaxError);
  EXPECT_EQ(kindOf([] { parse("module m(a); input a; input a; endmodule"); }), ErrorKind::DuplicateDefinition);
  EXPECT_EQ(kindOf([] { parse("module m(a); endmodule"); }), ErrorKind::SyntaxError);
  EXPECT_EQ(kindOf([] { parse("module m(); endmodule module m(); endmodule"); }), ErrorKind::DuplicateDefinition);
  EXPECT_EQ(kindOf([] { parse("module m(output y); assign y = 1'bx; endmodule"); }), ErrorKind::UnsupportedConstruct);
}

TEST(NetlistElaborate, NotNotIsIdentity) {
  auto m = build("module m(input a, output y); wire t; NOT g1(.A(a), .Y(t)); NOT g2(.A(t), .Y(y)); endmodule", "m");
  for (uint64_t a = 0; a < 2; ++a)
    EXPECT_EQ(run1(m, {{"a", BitVec(1, a)}}, "y"), a);
  // Double negation folds away entirely.
  EXPECT_EQ(m.ports[1].node, m.ports[0].node);
}

TEST(NetlistElaborate, ToggleFlop) {
  auto m = build("module t(input clk, output q); wire d; NOT n(.A(q), .Y(d)); DFF r(.C(clk), .D(d), .Q(q)); endmodule",
                 "t");
  ASSERT_EQ(m.registers.size(), 1u);
  EXPECT_EQ(m.registers[0].name, "r");
  std::vector<core::Frame> in(3, core::Frame{{"clk", BitVec(1, 0)}});
  auto out = core::simulate(m, in);
  EXPECT_EQ(out[0].at("q").toU64(), 0u);
  EXPECT_EQ(out[1].at("q").toU64(), 1u);
  EXPECT_EQ(out[2].at("q").toU64(), 0u);
}

TEST(NetlistElaborate, SetResetPriority) {
  auto m = build("module t(input c, input d, input s, input r, output q); DFFSR f(.C(c), .D(d), .S(s), .R(r), .Q(q)); endmodule",
                 "t");
  auto frame = [](int d, int s, int r) {
    return core::Frame{{"c", BitVec(1, 0)}, {"d", BitVec(1, d)}, {"s", BitVec(1, s)}, {"r", BitVec(1, r)}};
  };
  auto out = core::simulate(m, {frame(0, 1, 1), frame(1, 0, 1), frame(1, 0, 0), frame(0, 0, 0)});
  EXPECT_EQ(out[1].at("q").toU64(), 1u);  // S wins over R
  EXPECT_EQ(out[2].at("q").toU64(), 0u);  // R clears
  EXPECT_EQ(out[3].at("q").toU64(), 1u);  // D loads
}

TEST(NetlistElaborate, RegisterCountMatchesFlops) {
  std::string text = "module s(input c, input d, output q); wire [4:0] w; assign w[0] = d;";
  for (int i = 0; i < 4; ++i)
    text += " DFF f" + std::to_string(i) + "(.C(c), .D(w[" + std::to_string(i) + "]), .Q(w[" + std::to_string(i + 1) + "]));";
  text += " assign q = w[4]; endmodule";
  auto m = build(text, "s");
  EXPECT_EQ(m.registers.size(), 4u);
  std::vector<core::Frame> in;
  for (int t = 0; t < 6; ++t)
    in.push_back({{"c", BitVec(1, 0)}, {"d", BitVec(1, t == 0)}});
  auto out = core::simulate(m, in);
  for (int t = 0; t < 6; ++t)
    EXPECT_EQ(out[t].at("q").toU64(), t == 4 ? 1u : 0u) << t;
}

TEST(NetlistElaborate, Hierarchy) {
  const char *text = R"(
module inv2(input [1:0] a, output [1:0] y);
  NOT g0(.A(a[0]), .Y(y[0]));
  NOT g1(.A(a[1]), .Y(y[1]));
endmodule
module top(input [1:0] x, output [1:0] z);
  wire [1:0] m;
  inv2 u0(.a(x), .y(m));
  inv2 u1(.a(m), .y(z));
endmodule
)";
  auto m = build(text, "top");
  for (uint64_t x = 0; x < 4; ++x)
    EXPECT_EQ(run1(m, {{"x", BitVec(2, x)}}, "z"), x);
}

TEST(NetlistElaborate, Errors) {
  EXPECT_EQ(kindOf([] { build("module m(input a, output y); wire t; NAND g1(.A(a), .B(y), .Y(t)); NAND g2(.A(a), .B(t), .Y(y)); endmodule", "m"); }),
            ErrorKind::CombinationalLoop);
  EXPECT_EQ(kindOf([] { build("module m(input a, output y); NOT g1(.A(a), .Y(y)); BUF g2(.A(a), .Y(y)); endmodule", "m"); }),
            ErrorKind::MultipleDrivers);
  EXPECT_EQ(kindOf([] { build("module m(input a, output y); AND2 g(.A(a), .B(a), .Y(y)); endmodule", "m"); }),
            ErrorKind::UnknownCell);
  EXPECT_EQ(kindOf([] { build("module m(input a, output y); NAND g(.A(a), .Y(y)); endmodule", "m"); }),
            ErrorKind::UnconnectedPin);
  EXPECT_EQ(kindOf([] { build("module m(input a, output y); NAND g(.A(a), .B(), .Y(y)); endmodule", "m"); }),
            ErrorKind::UnconnectedPin);
  EXPECT_EQ(kindOf([] { build("module m(input [1:0] a, output y); NOT g(.A(a), .Y(y)); endmodule", "m"); }),
            ErrorKind::WidthMismatch);
  EXPECT_EQ(kindOf([] { build("module m(input [1:0] a, output y); assign y = a; endmodule", "m"); }),
            ErrorKind::WidthMismatch);
  EXPECT_EQ(kindOf([] { build("module m(input a, output y); assign y = a; endmodule", "top"); }), ErrorKind::TopNotFound);
  EXPECT_EQ(kindOf([] { build("module m(input a, output y); wire t; assign y = t; endmodule", "m"); }),
            ErrorKind::UndrivenNet);
  EXPECT_EQ(kindOf([] { build("module m(input a, output y); assign y = q; endmodule", "m"); }), ErrorKind::UseBeforeDecl);
  EXPECT_EQ(kindOf([] { build("module m(input [1:0] a, output y); assign y = a[2]; endmodule", "m"); }),
            ErrorKind::StaticOutOfBounds);
  EXPECT_EQ(kindOf([] { build("module m(input a, output y); NOT g(.A(a), .Y(y), .Z(a)); endmodule", "m"); }),
            ErrorKind::UnknownCell);
  EXPECT_EQ(kindOf([] { build("module m(input a, output y); assign a = y; NOT g(.A(a), .Y(y)); endmodule", "m"); }),
            ErrorKind::MultipleDrivers);
}

TEST(NetlistElaborate, LoopTraceNamesNets) {
  try {
    build("module m(input a, output y); wire t; NAND g1(.A(a), .B(y), .Y(t)); NAND g2(.A(a), .B(t), .Y(y)); endmodule", "m");
    FAIL();
  } catch (const Error &e) {
    EXPECT_NE(e.detail().find("y -> t -> y"), std::string::npos) << e.detail();
  }
}

TEST(NetlistElaborate, LoopThroughFlopIsFine) {
  auto m = build("module m(input c, output q); wire d; NAND g(.A(q), .B(q), .Y(d)); DFF r(.C(c), .D(d), .Q(q)); endmodule", "m");
  EXPECT_EQ(m.registers.size(), 1u);
}

TEST(NetlistElaborate, CellModelsAreSkippedWithWarning) {
  std::vector<std::string> warnings;
  auto lib = CellLibrary::builtin();
  std::vector<VerilogSource> srcs = {
      {"cmos_cells.v", testkit::readFixture("netlist/cmos_cells.v")},
      {"t.v", "module t(input a, output y); wire w; NOT g(.A(a), .Y(w)); NOT h(.A(w), .Y(y)); endmodule"}};
  auto mods = parseStructuralVerilog(srcs, lib, &warnings);
  ASSERT_EQ(mods.size(), 1u);
  EXPECT_EQ(warnings.size(), 6u);
  EXPECT_NE(warnings[0].find("BUF"), std::string::npos);
  auto m = elaborate(mods, "t", lib);
  EXPECT_EQ(run1(m, {{"a", BitVec(1, 1)}}, "y"), 1u);
}

// Random acyclic gate netlists against a direct gate-level evaluator.
TEST(NetlistProperty, RandomGateNetlistsMatchGateEvaluation) {
  Gen g(0x5eed0123);
  enum G { Buf, Not, Nand, Nor };
  const char *names[] = {"BUF", "NOT", "NAND", "NOR"};
  for (int iter = 0; iter < 150; ++iter) {
    unsigned nIn = static_cast<unsigned>(g.range(1, 8));
    unsigned nCells = static_cast<unsigned>(g.range(1, 40));
    struct Gate { G kind; unsigned a, b; };
    std::vector<Gate> gates;
    // Signals: 0..nIn-1 are input bits, nIn+i is gate i.
    for (unsigned i = 0; i < nCells; ++i) {
      unsigned avail = nIn + i;
      gates.push_back({static_cast<G>(g.range(0, 3)), static_cast<unsigned>(g.range(0, avail - 1)),
                       static_cast<unsigned>(g.range(0, avail - 1))});
    }
    unsigned nOut = static_cast<unsigned>(g.range(1, 4));
    std::vector<unsigned> outs;
    for (unsigned o = 0; o < nOut; ++o)
      outs.push_back(static_cast<unsigned>(g.range(0, nIn + nCells - 1)));

    auto sig = [&](unsigned s) {
      return s < nIn ? "x[" + std::to_string(s) + "]" : "n" + std::to_string(s - nIn);
    };
    std::string text = "module r(x, y);\n  input [" + std::to_string(nIn - 1) + ":0] x;\n  output [" +
                       std::to_string(nOut - 1) + ":0] y;\n";
    for (unsigned i = 0; i < nCells; ++i)
      text += "  wire n" + std::to_string(i) + ";\n";
    // Emit cells in shuffled order; elaboration must not depend on it.
    std::vector<unsigned> order(nCells);
    for (unsigned i = 0; i < nCells; ++i)
      order[i] = i;
    for (unsigned i = nCells; i > 1; --i)
      std::swap(order[i - 1], order[g.range(0, i - 1)]);
    for (unsigned i : order) {
      const Gate &gt = gates[i];
      text += "  " + std::string(names[gt.kind]) + " c" + std::to_string(i) + " (.A(" + sig(gt.a) + ")";
      if (gt.kind == Nand || gt.kind == Nor)
        text += ", .B(" + sig(gt.b) + ")";
      text += ", .Y(n" + std::to_string(i) + "));\n";
    }
    for (unsigned o = 0; o < nOut; ++o)
      text += "  assign y[" + std::to_string(o) + "] = " + sig(outs[o]) + ";\n";
    text += "endmodule\n";

    auto m = build(text, "r");
    core::Evaluator ev(m);
    for (int v = 0; v < 100; ++v) {
      uint64_t x = g.bits(nIn);
      std::vector<bool> val(nIn + nCells);
      for (unsigned i = 0; i < nIn; ++i)
        val[i] = (x >> i) & 1;
      for (unsigned i = 0; i < nCells; ++i) {
        bool a = val[gates[i].a], b = val[gates[i].b];
        val[nIn + i] = gates[i].kind == Buf ? a : gates[i].kind == Not ? !a : gates[i].kind == Nand ? !(a && b) : !(a || b);
      }
      uint64_t expect = 0;
      for (unsigned o = 0; o < nOut; ++o)
        expect |= uint64_t{val[outs[o]]} << o;
      auto got = ev.step({BitVec(nIn, x)});
      ASSERT_EQ(got.at(0).toU64(), expect) << "iter " << iter << "\n" << text;
    }
  }
}
