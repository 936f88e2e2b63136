#include "equivfuse/backends/backends.h"
#include "equivfuse/core/simulate.h"
#include "equivfuse/support/error.h"

#include "aigref.h"
#include "golden.h"
#include "miters.h"

#include <gtest/gtest.h>

using namespace equivfuse;
using namespace equivfuse::backends;
using namespace equivfuse::testkit;
using core::Aig;
using core::AigBuilder;
using miter::MiterMode;

namespace {

Aig andAig() {
  AigBuilder b;
  core::Lit x = b.input("x"), y = b.input("y");
  b.output(b.land(x, y), "z");
  return b.finish();
}

std::vector<bool> bitsOf(uint64_t v, unsigned n) {
  std::vector<bool> out(n);
  for (unsigned i = 0; i < n; ++i)
    out[i] = (v >> i) & 1;
  return out;
}

// Values of every AIG variable under `in`, computed gate by gate.
std::vector<bool> allVars(const Aig &a, const std::vector<bool> &in) {
  std::vector<bool> v(a.numVars + 1, false);
  auto get = [&](core::Lit l) { return v[core::litVar(l)] != core::litNegated(l); };
  for (std::size_t i = 0; i < a.inputs.size(); ++i)
    v[core::litVar(a.inputs[i])] = in[i];
  for (const auto &g : a.ands)
    v[core::litVar(g.lhs)] = get(g.rhs0) && get(g.rhs1);
  return v;
}

bool satisfies(const Cnf &cnf, const std::vector<bool> &assign) {
  for (const auto &cl : cnf.clauses) {
    bool ok = false;
    for (int l : cl)
      ok = ok || (assign[static_cast<std::size_t>(std::abs(l))] == (l > 0));
    if (!ok)
      return false;
  }
  return true;
}

bool bruteSat(const Cnf &cnf) {
  for (uint64_t m = 0; m < (uint64_t{1} << cnf.numVars); ++m) {
    std::vector<bool> a(static_cast<std::size_t>(cnf.numVars) + 1, false);
    for (int v = 1; v <= cnf.numVars; ++v)
      a[static_cast<std::size_t>(v)] = (m >> (v - 1)) & 1;
    if (satisfies(cnf, a))
      return true;
  }
  return false;
}

uint64_t evalNeq(const core::CoreModule &m, uint64_t idx) {
  return core::Evaluator(m).step(enumeratedInputs(m, idx)).at(0).toU64();
}

miter::MiterModule notBuf(MiterMode mode = MiterMode::Smtlib) {
  return makeMiter(bufOrNot("spec", false), bufOrNot("impl", true), mode);
}

miter::MiterModule sort2(MiterMode mode = MiterMode::Smtlib) {
  return makeMiter(sortFixture("sort_bubble4.cpp", 2), sortFixture("sort_desc4.cpp", 2), mode);
}

} // namespace

TEST(Formats, NamesAndExtensions) {
  EXPECT_EQ(parseFormat("smtlib"), Format::Smtlib);
  EXPECT_EQ(parseFormat("btor2"), Format::Btor2);
  EXPECT_EQ(parseFormat("aag"), Format::Aiger);
  EXPECT_EQ(parseFormat("aig"), Format::AigerBinary);
  EXPECT_EQ(parseFormat("cnf"), Format::Dimacs);
  EXPECT_FALSE(parseFormat("vhdl"));
  EXPECT_EQ(formatFromPath("out/m.smt2"), Format::Smtlib);
  EXPECT_EQ(formatFromPath("m.btor"), Format::Btor2);
  EXPECT_EQ(formatFromPath("m.aiger"), Format::Aiger);
  EXPECT_FALSE(formatFromPath("m.txt"));
}

TEST(Formats, SmtSymbolSanitizes) {
  EXPECT_EQ(smtSymbol("a@0"), "a_f0");
  EXPECT_EQ(smtSymbol("x[3]"), "x_3_");
  EXPECT_EQ(smtSymbol("plain_name"), "plain_name");
}

TEST(Aiger, TwoInputAndMatchesHandWrittenFile) {
  std::string text = writeAiger(andAig());
  EXPECT_EQ(text.rfind("aag 3 2 0 1 1\n2\n4\n6\n6 2 4\n", 0), 0u) << text;
  EXPECT_NE(text.find("i0 x\n"), std::string::npos);
  EXPECT_NE(text.find("o0 z\n"), std::string::npos);
}

TEST(Aiger, BinaryAndEncoding) {
  std::string bin = writeAiger(andAig(), true);
  // Header, output literal, then deltas 6-4=2 and 4-2=2.
  EXPECT_EQ(bin.rfind("aig 3 2 0 1 1\n6\n\x02\x02", 0), 0u);
}

TEST(Aiger, IdenticalBuffersFoldToFalse) {
  auto m = makeMiter(bufOrNot("spec", false), bufOrNot("impl", false), MiterMode::Aiger);
  auto p = emitAiger(m);
  EXPECT_EQ(p.text.rfind("aag 1 1 0 1 0\n2\n0\n", 0), 0u) << p.text;
}

TEST(Aiger, RoundTripAgainstReferenceReader) {
  Gen g(11);
  for (int iter = 0; iter < 120; ++iter) {
    auto m = randomMiter(g, 8, iter % 2 ? MiterMode::Aiger : MiterMode::Smtlib);
    for (bool binary : {false, true}) {
      auto p = emitAiger(m, binary);
      RefAig ref = readRefAig(p.text);
      Aig back = readAiger(p.text);
      ASSERT_EQ(ref.numInputs, 8u);
      ASSERT_EQ(back.inputs.size(), 8u);
      for (uint64_t v = 0; v < 256; ++v) {
        bool want = evalNeq(m.module, v) != 0;
        auto in = bitsOf(v, 8);
        ASSERT_EQ(ref.eval(in).at(0), want) << "iteration " << iter << " binary " << binary;
        ASSERT_EQ(back.evaluate(in).at(0), want);
      }
      EXPECT_EQ(p.text.rfind(writeAiger(back, binary), 0), 0u);
    }
  }
}

TEST(Aiger, ReaderRejectsMalformed) {
  EXPECT_THROW(readAiger("aag 1 1 1 0 0\n2\n2 3\n"), Error);
  EXPECT_THROW(readAiger("aag x\n"), Error);
  EXPECT_THROW(readAiger("aag 3 2 0 1 1\n2\n4\n6\n6 2\n"), Error);
}

TEST(Dimacs, SingleAndHasOneModel) {
  Cnf cnf = tseitin(andAig());
  EXPECT_EQ(cnf.numVars, 3);
  ASSERT_EQ(cnf.clauses.size(), 4u);
  int models = 0;
  for (unsigned m = 0; m < 8; ++m) {
    std::vector<bool> a{false, bool(m & 1), bool(m & 2), bool(m & 4)};
    if (satisfies(cnf, a)) {
      ++models;
      EXPECT_TRUE(a[1] && a[2] && a[3]);
    }
  }
  EXPECT_EQ(models, 1);
}

TEST(Dimacs, ConstantFalseOutputIsUnsat) {
  auto m = makeMiter(bufOrNot("spec", false), bufOrNot("impl", false), MiterMode::Aiger);
  Cnf cnf = readDimacs(emitDimacs(m).text);
  EXPECT_FALSE(bruteSat(cnf));
}

TEST(Dimacs, TseitinIsEquisatisfiable) {
  Gen g(23);
  for (int iter = 0; iter < 200; ++iter) {
    auto m = randomMiter(g, 6, MiterMode::Aiger);
    const Aig &a = *m.aig;
    Cnf cnf = tseitin(a);
    bool anyOne = false;
    for (uint64_t v = 0; v < 64; ++v) {
      auto in = bitsOf(v, 6);
      auto vars = allVars(a, in);
      vars.resize(static_cast<std::size_t>(cnf.numVars) + 1, false);
      bool out = a.evaluate(in).at(0);
      anyOne = anyOne || out;
      ASSERT_EQ(satisfies(cnf, vars), out) << "iteration " << iter;
    }
    if (cnf.numVars <= 16) {
      ASSERT_EQ(bruteSat(cnf), anyOne) << "iteration " << iter;
    }
  }
}

TEST(Dimacs, ReaderChecksCounts) {
  Cnf c = readDimacs("c hi\np cnf 2 2\n1 -2 0\n2 0\n");
  EXPECT_EQ(c.numVars, 2);
  ASSERT_EQ(c.clauses.size(), 2u);
  EXPECT_EQ(c.clauses[0], (std::vector<int>{1, -2}));
  EXPECT_THROW(readDimacs("p cnf 2 3\n1 0\n"), Error);
  EXPECT_THROW(readDimacs("p cnf 1 1\n2 0\n"), Error);
}

TEST(Dimacs, RawSymbolsFollowInputComments) {
  auto p = emitDimacs(sort2());
  Cnf cnf = readDimacs(p.text);
  SymbolMap s = rawSymbols(cnf, p.text);
  ASSERT_EQ(s.inputs.size(), 1u);
  EXPECT_EQ(s.inputs[0].name, "input");
  EXPECT_EQ(s.inputs[0].width, 8u);
  EXPECT_EQ(s.inputs[0].id, "1");
}

TEST(Model, SmtSatUnsatAndFailures) {
  auto p = emitSmtlib(makeMiter(bufOrNot("s", false, 4), bufOrNot("i", true, 4)));
  auto r = parseModel(Format::Smtlib, "unsat\n", p.symbols);
  EXPECT_EQ(r.status, ModelStatus::Unsat);
  r = parseModel(Format::Smtlib, "sat\n(\n  (define-fun a () (_ BitVec 4)\n    #b0111)\n)\n", p.symbols);
  ASSERT_EQ(r.status, ModelStatus::Sat);
  EXPECT_EQ(r.cex->frames.at(0).at("a").toU64(), 7u);
  EXPECT_TRUE(r.cex->defaulted.empty());
  r = parseModel(Format::Smtlib, "sat\n((define-fun a () (_ BitVec 4) (_ bv12 4)))\n", p.symbols);
  EXPECT_EQ(r.cex->frames.at(0).at("a").toU64(), 12u);
  r = parseModel(Format::Smtlib, "sat\n()\n", p.symbols);
  ASSERT_EQ(r.status, ModelStatus::Sat);
  EXPECT_EQ(r.cex->defaulted, std::vector<std::string>{"a@0"});
  r = parseModel(Format::Smtlib, "garbage ((\n", p.symbols);
  EXPECT_EQ(r.status, ModelStatus::Unknown);
  EXPECT_EQ(r.reason.rfind("parse-failure", 0), 0u);
  r = parseModel(Format::Smtlib, "(error \"boom\")\n", p.symbols);
  EXPECT_EQ(r.reason.rfind("solver-error", 0), 0u);
  r = parseModel(Format::Smtlib, "unknown\n", p.symbols);
  EXPECT_EQ(r.status, ModelStatus::Unknown);
}

TEST(Model, Btor2Witness) {
  auto p = emitBtor2(makeMiter(bufOrNot("s", false, 4), bufOrNot("i", true, 4)));
  auto r = parseModel(Format::Btor2, "sat\nb0\n#0\n@0\n0 1010 a\n.\n", p.symbols);
  ASSERT_EQ(r.status, ModelStatus::Sat);
  EXPECT_EQ(r.cex->frames.at(0).at("a").toU64(), 10u);
  EXPECT_EQ(parseModel(Format::Btor2, "unsat\n", p.symbols).status, ModelStatus::Unsat);
  EXPECT_EQ(parseModel(Format::Btor2, "sat\nb0\n@0\n0 10x1 a\n.\n", p.symbols).status, ModelStatus::Unknown);
}

TEST(Model, DimacsAndAigerWitness) {
  auto m = makeMiter(bufOrNot("s", false, 3), bufOrNot("i", true, 3), MiterMode::Aiger);
  auto cnf = emitDimacs(m);
  auto r = parseModel(Format::Dimacs, "s SATISFIABLE\nv 1 -2 3 0\n", cnf.symbols);
  ASSERT_EQ(r.status, ModelStatus::Sat);
  EXPECT_EQ(r.cex->frames.at(0).at("a").toU64(), 5u);
  EXPECT_EQ(parseModel(Format::Dimacs, "s UNSATISFIABLE\n", cnf.symbols).status, ModelStatus::Unsat);
  EXPECT_EQ(parseModel(Format::Dimacs, "UNSAT\n", cnf.symbols).status, ModelStatus::Unsat);
  auto aag = emitAiger(m);
  r = parseModel(Format::Aiger, "1\nb0\n011\n.\n", aag.symbols);
  ASSERT_EQ(r.status, ModelStatus::Sat);
  EXPECT_EQ(r.cex->frames.at(0).at("a").toU64(), 6u);
  EXPECT_EQ(parseModel(Format::Aiger, "0\n", aag.symbols).status, ModelStatus::Unsat);
  EXPECT_EQ(parseModel(Format::Aiger, "1\nb0\n01\n.\n", aag.symbols).status, ModelStatus::Unknown);
}

TEST(Model, FrameSymbolsSplitByFrame) {
  core::ModuleBuilder b("acc");
  auto in = b.input("x", 2);
  auto r = b.reg("r", 2, BitVec(2, 0));
  b.setNext(r, b.add(r, in));
  b.output("y", r);
  auto s = b.finish();
  auto i = s;
  i.name = "acc2";
  miter::MiterOptions o;
  o.k = 3;
  auto p = emitSmtlib(makeMiter(s, i, MiterMode::Smtlib, o));
  ASSERT_EQ(p.symbols.inputs.size(), 3u);
  EXPECT_EQ(p.symbols.inputs[2].id, "x_f2");
  auto res = parseModel(Format::Smtlib,
                        "sat\n((define-fun x_f0 () (_ BitVec 2) #b01)(define-fun x_f2 () (_ BitVec 2) #b11)"
                        "(define-fun x_f1 () (_ BitVec 2) #b10))\n",
                        p.symbols);
  ASSERT_EQ(res.status, ModelStatus::Sat);
  ASSERT_EQ(res.cex->frames.size(), 3u);
  EXPECT_EQ(res.cex->frames[0].at("x").toU64(), 1u);
  EXPECT_EQ(res.cex->frames[1].at("x").toU64(), 2u);
  EXPECT_EQ(res.cex->frames[2].at("x").toU64(), 3u);
}

TEST(SymbolMapJson, RoundTripsWithReplay) {
  auto m = sort2();
  for (Format f : {Format::Smtlib, Format::Btor2, Format::Aiger, Format::AigerBinary, Format::Dimacs}) {
    auto p = emit(m, f);
    SymbolMap back = SymbolMap::fromJson(p.symbols.toJson());
    EXPECT_EQ(back.format, f);
    ASSERT_EQ(back.inputs.size(), p.symbols.inputs.size());
    for (std::size_t i = 0; i < back.inputs.size(); ++i) {
      EXPECT_EQ(back.inputs[i].id, p.symbols.inputs[i].id);
      EXPECT_EQ(back.inputs[i].width, p.symbols.inputs[i].width);
    }
    ASSERT_TRUE(back.replay);
    EXPECT_EQ(back.replay->specName, m.specName);
    EXPECT_EQ(back.replay->compared.size(), m.compared.size());
    EXPECT_EQ(back.replay->spec.nodes.size(), m.spec.nodes.size());
    EXPECT_EQ(back.toJson(), p.symbols.toJson());
  }
  EXPECT_THROW(SymbolMap::fromJson("{"), Error);
  EXPECT_THROW(SymbolMap::fromJson("{\"format\": 3}"), Error);
}

TEST(Readers, WordLevelProblemsMatchMiter) {
  Gen g(37);
  for (int iter = 0; iter < 150; ++iter) {
    auto m = randomMiter(g, 8, MiterMode::Smtlib);
    auto smt = readSmtlibProblem(emitSmtlib(m).text);
    auto btor = readBtor2Problem(emitBtor2(m).text);
    ASSERT_EQ(smt.inputPorts().size(), m.module.inputPorts().size());
    ASSERT_EQ(btor.inputPorts().size(), m.module.inputPorts().size());
    for (uint64_t v = 0; v < 256; ++v) {
      uint64_t want = evalNeq(m.module, v);
      ASSERT_EQ(evalNeq(smt, v), want) << "smt iteration " << iter;
      ASSERT_EQ(evalNeq(btor, v), want) << "btor iteration " << iter;
    }
  }
}

TEST(Readers, HandWrittenProblems) {
  auto smt = readSmtlibProblem("(set-logic QF_BV)\n(declare-const x (_ BitVec 4))\n"
                               "(assert (bvugt x #x9))\n(assert (distinct x #b1111))\n(check-sat)\n");
  for (uint64_t x = 0; x < 16; ++x)
    EXPECT_EQ(evalNeq(smt, x), (x > 9 && x != 15) ? 1u : 0u);
  auto btor = readBtor2Problem("1 sort bitvec 4\n2 input 1 x\n3 constd 1 -2\n"
                               "5 sort bitvec 1\n6 ugte 5 2 3\n7 bad 6\n");
  for (uint64_t x = 0; x < 16; ++x)
    EXPECT_EQ(evalNeq(btor, x), x >= 14 ? 1u : 0u);
  EXPECT_THROW(readSmtlibProblem("(declare-fun f ((_ BitVec 2)) (_ BitVec 2))"), Error);
  EXPECT_THROW(readBtor2Problem("1 sort array 1 1\n"), Error);
}

TEST(Emit, DeterministicAndWellFormed) {
  auto m = sort2();
  for (Format f : {Format::Smtlib, Format::Btor2, Format::Aiger, Format::AigerBinary, Format::Dimacs})
    EXPECT_EQ(emit(m, f).text, emit(sort2(), f).text);
  auto smt = emitSmtlib(m).text;
  EXPECT_NE(smt.find("(set-logic QF_BV)"), std::string::npos);
  EXPECT_NE(smt.find("(declare-const input (_ BitVec 8))"), std::string::npos);
  EXPECT_NE(smt.find("(assert (= neq #b1))"), std::string::npos);
  EXPECT_NE(smt.find("(check-sat)"), std::string::npos);
  auto btor = emitBtor2(m).text;
  EXPECT_NE(btor.find(" input "), std::string::npos);
  EXPECT_NE(btor.find(" bad "), std::string::npos);
}

TEST(Emit, Goldens) {
  for (const auto &[name, m] : goldenMiters()) {
    for (Format f : {Format::Smtlib, Format::Btor2, Format::Aiger, Format::AigerBinary, Format::Dimacs}) {
      auto p = emit(m, f);
      EXPECT_EQ(checkGolden(name + "." + std::string(formatExtension(f)), p.text), "");
      if (f == Format::Smtlib) {
        EXPECT_EQ(checkGolden(name + ".symmap", p.symbols.toJson()), "");
      }
    }
  }
}
