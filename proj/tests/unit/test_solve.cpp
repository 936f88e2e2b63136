#include "equivfuse/backends/backends.h"
#include "equivfuse/solve/external.h"
#include "equivfuse/solve/sat.h"
#include "equivfuse/solve/solve.h"
#include "equivfuse/support/error.h"

#include "miters.h"
#include "tempdir.h"

#include <gtest/gtest.h>

#include <chrono>
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>

using namespace equivfuse;
using namespace equivfuse::solve;
using namespace equivfuse::testkit;
using backends::Cnf;
using backends::Format;
using miter::MiterMode;
using Kind = Verdict::Kind;

namespace fs = std::filesystem;

namespace {

bool bruteSat(const Cnf &cnf) {
  for (uint64_t m = 0; m < (uint64_t{1} << cnf.numVars); ++m) {
    bool all = true;
    for (const auto &cl : cnf.clauses) {
      bool ok = false;
      for (int l : cl)
        ok = ok || (((m >> (std::abs(l) - 1)) & 1) == (l > 0 ? 1u : 0u));
      if (!(all = ok))
        break;
    }
    if (all)
      return true;
  }
  return false;
}

bool modelSatisfies(const Cnf &cnf, const std::vector<bool> &model) {
  for (const auto &cl : cnf.clauses) {
    bool ok = false;
    for (int l : cl)
      ok = ok || model.at(static_cast<std::size_t>(std::abs(l))) == (l > 0);
    if (!ok)
      return false;
  }
  return true;
}

Cnf random3Sat(Gen &g, int vars, int clauses) {
  Cnf c;
  c.numVars = vars;
  for (int i = 0; i < clauses; ++i) {
    std::vector<int> cl;
    while (cl.size() < 3) {
      int v = static_cast<int>(g.range(1, static_cast<uint64_t>(vars)));
      if (std::find(cl.begin(), cl.end(), v) == cl.end() && std::find(cl.begin(), cl.end(), -v) == cl.end())
        cl.push_back(g.coin() ? v : -v);
    }
    c.clauses.push_back(cl);
  }
  return c;
}

// n+1 pigeons in n holes.
Cnf pigeonhole(int n) {
  Cnf c;
  auto var = [&](int p, int h) { return p * n + h + 1; };
  c.numVars = (n + 1) * n;
  for (int p = 0; p <= n; ++p) {
    std::vector<int> cl;
    for (int h = 0; h < n; ++h)
      cl.push_back(var(p, h));
    c.clauses.push_back(cl);
  }
  for (int h = 0; h < n; ++h)
    for (int p = 0; p <= n; ++p)
      for (int q = p + 1; q <= n; ++q)
        c.clauses.push_back({-var(p, h), -var(q, h)});
  return c;
}

const SatAlgorithm kAlgorithms[] = {SatAlgorithm::Cdcl, SatAlgorithm::Dpll};

miter::MiterModule notVsBuf(MiterMode mode = MiterMode::Smtlib) {
  return makeMiter(bufOrNot("spec", true), bufOrNot("impl", false), mode);
}

using testkit::TempDir;

SolverConfig fakeSolver(const TempDir &d, const std::string &name, const std::string &body, Format f,
                        double timeout = 10) {
  SolverConfig c;
  c.engine = name;
  c.path = d.write(name + ".sh", "#!/bin/sh\n" + body + "\n", true);
  c.format = f;
  c.timeoutSeconds = timeout;
  return c;
}

ProblemFile problemFor(const TempDir &d, const miter::MiterModule &m, Format f) {
  auto p = backends::emit(m, f);
  return {d.write("miter." + std::string(backends::formatExtension(f)), p.text), p.symbols, std::nullopt};
}

double secondsSince(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

} // namespace

TEST(Sat, SingleAndForcesBothInputs) {
  Cnf c{3, {{-3, 1}, {-3, 2}, {3, -1, -2}, {3}}};
  for (auto alg : kAlgorithms) {
    SatResult r = solveCnf(c, {alg, 0});
    ASSERT_EQ(r.status, SatStatus::Sat);
    EXPECT_TRUE(r.model[1] && r.model[2] && r.model[3]);
  }
}

TEST(Sat, TrivialFormulas) {
  for (auto alg : kAlgorithms) {
    EXPECT_EQ(solveCnf(Cnf{0, {}}, {alg, 0}).status, SatStatus::Sat);
    EXPECT_EQ(solveCnf(Cnf{1, {{}}}, {alg, 0}).status, SatStatus::Unsat);
    EXPECT_EQ(solveCnf(Cnf{1, {{1}, {-1}}}, {alg, 0}).status, SatStatus::Unsat);
    EXPECT_EQ(solveCnf(Cnf{2, {{1, -1}, {2}}}, {alg, 0}).status, SatStatus::Sat);
  }
}

TEST(Sat, PigeonholeIsUnsat) {
  for (auto alg : kAlgorithms)
    for (int n = 2; n <= 5; ++n)
      EXPECT_EQ(solveCnf(pigeonhole(n), {alg, 0}).status, SatStatus::Unsat) << n;
}

TEST(Sat, ConflictLimitGivesUnknown) {
  SatResult r = solveCnf(pigeonhole(7), {SatAlgorithm::Cdcl, 5});
  EXPECT_EQ(r.status, SatStatus::Unknown);
  EXPECT_EQ(r.conflicts, 5u);
}

TEST(Sat, RandomThreeSatAgreesWithBruteForce) {
  Gen g(41);
  for (int iter = 0; iter < 400; ++iter) {
    int vars = static_cast<int>(g.range(3, 14));
    Cnf c = random3Sat(g, vars, static_cast<int>(g.range(1, static_cast<uint64_t>(vars) * 6)));
    bool want = bruteSat(c);
    for (auto alg : kAlgorithms) {
      SatResult r = solveCnf(c, {alg, 0});
      ASSERT_EQ(r.status == SatStatus::Sat, want) << "iteration " << iter;
      if (want) {
        ASSERT_TRUE(modelSatisfies(c, r.model)) << "iteration " << iter;
      }
    }
  }
}

TEST(Sat, LargerRandomInstancesHaveValidModels) {
  Gen g(43);
  int sat = 0, unsat = 0;
  for (int iter = 0; iter < 40; ++iter) {
    Cnf c = random3Sat(g, 120, 510);  // near the threshold ratio
    SatResult r = solveCnf(c);
    ASSERT_NE(r.status, SatStatus::Unknown);
    if (r.status == SatStatus::Sat) {
      ++sat;
      ASSERT_TRUE(modelSatisfies(c, r.model));
    } else {
      ++unsat;
    }
  }
  EXPECT_GT(sat, 0);
  EXPECT_GT(unsat, 0);
}

TEST(Enum, NotVsBufFindsZeroFirst) {
  Verdict v = solveInternalEnum(notVsBuf());
  ASSERT_EQ(v.kind, Kind::NotEquivalent);
  EXPECT_EQ(v.cex->frames.at(0).at("a").toU64(), 0u);
  ASSERT_TRUE(v.report);
  ASSERT_EQ(v.report->outputs.size(), 1u);
  EXPECT_EQ(v.report->outputs[0].spec.toU64(), 1u);
  EXPECT_EQ(v.report->outputs[0].impl.toU64(), 0u);
  EXPECT_TRUE(v.report->outputs[0].differs);
}

TEST(Enum, BufferPairIsEquivalent) {
  auto m = makeMiter(bufOrNot("spec", false), bufOrNot("impl", false));
  EXPECT_EQ(solveInternalEnum(m).kind, Kind::Equivalent);
  EXPECT_EQ(solveInternalSat(m).kind, Kind::Equivalent);
}

TEST(Enum, AscVsDescSortN2) {
  auto m = makeMiter(sortFixture("sort_bubble4.cpp", 2), sortFixture("sort_desc4.cpp", 2));
  Verdict v = solveInternalEnum(m);
  ASSERT_EQ(v.kind, Kind::NotEquivalent);
  // Input 1 packs elements {1, 0}: ascending gives {0, 1}, descending {1, 0}.
  EXPECT_EQ(v.cex->frames.at(0).at("input").toU64(), 1u);
  EXPECT_EQ(v.report->outputs.at(0).spec.toU64(), 0x10u);
  EXPECT_EQ(v.report->outputs.at(0).impl.toU64(), 0x01u);
}

TEST(Enum, LimitExceeded) {
  auto m = makeMiter(bufOrNot("spec", false, 30), bufOrNot("impl", false, 30));
  Verdict v = solveInternalEnum(m);
  EXPECT_EQ(v.kind, Kind::Unknown);
  EXPECT_EQ(v.reason, UnknownReason::LimitExceeded);
}

TEST(Replay, EquivalentPairNeverDiffers) {
  auto s = sortFixture("sort_bubble4.cpp", 4), i = sortFixture("sort_network4.cpp", 4);
  auto pm = miter::matchPorts(s, i);
  Gen g(5);
  for (int k = 0; k < 50; ++k) {
    backends::Counterexample cex;
    cex.frames.resize(1);
    cex.frames[0]["input"] = BitVec(16, g.bits(16));
    EXPECT_FALSE(validateCex(s, i, pm, cex).differs);
  }
}

TEST(Replay, BogusModelBecomesUnknown) {
  auto m = makeMiter(sortFixture("sort_bubble4.cpp", 2), sortFixture("sort_desc4.cpp", 2));
  Verdict v;
  v.kind = Kind::NotEquivalent;
  v.cex = backends::Counterexample{};
  v.cex->frames.resize(1);
  v.cex->frames[0]["input"] = BitVec(8, 0x33);  // equal elements sort the same both ways
  Verdict out = checkWithReplay(v, m);
  EXPECT_EQ(out.kind, Kind::Unknown);
  EXPECT_EQ(out.reason, UnknownReason::ParseFailure);
}

TEST(Agreement, EnumCdclDpllOnRandomMiters) {
  Gen g(53);
  int ne = 0;
  for (int iter = 0; iter < 500; ++iter) {
    auto m = randomMiter(g, static_cast<unsigned>(g.range(1, 12)), iter % 3 ? MiterMode::Smtlib : MiterMode::Aiger);
    Verdict e = solveInternalEnum(m);
    ASSERT_NE(e.kind, Kind::Unknown) << e.detail;
    for (auto alg : kAlgorithms) {
      Verdict s = solveInternalSat(m, {alg, 0});
      ASSERT_EQ(s.kind, e.kind) << "iteration " << iter;
      if (s.kind == Kind::NotEquivalent) {
        ASSERT_TRUE(s.report && s.report->differs);
      }
    }
    ne += e.kind == Kind::NotEquivalent;
  }
  EXPECT_GT(ne, 50);
  EXPECT_LT(ne, 450);
}

TEST(Agreement, RawProblemsInEveryFormat) {
  Gen g(59);
  for (int iter = 0; iter < 120; ++iter) {
    auto m = randomMiter(g, static_cast<unsigned>(g.range(1, 10)), MiterMode::Aiger);
    Kind want = solveInternalEnum(m).kind;
    for (Format f : {Format::Smtlib, Format::Btor2, Format::Aiger, Format::AigerBinary, Format::Dimacs}) {
      auto p = backends::emit(m, f);
      RawProblem raw = readRawProblem(f, p.text);
      for (auto engine : {InternalOptions::Engine::Sat, InternalOptions::Engine::Enum}) {
        if (engine == InternalOptions::Engine::Enum && f == Format::Dimacs)
          continue;
        InternalOptions o;
        o.engine = engine;
        Verdict v = solveRawProblem(raw, p.symbols, o);
        ASSERT_EQ(v.kind, want) << "iteration " << iter << " format " << backends::formatName(f);
        if (v.kind == Kind::NotEquivalent) {
          EXPECT_TRUE(satisfiesRaw(raw, p.symbols, *v.cex));
          EXPECT_TRUE(validateCex(m, *v.cex).differs);
        }
      }
    }
  }
}

TEST(Agreement, SequentialMiters) {
  Gen g(61);
  for (int iter = 0; iter < 60; ++iter) {
    ModuleShape shape;
    shape.inputBits = static_cast<unsigned>(g.range(1, 3));
    shape.stateBits = static_cast<unsigned>(g.range(1, 4));
    shape.nodes = 10;
    shape.outputs = 1;
    auto s = randomModule(g, shape, "s");
    auto i = g.coin() ? s : mutateModule(g, s);
    i.name = "i";
    miter::MiterOptions o;
    o.k = static_cast<unsigned>(g.range(1, 3));
    auto m = makeMiter(s, i, MiterMode::Smtlib, o);
    Verdict e = solveInternalEnum(m), v = solveInternalSat(m);
    ASSERT_EQ(v.kind, e.kind) << "iteration " << iter;
    if (v.kind == Kind::NotEquivalent) {
      EXPECT_TRUE(v.report->differs);
    }
  }
}

TEST(Verdicts, LabelsAndExitCodes) {
  EXPECT_EQ(verdictLabel(Verdict::equivalent()), "EQUIVALENT");
  EXPECT_EQ(exitCode(Verdict::equivalent()), 0);
  EXPECT_EQ(verdictLabel(Verdict::unknown(UnknownReason::Timeout)), "UNKNOWN(timeout)");
  EXPECT_EQ(exitCode(Verdict::unknown(UnknownReason::LimitExceeded)), 2);
  EXPECT_EQ(exitCode(solveInternalEnum(notVsBuf())), 1);
  EXPECT_EQ(verdictLabel(solveInternalEnum(notVsBuf())), "NOT EQUIVALENT");
}

TEST(Registry, BuiltinsJsonAndOverrides) {
  TempDir d;
  auto r = EngineRegistry::builtin();
  EXPECT_TRUE(r.contains("z3"));
  EXPECT_EQ(r.resolve("kissat").format, Format::Dimacs);
  EXPECT_THROW(r.resolve("nosuch"), Error);
  r.load(R"({"mysat": {"path": "mysat-bin", "args": ["-q", "{file}"], "format": "dimacs", "timeout": 7}})");
  SolverConfig c = r.resolve("mysat");
  EXPECT_EQ(c.args, (std::vector<std::string>{"-q", "{file}"}));
  EXPECT_EQ(c.timeoutSeconds, 7);
  EXPECT_FALSE(r.available("mysat"));
  std::string bin = d.write("mysat-bin", "#!/bin/sh\necho s UNSATISFIABLE\n", true);
  ::setenv("EQUIVFUSE_SOLVER_DIR", d.path.c_str(), 1);
  EXPECT_TRUE(r.available("mysat"));
  EXPECT_EQ(r.resolve("mysat").path, bin);
  ::unsetenv("EQUIVFUSE_SOLVER_DIR");
  ::setenv("EQUIVFUSE_MYSAT_PATH", "/opt/elsewhere/mysat", 1);
  EXPECT_EQ(r.resolve("mysat").path, "/opt/elsewhere/mysat");
  ::unsetenv("EQUIVFUSE_MYSAT_PATH");
  EXPECT_THROW(r.load("[]"), Error);
  EXPECT_THROW(r.load(R"({"x": {"args": []}})"), Error);
  EXPECT_THROW(r.load(R"({"x": {"path": "x", "format": "vhdl"}})"), Error);
}

TEST(External, CannedAnswers) {
  TempDir d;
  auto m = notVsBuf();
  auto pf = problemFor(d, m, Format::Smtlib);
  Verdict v = runExternal(pf, fakeSolver(d, "unsat", "echo unsat", Format::Smtlib));
  EXPECT_EQ(v.kind, Kind::Equivalent);
  v = runExternal(pf, fakeSolver(d, "sat", "echo sat; echo '((define-fun a () (_ BitVec 1) #b1))'", Format::Smtlib));
  ASSERT_EQ(v.kind, Kind::NotEquivalent);
  EXPECT_EQ(v.cex->frames[0].at("a").toU64(), 1u);
  EXPECT_TRUE(v.report->differs);
  v = runExternal(pf, fakeSolver(d, "garbled", "echo 'sat ((('", Format::Smtlib));
  EXPECT_EQ(v.reason, UnknownReason::ParseFailure);
  v = runExternal(pf, fakeSolver(d, "crash", "echo boom >&2; exit 3", Format::Smtlib));
  EXPECT_EQ(v.reason, UnknownReason::SolverError);
  v = runExternal(pf, fakeSolver(d, "unknown", "echo unknown", Format::Smtlib));
  EXPECT_EQ(v.kind, Kind::Unknown);
  EXPECT_EQ(v.reason, UnknownReason::SolverError);
}

TEST(External, WrongModelIsRejectedByReplay) {
  TempDir d;
  auto m = makeMiter(sortFixture("sort_bubble4.cpp", 2), sortFixture("sort_desc4.cpp", 2));
  auto pf = problemFor(d, m, Format::Smtlib);
  Verdict v = runExternal(
      pf, fakeSolver(d, "liar", "echo sat; echo '((define-fun input () (_ BitVec 8) #x55))'", Format::Smtlib));
  EXPECT_EQ(v.kind, Kind::Unknown);
  EXPECT_EQ(v.reason, UnknownReason::ParseFailure);
}

TEST(External, RawProblemAnswersAreChecked) {
  TempDir d;
  auto p = backends::emit(notVsBuf(MiterMode::Aiger), Format::Aiger);
  RawProblem raw = readRawProblem(Format::Aiger, p.text);
  ProblemFile pf{d.write("raw.aag", p.text), raw.symbols, raw};
  Verdict good = runExternal(pf, fakeSolver(d, "w1", "printf '1\\nb0\\n1\\n.\\n'", Format::Aiger));
  EXPECT_EQ(good.kind, Kind::NotEquivalent);
  auto same = backends::emit(makeMiter(bufOrNot("s", false, 2), bufOrNot("i", false, 2), MiterMode::Aiger),
                             Format::Aiger);
  RawProblem raw2 = readRawProblem(Format::Aiger, same.text);
  ProblemFile pf2{d.write("raw2.aag", same.text), raw2.symbols, raw2};
  Verdict bad = runExternal(pf2, fakeSolver(d, "w2", "printf '1\\nb0\\n10\\n.\\n'", Format::Aiger));
  EXPECT_EQ(bad.reason, UnknownReason::ParseFailure);
}

TEST(External, SpawnFailure) {
  TempDir d;
  auto pf = problemFor(d, notVsBuf(), Format::Smtlib);
  SolverConfig c{"ghost", (d.path / "missing").string(), {}, 5, Format::Smtlib};
  try {
    runExternal(pf, c);
    FAIL() << "expected SpawnFailure";
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::SpawnFailure);
  }
}

TEST(External, TimeoutKillsTheSolver) {
  TempDir d;
  auto pf = problemFor(d, notVsBuf(), Format::Smtlib);
  auto t0 = std::chrono::steady_clock::now();
  Verdict v = runExternal(pf, fakeSolver(d, "slow", "sleep 30", Format::Smtlib, 1));
  EXPECT_EQ(v.reason, UnknownReason::Timeout);
  EXPECT_LT(secondsSince(t0), 4.0);
}

TEST(External, StubbornSolverIsKilledAfterGrace) {
  TempDir d;
  auto pf = problemFor(d, notVsBuf(), Format::Smtlib);
  auto t0 = std::chrono::steady_clock::now();
  Verdict v = runExternal(pf, fakeSolver(d, "stubborn", "trap '' TERM\nwhile :; do sleep 0.1; done", Format::Smtlib, 0.5));
  double took = secondsSince(t0);
  EXPECT_EQ(v.reason, UnknownReason::Timeout);
  EXPECT_GE(took, 2.4);
  EXPECT_LT(took, 5.0);
}

TEST(External, LogsAreWritten) {
  TempDir d;
  auto pf = problemFor(d, notVsBuf(), Format::Smtlib);
  fs::path logs = d.path / "logs";
  ::setenv("EQUIVFUSE_LOG_DIR", logs.c_str(), 1);
  runExternal(pf, fakeSolver(d, "chatty", "echo unsat; echo note >&2", Format::Smtlib));
  ::unsetenv("EQUIVFUSE_LOG_DIR");
  int files = 0;
  for (const auto &e : fs::directory_iterator(logs)) {
    ++files;
    EXPECT_EQ(e.path().filename().string().rfind("chatty-", 0), 0u);
  }
  EXPECT_EQ(files, 2);
}

TEST(Portfolio, FastSatWinsAndSlowIsCancelled) {
  TempDir d;
  auto m = notVsBuf();
  auto pf = problemFor(d, m, Format::Smtlib);
  std::string marker = (d.path / "slow-finished").string();
  auto slow = fakeSolver(d, "slow", "sleep 20; touch " + marker + "; echo unsat", Format::Smtlib, 60);
  auto fast = fakeSolver(d, "fast", "echo sat; echo '((define-fun a () (_ BitVec 1) #b0))'", Format::Smtlib);
  auto t0 = std::chrono::steady_clock::now();
  Verdict v = portfolio({{pf, slow}, {pf, fast}});
  EXPECT_LT(secondsSince(t0), 5.0);
  ASSERT_EQ(v.kind, Kind::NotEquivalent);
  EXPECT_EQ(v.engine, "fast");
  EXPECT_FALSE(fs::exists(marker));
}

TEST(Portfolio, AllTimeouts) {
  TempDir d;
  auto pf = problemFor(d, notVsBuf(), Format::Smtlib);
  Verdict v = portfolio({{pf, fakeSolver(d, "a", "sleep 30", Format::Smtlib, 0.5)},
                         {pf, fakeSolver(d, "b", "sleep 30", Format::Smtlib, 0.5)}});
  EXPECT_EQ(v.reason, UnknownReason::Timeout);
  EXPECT_NE(v.detail.find("a: timeout"), std::string::npos);
  EXPECT_NE(v.detail.find("b: timeout"), std::string::npos);
}

TEST(Portfolio, UnknownsDoNotWin) {
  TempDir d;
  auto pf = problemFor(d, notVsBuf(), Format::Smtlib);
  Verdict v = portfolio({{pf, fakeSolver(d, "junk", "echo junk", Format::Smtlib)},
                         {pf, fakeSolver(d, "later", "sleep 0.3; echo sat; echo '((define-fun a () (_ BitVec 1) #b1))'",
                                         Format::Smtlib)}});
  EXPECT_EQ(v.kind, Kind::NotEquivalent);
  EXPECT_EQ(v.engine, "later");
}

TEST(ExternalZ3, AgreesWithInternalWhenInstalled) {
  auto reg = EngineRegistry::builtin();
  if (!reg.available("z3"))
    GTEST_SKIP() << "z3 not installed";
  TempDir d;
  SolverConfig z3 = reg.resolve("z3");
  Gen g(67);
  for (int iter = 0; iter < 20; ++iter) {
    auto m = randomMiter(g, 8, MiterMode::Smtlib);
    Verdict v = runExternal(problemFor(d, m, Format::Smtlib), z3);
    ASSERT_EQ(v.kind, solveInternalEnum(m).kind) << v.detail;
  }
  EXPECT_EQ(runExternal(problemFor(d, notVsBuf(), Format::Smtlib), z3).kind, Kind::NotEquivalent);
}
