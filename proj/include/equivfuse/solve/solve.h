#pragma once

#include "equivfuse/backends/backends.h"
#include "equivfuse/miter/miter.h"
#include "equivfuse/solve/sat.h"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace equivfuse::solve {

enum class UnknownReason { Timeout, ParseFailure, SolverError, LimitExceeded };

std::string_view reasonName(UnknownReason r);

/// One compared output pair under a counterexample.
struct OutputDiff {
  std::string port;
  unsigned specFrame = 0;
  unsigned implFrame = 0;
  BitVec spec;
  BitVec impl;
  bool differs = false;
};

struct DivergenceReport {
  std::vector<OutputDiff> outputs;
  bool differs = false;
};

struct Verdict {
  enum class Kind { Equivalent, NotEquivalent, Unknown };
  Kind kind = Kind::Unknown;
  /// NotEquivalent only.
  std::optional<backends::Counterexample> cex;
  /// NotEquivalent with replay information.
  std::optional<DivergenceReport> report;
  UnknownReason reason = UnknownReason::SolverError;
  std::string detail;
  std::string engine;

  static Verdict equivalent(std::string engine = {});
  static Verdict unknown(UnknownReason r, std::string detail = {}, std::string engine = {});
  bool definitive() const { return kind != Kind::Unknown; }
};

/// "EQUIVALENT", "NOT EQUIVALENT" or "UNKNOWN(<reason>)".
std::string verdictLabel(const Verdict &v);
/// 0, 1 or 2.
int exitCode(const Verdict &v);

/// Simulates both designs of `m` (its `spec`/`impl` originals) on `cex` and
/// compares every output pair of the comparison plan. Inputs missing from
/// `cex` read as zero.
DivergenceReport validateCex(const miter::MiterModule &m, const backends::Counterexample &cex);
/// Same, building the comparison plan from a port map.
DivergenceReport validateCex(const core::CoreModule &spec, const core::CoreModule &impl, const miter::PortMap &pm,
                             const backends::Counterexample &cex, const miter::MiterOptions &opts = {});

/// Exhaustive enumeration of the shared inputs, lowest assignment first (the
/// first input's LSB is bit 0). Unknown{limit-exceeded} above `bitLimit`
/// input bits.
Verdict solveInternalEnum(const miter::MiterModule &m, unsigned bitLimit = 24);
/// The same over a raw problem module with one 1-bit output.
Verdict solveInternalEnum(const core::CoreModule &problem, const backends::SymbolMap &symbols,
                          unsigned bitLimit = 24);

/// Tseitin encoding plus the embedded SAT engine. The model is mapped to a
/// counterexample through `symbols` (AIG inputs in symbol order, LSB first).
/// A sat answer whose inputs do not drive the AIG output to 1 is reported
/// as Unknown{solver-error}.
Verdict solveInternalSat(const core::Aig &a, const backends::SymbolMap &symbols, const SatOptions &opts = {});
/// Bit-blasts the miter, solves and replays the counterexample.
Verdict solveInternalSat(const miter::MiterModule &m, const SatOptions &opts = {});
/// Solves a raw CNF; counterexample bits come from the variables named in
/// `symbols`.
Verdict solveInternalCnf(const backends::Cnf &cnf, const backends::SymbolMap &symbols, const SatOptions &opts = {});

/// A problem file read back without relying on its sidecar, used to solve
/// it internally and to check solver answers for files without replay data.
struct RawProblem {
  backends::Format format = backends::Format::Smtlib;
  std::optional<core::CoreModule> module;  // SMT-LIB, BTOR2
  std::optional<core::Aig> aig;            // AIGER
  std::optional<backends::Cnf> cnf;        // DIMACS
  backends::SymbolMap symbols;             // raw symbols of the file
};

/// Throws ParseFailure.
RawProblem readRawProblem(backends::Format f, std::string_view bytes);
/// Whether `cex` (named by `symbols`) satisfies the problem. DIMACS checks
/// that the clauses stay satisfiable with the input bits fixed.
bool satisfiesRaw(const RawProblem &p, const backends::SymbolMap &symbols, const backends::Counterexample &cex);
/// Solves a problem file with the embedded engine: CDCL on the bit-level
/// form, or enumeration when `opts` asks for it.
struct InternalOptions {
  enum class Engine { Sat, Dpll, Enum };
  Engine engine = Engine::Sat;
  unsigned bitLimit = 24;
  uint64_t conflictLimit = 0;
};
Verdict solveRawProblem(const RawProblem &p, const backends::SymbolMap &symbols, const InternalOptions &opts = {});

/// Attaches a replay report to a NotEquivalent verdict. A counterexample
/// that does not diverge turns the verdict into Unknown{parse-failure}.
Verdict checkWithReplay(Verdict v, const miter::MiterModule &m);

} // namespace equivfuse::solve
