#pragma once

#include "equivfuse/backends/backends.h"
#include "equivfuse/solve/solve.h"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace equivfuse::solve {

/// One external engine invocation.
struct SolverConfig {
  std::string engine;
  std::string path;
  /// `{file}` is replaced by the problem path; without it the path is
  /// appended.
  std::vector<std::string> args;
  double timeoutSeconds = 60;
  backends::Format format = backends::Format::Smtlib;
};

/// Engine name to command template. Built-in entries: z3 (smtlib),
/// bitwuzla (btor2), kissat and cadical (dimacs).
class EngineRegistry {
 public:
  static EngineRegistry builtin();
  /// Merges entries from a JSON object `{"name": {"path": .., "args": [..],
  /// "format": ..}}`; throws SchemaError.
  void load(std::string_view json);
  void set(const SolverConfig &cfg) { engines_[cfg.engine] = cfg; }
  bool contains(const std::string &name) const { return engines_.count(name) != 0; }
  std::vector<std::string> names() const;
  /// The entry for `name` with its executable resolved: environment
  /// variable EQUIVFUSE_<NAME>_PATH, then an absolute path, then
  /// EQUIVFUSE_SOLVER_DIR, then PATH. Throws Usage for unknown engines.
  SolverConfig resolve(const std::string &name) const;
  /// True when the resolved executable exists.
  bool available(const std::string &name) const;

 private:
  std::map<std::string, SolverConfig> engines_;
};

/// A problem file on disk plus what is needed to read the solver's answer.
struct ProblemFile {
  std::string path;
  backends::SymbolMap symbols;
  /// Checks answers when `symbols` has no replay data.
  std::optional<RawProblem> raw;
};

/// Runs one solver process on `problem`, kills it at the timeout (SIGTERM,
/// then SIGKILL after a 2 s grace), parses its stdout and checks any
/// counterexample by replay (or against `problem.raw`). Throws
/// SpawnFailure when the executable cannot be started. With
/// EQUIVFUSE_LOG_DIR set, stdout and stderr are saved there.
Verdict runExternal(const ProblemFile &problem, const SolverConfig &cfg);

/// Runs all entries concurrently; the first definitive verdict wins and the
/// remaining processes are terminated. All-Unknown gives Unknown with the
/// per-engine reasons joined in `detail`.
Verdict portfolio(const std::vector<std::pair<ProblemFile, SolverConfig>> &entries);

} // namespace equivfuse::solve
