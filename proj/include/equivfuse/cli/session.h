#pragma once

#include "equivfuse/core/module.h"
#include "equivfuse/hir/check.h"
#include "equivfuse/solve/external.h"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace equivfuse::cli {

/// Exit codes shared by every entry point.
inline constexpr int kExitEquivalent = 0;
inline constexpr int kExitNotEquivalent = 1;
inline constexpr int kExitUnknown = 2;
inline constexpr int kExitError = 3;

/// Splits a command line into words. Single and double quotes group words;
/// a backslash escapes the next character outside single quotes. `${NAME}`
/// outside quotes expands to an environment variable (Usage error if unset).
std::vector<std::string> tokenize(std::string_view line);

/// One design slot of the session.
struct Slot {
  core::CoreModule module;
  std::string kind;  // c, graph or v
  std::vector<std::string> files;
};

/// The command workflow: set_port, read_c / read_graph / read_v,
/// equiv_miter and solver_runner, run one command at a time.
class Session {
 public:
  Session(std::ostream &out, std::ostream &err);

  /// Runs one command line and returns its exit code: 0 for success or an
  /// Equivalent verdict, 1 and 2 for NotEquivalent and Unknown verdicts, 3
  /// for usage, configuration and frontend errors. Blank lines and `#`
  /// comments return 0.
  int execute(std::string_view line);
  /// Runs one already-split command.
  int execute(const std::vector<std::string> &words);

  /// Runs a script, one command per line. An error (exit 3) stops the
  /// script; otherwise the result is the verdict of the last solver_runner
  /// (0 without one). A script without commands is a usage error.
  int runScript(std::string_view text);

  solve::EngineRegistry &registry() { return registry_; }
  const std::optional<Slot> &spec() const { return spec_; }
  const std::optional<Slot> &impl() const { return impl_; }
  /// Files written by equiv_miter, with the command that produced them.
  const std::map<std::string, std::string> &artifacts() const { return artifacts_; }

 private:
  void cmdSetPort(const std::vector<std::string> &args);
  void cmdRead(const std::string &kind, const std::vector<std::string> &args);
  void cmdEquivMiter(const std::vector<std::string> &args, const std::string &line);
  int cmdSolverRunner(const std::vector<std::string> &args);
  void cmdHelp();
  void store(bool spec, Slot slot);
  void warn(const std::string &msg);

  std::ostream &out_;
  std::ostream &err_;
  std::optional<Slot> spec_, impl_;
  std::vector<hir::PortDirective> directives_;
  std::map<std::string, std::string> artifacts_;
  solve::EngineRegistry registry_;
};

} // namespace equivfuse::cli
