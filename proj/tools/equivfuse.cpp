#include "equivfuse/cli/session.h"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include <unistd.h>

namespace {

using namespace equivfuse::cli;

const std::set<std::string> kCommands = {"set_port",  "read_c",        "read_graph", "read_v", "read_fir",
                                         "read_firrtl", "equiv_miter", "solver_runner", "help"};

int interactive(Session &s) {
  int rc = kExitEquivalent;
  std::string line;
  while (true) {
    std::cout << "equivfuse> " << std::flush;
    if (!std::getline(std::cin, line))
      break;
    if (line == "exit" || line == "quit")
      break;
    rc = s.execute(line);
  }
  std::cout << "\n";
  return rc;
}

} // namespace

int main(int argc, char **argv) {
  Session session(std::cout, std::cerr);

  // `equivfuse <command> args...` runs one command.
  if (argc > 1 && kCommands.count(argv[1])) {
    std::vector<std::string> words(argv + 1, argv + argc);
    return session.execute(words);
  }

  CLI::App app{"Equivalence checking across C, tensor graph and gate-level netlist designs.\n"
               "Run a command script, -e commands, or a single command: equivfuse read_c -spec ..."};
  std::string scriptPath;
  std::vector<std::string> commands;
  std::vector<std::string> registries;
  app.add_option("script,--script", scriptPath, "Command script, one command per line ('-' reads stdin)");
  app.add_option("-e,--exec", commands, "Command to run; repeatable, run in order");
  app.add_option("--registry", registries, "Engine registry JSON merged before running");
  app.set_version_flag("--version", "equivfuse 1.0");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitError;
  }

  try {
    for (const auto &r : registries) {
      std::ifstream in(r);
      if (!in)
        throw std::runtime_error("cannot read registry " + r);
      std::stringstream ss;
      ss << in.rdbuf();
      session.registry().load(ss.str());
    }
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }

  if (!commands.empty() && !scriptPath.empty()) {
    std::cerr << "error: give a script or -e commands, not both\n";
    return kExitError;
  }
  if (!commands.empty()) {
    std::string text;
    for (const auto &c : commands)
      text += c + "\n";
    return session.runScript(text);
  }
  if (scriptPath.empty() && isatty(STDIN_FILENO))
    return interactive(session);

  std::stringstream ss;
  if (scriptPath.empty() || scriptPath == "-") {
    ss << std::cin.rdbuf();
  } else {
    std::ifstream in(scriptPath);
    if (!in) {
      std::cerr << "error: Io: cannot read " << scriptPath << "\n";
      return kExitError;
    }
    ss << in.rdbuf();
  }
  return session.runScript(ss.str());
}
