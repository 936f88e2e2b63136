#include "equivfuse/backends/backends.h"
#include "equivfuse/solve/sat.h"

#include <fstream>
#include <iostream>
#include <sstream>

// Reads a DIMACS CNF and answers in SAT-competition form: `s SATISFIABLE`
// with `v` lines (exit 10), `s UNSATISFIABLE` (exit 20) or `s UNKNOWN`.
int main(int argc, char **argv) {
  using namespace equivfuse;
  if (argc != 2) {
    std::cerr << "usage: equivfuse-sat FILE.cnf\n";
    return 1;
  }
  std::ifstream in(argv[1]);
  if (!in) {
    std::cerr << "cannot read " << argv[1] << "\n";
    return 1;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    backends::Cnf cnf = backends::readDimacs(ss.str());
    solve::SatResult r = solve::solveCnf(cnf);
    if (r.status == solve::SatStatus::Unsat) {
      std::cout << "s UNSATISFIABLE\n";
      return 20;
    }
    if (r.status == solve::SatStatus::Unknown) {
      std::cout << "s UNKNOWN\n";
      return 0;
    }
    std::cout << "s SATISFIABLE\n";
    std::string line = "v";
    for (int v = 1; v <= cnf.numVars; ++v) {
      std::string lit = " " + std::string(r.model[v] ? "" : "-") + std::to_string(v);
      if (line.size() + lit.size() > 78) {
        std::cout << line << "\n";
        line = "v";
      }
      line += lit;
    }
    std::cout << line << " 0\n";
    return 10;
  } catch (const std::exception &e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
}
