// Minimal DIMACS front end over the in-process solver, usable as an external
// --sat-backend. Prints "s SATISFIABLE" with "v" lines, or "s UNSATISFIABLE".
#include "sosat/sat.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

using namespace sosat;

int main(int argc, char **argv) {
  if (argc != 2) {
    std::cerr << "usage: sosat_dimacs <file.cnf>\n";
    return 1;
  }
  std::ifstream in(argv[1]);
  if (!in) {
    std::cerr << "sosat_dimacs: cannot read " << argv[1] << "\n";
    return 1;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    const auto cnf = sat::parseDimacs(ss.str());
    sat::BuiltinBackend b;
    const auto model = b.solve(cnf, sat::Clock::time_point::max());
    if (!model) {
      std::cout << "s UNSATISFIABLE\n";
      return 20;
    }
    std::cout << "s SATISFIABLE\nv";
    for (unsigned v = 1; v <= cnf.numVars; ++v)
      std::cout << ' ' << ((*model)[v - 1] ? int(v) : -int(v));
    std::cout << " 0\n";
    return 10;
  } catch (const std::exception &e) {
    std::cerr << "sosat_dimacs: " << e.what() << "\n";
    return 1;
  }
}
