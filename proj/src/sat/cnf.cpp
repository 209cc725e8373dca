#include "sosat/sat.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include <sys/wait.h>

namespace sosat::sat {

std::string toDimacs(const CnfFormula &cnf) {
  std::ostringstream os;
  os << "p cnf " << cnf.numVars << ' ' << cnf.clauses.size() << '\n';
  for (const auto &c : cnf.clauses) {
    for (int l : c)
      os << l << ' ';
    os << "0\n";
  }
  return os.str();
}

CnfFormula parseDimacs(std::string_view text) {
  CnfFormula cnf;
  std::istringstream is{std::string(text)};
  std::string line;
  bool header = false;
  std::vector<int> cur;
  unsigned lineNo = 0;
  while (std::getline(is, line)) {
    ++lineNo;
    if (line.empty() || line[0] == 'c' || line[0] == '%')
      continue;
    std::istringstream ls(line);
    if (line[0] == 'p') {
      std::string p, fmt;
      std::size_t nc = 0;
      if (!(ls >> p >> fmt >> cnf.numVars >> nc) || fmt != "cnf")
        throw SyntaxError("bad DIMACS header", lineNo, 1);
      header = true;
      continue;
    }
    if (!header)
      throw SyntaxError("clause before DIMACS header", lineNo, 1);
    int lit = 0;
    while (ls >> lit) {
      if (lit == 0) {
        cnf.clauses.push_back(cur);
        cur.clear();
      } else {
        if (static_cast<unsigned>(std::abs(lit)) > cnf.numVars)
          throw SyntaxError("literal exceeds declared variable count", lineNo, 1);
        cur.push_back(lit);
      }
    }
  }
  if (!header)
    throw SyntaxError("missing DIMACS header", 1, 1);
  if (!cur.empty())
    cnf.clauses.push_back(cur);
  return cnf;
}

std::optional<std::vector<bool>> parseModel(std::string_view text,
                                            unsigned numVars) {
  std::istringstream is{std::string(text)};
  std::string line;
  std::optional<bool> sat;
  std::vector<bool> model(numVars, false);
  while (std::getline(is, line)) {
    if (line.rfind("s ", 0) == 0) {
      if (line.find("UNSATISFIABLE") != std::string::npos)
        sat = false;
      else if (line.find("SATISFIABLE") != std::string::npos)
        sat = true;
    } else if (line.rfind("v ", 0) == 0 || line == "v") {
      std::istringstream ls(line.substr(1));
      int lit = 0;
      while (ls >> lit)
        if (lit != 0 && static_cast<unsigned>(std::abs(lit)) <= numVars)
          model[static_cast<std::size_t>(std::abs(lit)) - 1] = lit > 0;
    }
  }
  if (!sat)
    throw BackendUnavailable("solver output has no status line");
  if (!*sat)
    return std::nullopt;
  return model;
}

std::optional<std::vector<bool>>
BuiltinBackend::solve(const CnfFormula &cnf, Clock::time_point deadline) {
  Solver s;
  for (unsigned v = 0; v < cnf.numVars; ++v)
    s.newVar();
  std::vector<Lit> buf;
  for (const auto &c : cnf.clauses) {
    buf.clear();
    for (int l : c)
      buf.push_back(Lit::make(std::abs(l) - 1, l < 0));
    if (!s.addClause(buf))
      return std::nullopt;
  }
  Limits lim;
  lim.deadline = deadline;
  const Result r = s.solve({}, lim);
  if (r == Result::Unknown)
    throw BackendTimeout("builtin solver hit the deadline");
  if (r == Result::Unsat)
    return std::nullopt;
  std::vector<bool> model(cnf.numVars);
  for (unsigned v = 0; v < cnf.numVars; ++v)
    model[v] = s.modelValue(static_cast<Var>(v));
  return model;
}

std::optional<std::vector<bool>>
ExternalBackend::solve(const CnfFormula &cnf, Clock::time_point deadline) {
  namespace fs = std::filesystem;
  if (!fs::exists(path_))
    throw BackendUnavailable("SAT backend not found: " + path_);
  const fs::path dir = fs::temp_directory_path();
  const std::string stem =
      "sosat-" + std::to_string(::getpid()) + "-" +
      std::to_string(reinterpret_cast<std::uintptr_t>(&cnf));
  const fs::path in = dir / (stem + ".cnf");
  const fs::path out = dir / (stem + ".out");
  {
    std::ofstream f(in);
    f << toDimacs(cnf);
  }
  std::string cmd = "'" + path_ + "' '" + in.string() + "' > '" + out.string() +
                    "' 2>/dev/null";
  if (deadline != Clock::time_point::max()) {
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(
                          deadline - Clock::now())
                          .count();
    cmd = "timeout " + std::to_string(std::max<long long>(1, secs)) + " " + cmd;
  }
  const int status = std::system(cmd.c_str());
  std::ifstream f(out);
  std::stringstream buf;
  buf << f.rdbuf();
  std::error_code ec;
  fs::remove(in, ec);
  fs::remove(out, ec);
  if (WIFEXITED(status) && WEXITSTATUS(status) == 124)
    throw BackendTimeout("external SAT backend timed out");
  if (WIFEXITED(status) && WEXITSTATUS(status) == 127)
    throw BackendUnavailable("cannot run SAT backend: " + path_);
  return parseModel(buf.str(), cnf.numVars);
}

} // namespace sosat::sat
