// sosat: solve second-order SAT formulas, loop properties and QBFs, or run
// the superoptimisation corpus.
#include "sosat/driver.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace sosat;

namespace {

std::atomic<bool> g_cancel{false};

extern "C" void onInterrupt(int) { g_cancel = true; }

struct CommonOptions {
  double timeout = 60;
  std::optional<std::uint64_t> maxLength;
  std::optional<unsigned> width;
  std::optional<unsigned> initialWidth;
  std::string strategies = "explicit,symbolic,gp";
  bool deterministic = false;
  std::uint64_t seed = 1;
  std::string backend = "cadical";
  bool enableShl = false;
  std::string log;
};

void addCommon(CLI::App *app, CommonOptions &o) {
  app->add_option("--timeout", o.timeout, "Seconds per run")
      ->check(CLI::PositiveNumber);
  app->add_option("--max-length", o.maxLength,
                  "Cap on program length; a run that needs longer programs "
                  "ends UNKNOWN(cap)");
  app->add_option("--width", o.width, "Verification (target) width")
      ->check(CLI::Range(1, 64));
  app->add_option("--initial-width", o.initialWidth, "First synthesis width")
      ->check(CLI::Range(1, 64));
  app->add_option("--strategies", o.strategies,
                  "Comma-separated subset of explicit,symbolic,gp");
  app->add_flag("--deterministic", o.deterministic,
                "Round-robin strategies with fixed budgets");
  app->add_option("--seed", o.seed);
  app->add_option("--sat-backend", o.backend,
                  "cadical, builtin, or the path of a DIMACS solver");
  app->add_flag("--enable-shl", o.enableShl, "Allow the shl opcode");
  app->add_option("--log", o.log, "Run log path (JSON lines)");
}

struct Configured {
  SolverConfig cfg;
  std::unique_ptr<sat::SatBackend> backend;
  std::unique_ptr<std::ofstream> log;
};

/// Throws CLI::ValidationError on bad values.
void configure(const CommonOptions &o, Configured &out) {
  auto &c = out.cfg;
  c.timeoutSeconds = o.timeout;
  c.maxLength = o.maxLength;
  c.targetWidth = o.width;
  c.initialWidth = o.initialWidth;
  c.deterministic = o.deterministic;
  c.seed = o.seed;
  c.enableShl = o.enableShl;
  c.cancel = &g_cancel;
  c.useExplicit = c.useSymbolic = c.useGp = false;
  std::stringstream ss(o.strategies);
  for (std::string s; std::getline(ss, s, ',');) {
    if (s == "explicit")
      c.useExplicit = true;
    else if (s == "symbolic")
      c.useSymbolic = true;
    else if (s == "gp")
      c.useGp = true;
    else
      throw CLI::ValidationError("--strategies", "unknown strategy '" + s + "'");
  }
  if (auto e = sat::engineFromName(o.backend)) {
    c.engine = *e;
  } else {
    out.backend = std::make_unique<sat::ExternalBackend>(o.backend);
    c.backend = out.backend.get();
  }
  if (!o.log.empty()) {
    out.log = std::make_unique<std::ofstream>(o.log);
    if (!*out.log)
      throw Error("cannot write run log " + o.log);
    c.log = out.log.get();
  }
}

std::string readFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool endsWith(const std::string &s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

SOSFormula loopFormula(const LoopSystem &loop, const std::string &property) {
  std::string p = property;
  if (p.empty())
    p = loop.assertion ? "safety" : "termination";
  if (p == "safety")
    return encodeSafety(loop, loop.assertion);
  if (p == "termination")
    return encodeTermination(loop);
  return encodeNontermination(loop);
}

/// Anything that is not a loop or a QDIMACS file is read as a formula.
SOSFormula formulaOf(const std::string &path, const std::string &property) {
  const auto text = readFile(path);
  if (endsWith(path, ".loop"))
    return loopFormula(parseLoop(text), property);
  if (endsWith(path, ".qdimacs"))
    return encodeQbf(parseQdimacs(text));
  return parseFormula(text);
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Second-order SAT solver"};
  app.require_subcommand(1);

  CommonOptions common;
  std::string file, property;
  bool dual = false;
  auto *solveCmd = app.add_subcommand("solve", "Solve one input file");
  solveCmd->add_option("file", file, ".sos, .loop or .qdimacs input")
      ->required();
  solveCmd
      ->add_option("--property", property,
                   "Loop property; defaults to safety when the loop has an "
                   "assertion, else termination")
      ->check(CLI::IsMember({"safety", "termination", "nontermination"}));
  solveCmd->add_flag("--dual", dual,
                     "For QDIMACS input, race the formula and its negation");
  addCommon(solveCmd, common);

  std::string encodeFile, encodeProperty;
  auto *encodeCmd =
      app.add_subcommand("encode", "Print the second-order formula of an input");
  encodeCmd->add_option("file", encodeFile)->required();
  encodeCmd->add_option("--property", encodeProperty)
      ->check(CLI::IsMember({"safety", "termination", "nontermination"}));

  std::string corpus = SOSAT_CORPUS_DIR, filter, record;
  bool skipHard = false;
  auto *benchCmd = app.add_subcommand("bench", "Run the benchmark corpus");
  benchCmd->add_option("--corpus", corpus, "Directory holding manifest.json");
  benchCmd->add_option("--filter", filter, "Regex over case ids");
  benchCmd->add_flag("--skip-hard", skipHard, "Skip cases marked known-hard");
  benchCmd->add_option("--record", record, "Write the JSON record here");
  addCommon(benchCmd, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e, std::cerr, std::cerr);
    return 1;
  }

  std::signal(SIGINT, onInterrupt);

  try {
    if (*encodeCmd) {
      std::cout << printFormula(formulaOf(encodeFile, encodeProperty));
      return 0;
    }

    Configured conf;
    configure(common, conf);

    if (*benchCmd) {
      const auto cases = loadCorpus(corpus);
      std::vector<BenchRow> rows;
      for (const auto *c : selectCases(cases, filter, skipHard)) {
        if (g_cancel)
          break;
        if (conf.cfg.log)
          *conf.cfg.log << "{\"event\":\"case\",\"id\":\"" << c->id << "\"}\n";
        std::cerr << c->id << "...\n";
        rows.push_back(runCase(*c, conf.cfg));
      }
      const bool withTimes = !common.deterministic;
      printBenchTable(std::cout, rows, withTimes);
      const auto j = benchJson(rows, withTimes);
      if (!record.empty()) {
        std::ofstream out(record);
        out << j << "\n";
      } else {
        std::cout << j << "\n";
      }
      return 0;
    }

    RunReport report;
    report.logPath = common.log;
    report.deterministic = common.deterministic;
    if (dual) {
      if (!endsWith(file, ".qdimacs"))
        throw Error("--dual needs a .qdimacs input");
      std::unique_ptr<std::ofstream> negLog;
      if (!common.log.empty())
        negLog = std::make_unique<std::ofstream>(common.log + ".neg");
      report.result = solveQbfDual(parseQdimacs(readFile(file)), conf.cfg,
                                   negLog.get(), &report.decidedBy);
    } else {
      report.result = solve(skolemize(formulaOf(file, property)), conf.cfg);
    }
    printReport(std::cout, report);
    std::cout << reportJson(report) << "\n";
    return exitCode(report.result.verdict);
  } catch (const CLI::Error &e) {
    std::cerr << "sosat: " << e.what() << "\n";
  } catch (const std::exception &e) {
    std::cerr << "sosat: " << e.what() << "\n";
  }
  return 1;
}
