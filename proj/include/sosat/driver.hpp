//===- driver.hpp - Run reports, dual QBF solving and the corpus bench ---===//
#pragma once

#include "sosat/cegis.hpp"
#include "sosat/encodings.hpp"

namespace sosat {

struct RunReport {
  SolverResult result;
  /// Empty when no run log was requested.
  std::string logPath;
  /// Times are left out of the table in deterministic mode.
  bool deterministic = false;
  /// Set by dual solving: which side decided, "phi" or "negation".
  std::string decidedBy;
};

/// Verdict to process exit code: 10 SAT, 20 UNSAT, 30 UNKNOWN.
int exitCode(Verdict v);

std::string reportJson(const RunReport &r);
void printReport(std::ostream &os, const RunReport &r);

/// Solves q and its negation concurrently. The result is stated for q; a SAT
/// verdict carries the Skolem functions of q, an UNSAT verdict those of the
/// negation. `negLog` receives the negation's run log.
SolverResult solveQbfDual(const QbfFormula &q, const SolverConfig &cfg,
                          std::ostream *negLog, std::string *decidedBy = nullptr);

struct BenchRow {
  std::string id;
  CaseStatus status = CaseStatus::Solved;
  Verdict verdict = Verdict::Unknown;
  UnknownReason reason = UnknownReason::None;
  std::optional<std::size_t> length;
  std::optional<unsigned> referenceLength;
  std::uint64_t iterations = 0;
  double seconds = 0;
  std::map<std::string, Program> witnesses;
  SolverStats stats;
};

/// Cases whose id matches `filter` (regex_search; empty matches all), in
/// manifest order.
std::vector<const BenchmarkCase *>
selectCases(const std::vector<BenchmarkCase> &all, const std::string &filter,
            bool skipKnownHard);

BenchRow runCase(const BenchmarkCase &c, const SolverConfig &cfg);

struct BenchSummary {
  std::size_t cases = 0, solved = 0;
  double avgLength = 0, avgIterations = 0, avgSeconds = 0, totalSeconds = 0;
};

BenchSummary summarize(const std::vector<BenchRow> &rows);
void printBenchTable(std::ostream &os, const std::vector<BenchRow> &rows,
                     bool withTimes);
std::string benchJson(const std::vector<BenchRow> &rows, bool withTimes);

} // namespace sosat
