#include "sosat/driver.hpp"

#include <json.hpp>

#include <chrono>
#include <iomanip>
#include <regex>
#include <sstream>
#include <thread>

namespace sosat {

using nlohmann::json;

int exitCode(Verdict v) {
  switch (v) {
  case Verdict::Sat:
    return 10;
  case Verdict::Unsat:
    return 20;
  case Verdict::Unknown:
    break;
  }
  return 30;
}

namespace {

std::string verdictText(Verdict v, UnknownReason r) {
  std::string s(verdictName(v));
  if (v == Verdict::Unknown)
    s += "(" + std::string(reasonName(r)) + ")";
  return s;
}

std::string winsText(const std::map<std::string, std::uint64_t> &m) {
  std::string s;
  for (const auto &[k, n] : m) {
    if (!s.empty())
      s += ", ";
    s += k + " " + std::to_string(n);
  }
  return s.empty() ? "-" : s;
}

std::string seconds(double s) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << s;
  return os.str();
}

json statsJson(const SolverStats &st, bool withTimes) {
  json j = {{"iterations", st.iterations},
            {"synth_calls", st.synthCalls},
            {"synth_wins", st.synthWins},
            {"verif_wins", st.verifWins},
            {"final", {{"l", st.finalL}, {"w", st.finalW}, {"c", st.finalC}}},
            {"counterexamples", st.counterexamples},
            {"minimal_solution_length", st.minimalSolutionLength}};
  if (withTimes)
    j["time"] = {{"synth", st.synthSeconds},
                 {"verif", st.verifSeconds},
                 {"generalize", st.generalizeSeconds}};
  return j;
}

} // namespace

std::string reportJson(const RunReport &r) {
  const auto &res = r.result;
  json j = {{"verdict", verdictName(res.verdict)}};
  if (res.verdict == Verdict::Unknown)
    j["reason"] = reasonName(res.reason);
  json w = json::object();
  for (const auto &[name, p] : res.witnesses)
    w[name] = prettyPrint(p);
  j["witnesses"] = w;
  j["stats"] = statsJson(res.stats, !r.deterministic);
  if (!r.logPath.empty())
    j["log"] = r.logPath;
  if (!r.decidedBy.empty())
    j["decided_by"] = r.decidedBy;
  return j.dump();
}

void printReport(std::ostream &os, const RunReport &r) {
  const auto &res = r.result;
  const auto &st = res.stats;
  os << verdictText(res.verdict, res.reason) << "\n";
  for (const auto &[name, p] : res.witnesses)
    os << name << ":\n" << prettyPrint(p);
  auto row = [&](const std::string &k, const std::string &v) {
    os << "  " << std::left << std::setw(22) << k << v << "\n";
  };
  os << "\n";
  if (!r.decidedBy.empty())
    row("decided by", r.decidedBy);
  row("iterations", std::to_string(st.iterations));
  row("synth calls", std::to_string(st.synthCalls));
  row("synth wins", winsText(st.synthWins));
  row("verif wins", winsText(st.verifWins));
  row("final (l, w, c)", "(" + std::to_string(st.finalL) + ", " +
                             std::to_string(st.finalW) + ", " +
                             std::to_string(st.finalC) + ")");
  row("minimal length", res.verdict == Verdict::Sat
                            ? std::to_string(st.minimalSolutionLength)
                            : "-");
  if (r.deterministic) {
    row("time synth/verif/gen", "-");
  } else {
    const double total = st.synthSeconds + st.verifSeconds + st.generalizeSeconds;
    auto pct = [&](double s) {
      return total > 0 ? " (" + std::to_string(int(100 * s / total + 0.5)) + "%)"
                       : std::string();
    };
    row("time synth", seconds(st.synthSeconds) + "s" + pct(st.synthSeconds));
    row("time verif", seconds(st.verifSeconds) + "s" + pct(st.verifSeconds));
    row("time generalize",
        seconds(st.generalizeSeconds) + "s" + pct(st.generalizeSeconds));
  }
  if (!r.logPath.empty())
    row("run log", r.logPath);
}

SolverResult solveQbfDual(const QbfFormula &q, const SolverConfig &cfg,
                          std::ostream *negLog, std::string *decidedBy) {
  const auto pos = skolemize(encodeQbf(q));
  const auto neg = skolemize(encodeQbf(negateQbf(q)));
  std::atomic<bool> stop{false};
  std::atomic<int> first{-1};
  SolverResult results[2];

  auto side = [&](int k) {
    SolverConfig c = cfg;
    c.cancel = &stop;
    if (k == 1)
      c.log = negLog;
    results[k] = solve(k == 0 ? pos : neg, c);
    if (results[k].verdict != Verdict::Unknown) {
      int expected = -1;
      first.compare_exchange_strong(expected, k);
      stop = true;
    }
  };
  std::atomic<bool> done{false};
  std::thread watcher([&] {
    while (!done) {
      if (cfg.cancel && cfg.cancel->load())
        stop = true;
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
  });
  std::thread t0(side, 0), t1(side, 1);
  t0.join();
  t1.join();
  done = true;
  watcher.join();

  const int k = first.load();
  if (k < 0) {
    SolverResult r = results[0];
    // Report the external cause rather than the internal stop.
    if (cfg.cancel && cfg.cancel->load())
      r.reason = UnknownReason::Cancelled;
    else if (results[1].reason == UnknownReason::Timeout)
      r.reason = UnknownReason::Timeout;
    return r;
  }
  if (decidedBy)
    *decidedBy = k == 0 ? "phi" : "negation";
  SolverResult r = results[k];
  if (k == 1)
    r.verdict = r.verdict == Verdict::Sat ? Verdict::Unsat : Verdict::Sat;
  return r;
}

std::vector<const BenchmarkCase *>
selectCases(const std::vector<BenchmarkCase> &all, const std::string &filter,
            bool skipKnownHard) {
  const std::regex re(filter);
  std::vector<const BenchmarkCase *> out;
  for (const auto &c : all) {
    if (skipKnownHard && c.status == CaseStatus::KnownHard)
      continue;
    if (!filter.empty() && !std::regex_search(c.id, re))
      continue;
    out.push_back(&c);
  }
  return out;
}

BenchRow runCase(const BenchmarkCase &c, const SolverConfig &cfg) {
  BenchRow row;
  row.id = c.id;
  row.status = c.status;
  row.referenceLength = c.referenceLength;
  if (!c.formula) {
    row.reason = UnknownReason::Unsupported;
    return row;
  }
  SolverConfig sc = cfg;
  sc.enableShl = sc.enableShl || c.enableShl;
  const auto t0 = std::chrono::steady_clock::now();
  const auto res = solve(skolemize(*c.formula), sc);
  row.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  row.verdict = res.verdict;
  row.reason = res.reason;
  row.iterations = res.stats.iterations;
  row.witnesses = res.witnesses;
  row.stats = res.stats;
  if (res.verdict == Verdict::Sat)
    row.length = res.stats.minimalSolutionLength;
  return row;
}

BenchSummary summarize(const std::vector<BenchRow> &rows) {
  BenchSummary s;
  s.cases = rows.size();
  double len = 0, it = 0, secs = 0;
  for (const auto &r : rows) {
    s.totalSeconds += r.seconds;
    if (r.verdict != Verdict::Sat)
      continue;
    ++s.solved;
    len += double(r.length.value_or(0));
    it += double(r.iterations);
    secs += r.seconds;
  }
  if (s.solved) {
    s.avgLength = len / double(s.solved);
    s.avgIterations = it / double(s.solved);
    s.avgSeconds = secs / double(s.solved);
  }
  return s;
}

void printBenchTable(std::ostream &os, const std::vector<BenchRow> &rows,
                     bool withTimes) {
  auto fixed = [](double v, int prec) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(prec) << v;
    return s.str();
  };
  os << std::left << std::setw(6) << "case" << std::setw(18) << "verdict"
     << std::right << std::setw(7) << "length" << std::setw(6) << "ref"
     << std::setw(7) << "iters" << std::setw(10) << "time(s)" << "\n";
  for (const auto &r : rows) {
    os << std::left << std::setw(6) << r.id << std::setw(18)
       << verdictText(r.verdict, r.reason) << std::right << std::setw(7)
       << (r.length ? std::to_string(*r.length) : "-") << std::setw(6)
       << (r.referenceLength ? std::to_string(*r.referenceLength) : "N/A")
       << std::setw(7) << r.iterations << std::setw(10)
       << (withTimes ? fixed(r.seconds, 2) : "-") << "\n";
  }
  const auto s = summarize(rows);
  os << "\n"
     << std::left << std::setw(12) << "benchmarks" << std::setw(8) << "solved"
     << std::setw(11) << "avg size" << std::setw(11) << "avg iters"
     << std::setw(12) << "avg time(s)" << "total time(s)\n"
     << std::setw(12) << s.cases << std::setw(8) << s.solved << std::setw(11)
     << fixed(s.avgLength, 1) << std::setw(11) << fixed(s.avgIterations, 1)
     << std::setw(12) << (withTimes ? fixed(s.avgSeconds, 2) : "-")
     << (withTimes ? fixed(s.totalSeconds, 2) : "-") << "\n";
}

std::string benchJson(const std::vector<BenchRow> &rows, bool withTimes) {
  json cases = json::array();
  for (const auto &r : rows) {
    json j = {{"id", r.id},
              {"verdict", verdictName(r.verdict)},
              {"iterations", r.iterations}};
    if (r.verdict == Verdict::Unknown)
      j["reason"] = reasonName(r.reason);
    if (r.length)
      j["length"] = *r.length;
    if (r.referenceLength)
      j["reference_length"] = *r.referenceLength;
    if (withTimes)
      j["seconds"] = r.seconds;
    json w = json::object();
    for (const auto &[name, p] : r.witnesses)
      w[name] = prettyPrint(p);
    j["witnesses"] = w;
    cases.push_back(std::move(j));
  }
  const auto s = summarize(rows);
  json sum = {{"benchmarks", s.cases},
              {"solved", s.solved},
              {"avg_solution_size", s.avgLength},
              {"avg_iterations", s.avgIterations}};
  if (withTimes) {
    sum["avg_seconds"] = s.avgSeconds;
    sum["total_seconds"] = s.totalSeconds;
  }
  return json{{"cases", cases}, {"summary", sum}}.dump();
}

} // namespace sosat
