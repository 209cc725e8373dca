#include "sosat/cegis.hpp"

#include "sosat/explicit.hpp"

#include <json.hpp>

#include <cmath>
#include <condition_variable>
#include <mutex>
#include <set>
#include <thread>

namespace sosat {

std::string_view verdictName(Verdict v) {
  switch (v) {
  case Verdict::Sat:
    return "SAT";
  case Verdict::Unsat:
    return "UNSAT";
  case Verdict::Unknown:
    return "UNKNOWN";
  }
  return "UNKNOWN";
}

std::string_view reasonName(UnknownReason r) {
  switch (r) {
  case UnknownReason::None:
    return "none";
  case UnknownReason::Timeout:
    return "timeout";
  case UnknownReason::Cap:
    return "cap";
  case UnknownReason::Unsupported:
    return "unsupported";
  case UnknownReason::Cancelled:
    return "cancelled";
  }
  return "none";
}

SearchState nextParams(SearchState s, const LoopOutcome &outcome) {
  if (outcome.kind == LoopOutcome::SynthFailed) {
    if (s.c < s.l) {
      ++s.c;
    } else {
      s.c = 0;
      ++s.l;
    }
    return s;
  }
  if (outcome.smallWidthOk && !outcome.generalized && s.w < s.targetWidth)
    ++s.w;
  return s;
}

StoppingBound stoppingBound(unsigned inputBits,
                            std::optional<std::uint64_t> cap) {
  StoppingBound b;
  b.value = inputBits >= 63 ? ~std::uint64_t{0} : std::uint64_t{1} << inputBits;
  if (cap && *cap < b.value) {
    b.value = *cap;
    b.capped = true;
  }
  return b;
}

StoppingBound stoppingBound(const SynthesisInstance &inst,
                            std::optional<std::uint64_t> cap) {
  return stoppingBound(inst.inputBits(), cap);
}

namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

double seconds(Clock::duration d) {
  return std::chrono::duration<double>(d).count();
}

class RunLog {
public:
  RunLog(std::ostream *os, bool timed, Clock::time_point start)
      : os_(os), timed_(timed), start_(start) {}

  void emit(json j) {
    if (!os_)
      return;
    if (timed_)
      j["t"] = std::round(seconds(Clock::now() - start_) * 1e4) / 1e4;
    *os_ << j.dump() << '\n';
    os_->flush();
  }

private:
  std::ostream *os_;
  bool timed_;
  Clock::time_point start_;
};

json paramsJson(const SearchState &s) {
  return {{"l", s.l}, {"w", s.w}, {"c", s.c}};
}

struct SynthOutcome {
  enum Kind : std::uint8_t { Found, Failed, Timeout, Cancelled, NoStrategy };
  Kind kind = NoStrategy;
  Candidate candidate;
  std::string winner;
};

struct Racer {
  std::unique_ptr<SynthStrategy> strategy;
  std::uint64_t budget;
};

SynthOutcome synthRoundRobin(std::vector<Racer> &racers,
                             const SynthContext &ctx,
                             const std::atomic<bool> *external) {
  std::vector<bool> out(racers.size(), false);
  for (;;) {
    bool any = false;
    for (std::size_t i = 0; i < racers.size(); ++i) {
      if (out[i])
        continue;
      any = true;
      SynthOutcome r;
      const StepStatus st =
          racers[i].strategy->step(ctx, racers[i].budget, r.candidate);
      if (st == StepStatus::Found ||
          (st == StepStatus::Exhausted && racers[i].strategy->complete())) {
        r.kind = st == StepStatus::Found ? SynthOutcome::Found
                                         : SynthOutcome::Failed;
        r.winner = racers[i].strategy->name();
        return r;
      }
      if (st != StepStatus::Continue)
        out[i] = true;
    }
    if (!any)
      return {SynthOutcome::NoStrategy, {}, {}};
    if (external && external->load())
      return {SynthOutcome::Cancelled, {}, {}};
    if (Clock::now() >= ctx.deadline)
      return {SynthOutcome::Timeout, {}, {}};
  }
}

SynthOutcome synthParallel(std::vector<Racer> &racers, SynthContext ctx,
                           const std::atomic<bool> *external) {
  std::atomic<bool> stop{false};
  ctx.cancel = &stop;
  std::mutex mu;
  std::condition_variable cv;
  std::optional<SynthOutcome> result;
  std::size_t running = racers.size();
  std::exception_ptr failure;

  std::vector<std::thread> threads;
  for (auto &racer : racers) {
    threads.emplace_back([&, strat = racer.strategy.get()] {
      try {
        for (;;) {
          if (stop.load())
            break;
          Candidate cand;
          const std::uint64_t chunk =
              strat->name() == "gp" ? 10 : ~std::uint64_t{0};
          const StepStatus st = strat->step(ctx, chunk, cand);
          if (st == StepStatus::Found ||
              (st == StepStatus::Exhausted && strat->complete())) {
            std::lock_guard lk(mu);
            if (!result && !stop.load()) {
              SynthOutcome r;
              r.kind = st == StepStatus::Found ? SynthOutcome::Found
                                               : SynthOutcome::Failed;
              r.candidate = std::move(cand);
              r.winner = strat->name();
              result = std::move(r);
              stop = true;
            }
            break;
          }
          if (st != StepStatus::Continue)
            break;
        }
      } catch (...) {
        std::lock_guard lk(mu);
        if (!failure)
          failure = std::current_exception();
        stop = true;
      }
      std::lock_guard lk(mu);
      --running;
      cv.notify_all();
    });
  }
  SynthOutcome::Kind fallback = SynthOutcome::NoStrategy;
  {
    std::unique_lock lk(mu);
    while (!result && running > 0 && !failure) {
      cv.wait_for(lk, std::chrono::milliseconds(5));
      if (external && external->load()) {
        fallback = SynthOutcome::Cancelled;
        break;
      }
      if (Clock::now() >= ctx.deadline) {
        fallback = SynthOutcome::Timeout;
        break;
      }
    }
    stop = true;
  }
  for (auto &t : threads)
    t.join();
  if (failure)
    std::rethrow_exception(failure);
  if (result)
    return std::move(*result);
  return {fallback, {}, {}};
}

json winsJson(const std::map<std::string, std::uint64_t> &m) {
  json j = json::object();
  for (const auto &[k, v] : m)
    j[k] = v;
  return j;
}

} // namespace

SolverResult solve(const SynthesisInstance &input, const SolverConfig &cfg) {
  const auto start = Clock::now();
  const auto deadline =
      start + std::chrono::duration_cast<Clock::duration>(
                  std::chrono::duration<double>(cfg.timeoutSeconds));
  SynthesisInstance inst = input;
  if (cfg.targetWidth)
    inst.width = *cfg.targetWidth;
  const unsigned W = inst.width;
  if (W < 1 || W > kMaxWidth)
    throw UnsupportedWidth("target width " + std::to_string(W) +
                           " outside [1, 64]");
  const CompiledBody body(inst);
  const std::vector<Opcode> opcodes = synthesisOpcodes(cfg.enableShl);
  const bool programs = hasProgramFunctions(inst);
  const unsigned L0 =
      std::max({1u, minimumLength(inst), cfg.initialLength.value_or(1u)});

  std::vector<Racer> racers;
  if (cfg.useExplicit)
    racers.push_back({std::make_unique<ExplicitStrategy>(), cfg.explicitBudget});
  if (cfg.useSymbolic) {
    SymbolicConfig sc;
    sc.backend = cfg.backend;
    sc.engine = cfg.engine;
    sc.divWidthLimit = cfg.divWidthLimit;
    racers.push_back({std::make_unique<SymbolicStrategy>(sc), cfg.symbolicBudget});
  }
  if (cfg.useGp) {
    GpConfig g = cfg.gp;
    g.seed = cfg.seed;
    racers.push_back({std::make_unique<GpStrategy>(g), cfg.gpBudget});
  }
  if (racers.empty())
    throw Error("no synthesis strategy enabled");

  VerifyConfig vcfg;
  vcfg.explicitMaxBits = cfg.explicitMaxBits;
  vcfg.seed = cfg.seed;
  vcfg.backend = cfg.backend;
  vcfg.engine = cfg.engine;
  vcfg.cancel = cfg.cancel;
  vcfg.deadline = deadline;

  SearchState st;
  st.targetWidth = W;
  st.w = std::min(cfg.initialWidth.value_or(4u), W);
  st.w = std::max(st.w, 1u);
  st.l = L0;
  st.c = 0;
  std::set<Assignment> seen;
  std::uint64_t epoch = 0;

  SolverResult res;
  SolverStats &stats = res.stats;
  RunLog log(cfg.log, !cfg.deterministic, start);

  auto finish = [&](Verdict v, UnknownReason why) -> SolverResult {
    res.verdict = v;
    res.reason = why;
    stats.finalL = st.l;
    stats.finalW = st.w;
    stats.finalC = st.c;
    stats.counterexamples = st.inputs.size();
    json j = {{"event", "verdict"},
              {"verdict", verdictName(v)},
              {"iterations", stats.iterations},
              {"synth_wins", winsJson(stats.synthWins)},
              {"verif_wins", winsJson(stats.verifWins)}};
    if (v == Verdict::Unknown)
      j["reason"] = reasonName(why);
    if (v == Verdict::Sat)
      j["minimal_solution_length"] = stats.minimalSolutionLength;
    log.emit(std::move(j));
    return res;
  };
  auto changeParams = [&](const SearchState &next, const char *why) {
    json j = {{"event", "param-change"},
              {"reason", why},
              {"from", paramsJson(st)},
              {"to", paramsJson(next)}};
    const std::vector<Assignment> keep = std::move(st.inputs);
    st = next;
    st.inputs = keep;
    ++epoch;
    log.emit(std::move(j));
  };
  auto addInput = [&](const Assignment &a) {
    if (!seen.insert(a).second)
      throw InternalError("counterexample repeated; encoder and interpreter "
                          "disagree");
    st.inputs.push_back(a);
  };
  auto timedOut = [&] { return Clock::now() >= deadline; };
  auto cancelled = [&] { return cfg.cancel && cfg.cancel->load(); };

  const StoppingBound bound = stoppingBound(inst, cfg.maxLength);

  for (;;) {
    if (cancelled())
      return finish(Verdict::Unknown, UnknownReason::Cancelled);
    if (timedOut())
      return finish(Verdict::Unknown, UnknownReason::Timeout);
    if (programs && st.l > bound.value) {
      if (bound.capped)
        return finish(Verdict::Unknown, UnknownReason::Cap);
      if (st.w < W) {
        SearchState next = st;
        next.w = W;
        next.l = L0;
        next.c = 0;
        changeParams(next, "width-restart");
        continue;
      }
      return finish(Verdict::Unsat, UnknownReason::None);
    }

    ++st.generation;
    ++stats.synthCalls;
    log.emit({{"event", "synth-start"},
              {"iter", st.generation},
              {"l", st.l},
              {"w", st.w},
              {"c", st.c},
              {"inputs", st.inputs.size()}});

    SynthContext ctx;
    ctx.instance = &inst;
    ctx.body = &body;
    ctx.params = {st.l, st.c, st.w};
    ctx.epoch = epoch;
    ctx.inputs = st.inputs;
    ctx.opcodes = opcodes;
    ctx.cancel = cfg.cancel;
    ctx.deadline = deadline;
    const auto t0 = Clock::now();
    SynthOutcome so = cfg.deterministic
                          ? synthRoundRobin(racers, ctx, cfg.cancel)
                          : synthParallel(racers, ctx, cfg.cancel);
    stats.synthSeconds += seconds(Clock::now() - t0);

    switch (so.kind) {
    case SynthOutcome::Timeout:
      return finish(Verdict::Unknown, UnknownReason::Timeout);
    case SynthOutcome::Cancelled:
      return finish(Verdict::Unknown, UnknownReason::Cancelled);
    case SynthOutcome::NoStrategy:
      return finish(Verdict::Unknown, UnknownReason::Unsupported);
    case SynthOutcome::Failed: {
      ++stats.synthWins[so.winner];
      log.emit({{"event", "synth-fail"},
                {"winner", so.winner},
                {"l", st.l},
                {"w", st.w},
                {"c", st.c}});
      if (!programs) {
        if (st.w >= W)
          return finish(Verdict::Unsat, UnknownReason::None);
        SearchState next = st;
        next.w = W;
        changeParams(next, "synth-fail");
        continue;
      }
      changeParams(nextParams(st, {LoopOutcome::SynthFailed}), "synth-fail");
      continue;
    }
    case SynthOutcome::Found:
      break;
    }

    ++stats.synthWins[so.winner];
    ++stats.iterations;
    const Witnesses &cand = so.candidate.programs;
    {
      json progs = json::object();
      for (std::size_t i = 0; i < cand.size(); ++i)
        progs[inst.functions[i].name] = prettyPrint(cand[i]);
      log.emit({{"event", "candidate"},
                {"winner", so.winner},
                {"l", st.l},
                {"w", st.w},
                {"c", st.c},
                {"length", totalLength(cand)},
                {"programs", progs}});
    }

    const auto t1 = Clock::now();
    const VerifyResult vr = findCounterexample(inst, body, cand, st.w, vcfg);
    stats.verifSeconds += seconds(Clock::now() - t1);
    if (vr.outcome == VerifyOutcome::Unknown)
      return finish(Verdict::Unknown, timedOut() ? UnknownReason::Timeout
                                    : cancelled() ? UnknownReason::Cancelled
                                                  : UnknownReason::Unsupported);
    ++stats.verifWins[vr.winner];
    if (vr.outcome == VerifyOutcome::Counterexample) {
      log.emit({{"event", "cex"},
                {"winner", vr.winner},
                {"width", st.w},
                {"values", vr.cex.values}});
      addInput(vr.cex);
      continue;
    }
    log.emit({{"event", "verif-valid"}, {"winner", vr.winner}, {"width", st.w}});

    Witnesses final = cand;
    if (st.w < W) {
      const auto t2 = Clock::now();
      GeneralizeStats gs;
      auto lifted = generalizeConstants(inst, body, cand, st.w, W, vcfg,
                                        cfg.generalizeTrials, &gs);
      stats.generalizeSeconds += seconds(Clock::now() - t2);
      log.emit({{"event", "generalize"},
                {"ok", lifted.has_value()},
                {"trials", gs.trials},
                {"from", st.w},
                {"to", W}});
      if (!lifted) {
        if (timedOut())
          return finish(Verdict::Unknown, UnknownReason::Timeout);
        changeParams(nextParams(st, {LoopOutcome::VerifFailed, true, false}),
                     "generalize-fail");
        continue;
      }
      final = std::move(*lifted);
    }
    stats.minimalSolutionLength = totalLength(final);
    res.witnesses = witnessMap(inst, final);
    return finish(Verdict::Sat, UnknownReason::None);
  }
}

} // namespace sosat
