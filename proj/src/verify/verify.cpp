#include "sosat/verify.hpp"

#include "sosat/symbolic.hpp"

#include <algorithm>
#include <random>

namespace sosat {

namespace {

unsigned bitsAt(const SynthesisInstance &inst, unsigned width) {
  unsigned n = 0;
  for (const auto &v : inst.universals)
    n += v.widthAt(width);
  return n;
}

std::vector<const Program *> pointers(const Witnesses &w) {
  std::vector<const Program *> out;
  for (const auto &p : w)
    out.push_back(&p);
  return out;
}

bool stop(const VerifyConfig &cfg) {
  return (cfg.cancel && cfg.cancel->load(std::memory_order_relaxed)) ||
         sat::Clock::now() >= cfg.deadline;
}

VerifyResult explicitSearch(const SynthesisInstance &inst,
                            const CompiledBody &body, const Witnesses &programs,
                            unsigned width, const VerifyConfig &cfg,
                            bool exhaustive) {
  VerifyResult r;
  r.winner = "explicit";
  BodyEvaluator ev(body);
  const auto ptrs = pointers(programs);
  const unsigned n = bitsAt(inst, width);
  Assignment a;
  a.values.assign(inst.universals.size(), 0);

  auto refutes = [&]() {
    ++r.pointsChecked;
    if (!ev.holds(a.values, ptrs, width)) {
      r.outcome = VerifyOutcome::Counterexample;
      r.cex = a;
      return true;
    }
    return false;
  };

  if (cfg.order == CexOrder::RandomThenExhaustive || !exhaustive) {
    std::mt19937_64 rng(cfg.seed);
    std::uint64_t probes = cfg.randomProbes;
    if (n < 64)
      probes = std::min<std::uint64_t>(probes, std::uint64_t{1} << n);
    for (std::uint64_t i = 0; i < probes; ++i) {
      for (std::size_t v = 0; v < a.values.size(); ++v)
        a.values[v] = rng() & widthMask(inst.universals[v].widthAt(width));
      if (refutes())
        return r;
    }
  }
  if (!exhaustive) {
    r.outcome = VerifyOutcome::Unknown;
    return r;
  }
  std::fill(a.values.begin(), a.values.end(), 0);
  std::uint64_t k = 0;
  do {
    if ((++k & 4095) == 0 && stop(cfg)) {
      r.outcome = VerifyOutcome::Unknown;
      return r;
    }
    if (refutes())
      return r;
  } while (nextAssignment(inst, width, a));
  r.outcome = VerifyOutcome::Valid;
  return r;
}

bool usesFloat(const Witnesses &programs) {
  for (const auto &p : programs)
    for (const auto &inst : p.body)
      if (isFloatOpcode(inst.op))
        return true;
  return false;
}

} // namespace

bool nextAssignment(const SynthesisInstance &inst, unsigned width,
                    Assignment &a) {
  for (std::size_t v = 0; v < a.values.size(); ++v) {
    const Word m = widthMask(inst.universals[v].widthAt(width));
    if (a.values[v] < m) {
      ++a.values[v];
      return true;
    }
    a.values[v] = 0;
  }
  return false;
}

VerifyResult findCounterexampleExplicit(const SynthesisInstance &inst,
                                        const CompiledBody &body,
                                        const Witnesses &programs,
                                        unsigned width,
                                        const VerifyConfig &cfg) {
  return explicitSearch(inst, body, programs, width, cfg, true);
}

VerifyResult findCounterexampleSymbolic(const SynthesisInstance &inst,
                                        const CompiledBody &body,
                                        const Witnesses &programs,
                                        unsigned width,
                                        const VerifyConfig &cfg) {
  if (body.usesFloat() || usesFloat(programs))
    throw Unsupported("floating-point verification is explicit only");
  VerifyResult r;
  r.winner = "symbolic";

  auto solver = sat::makeSolver(cfg.engine);
  sat::CnfFormula cnf;
  SolverSink solverSink(*solver);
  CnfSink cnfSink(cnf);
  ClauseSink &sink = cfg.backend ? static_cast<ClauseSink &>(cnfSink)
                                 : static_cast<ClauseSink &>(solverSink);
  BitBlaster bb(sink);

  std::vector<Bits> vars;
  for (const auto &v : inst.universals) {
    Bits b = bb.freshBits(v.widthAt(width));
    b.resize(width, bb.f());
    vars.push_back(std::move(b));
  }
  std::vector<std::map<std::vector<std::uint32_t>, std::vector<Bits>>> memo(
      programs.size());
  const Lit root = blastBody(
      bb, body, width, vars,
      [&](std::uint32_t fn, std::span<const Bits> args, std::uint32_t proj) {
        std::vector<std::uint32_t> key;
        for (const Bits &a : args)
          for (Lit l : a)
            key.push_back(l.x);
        auto it = memo[fn].find(key);
        if (it == memo[fn].end())
          it = memo[fn]
                   .emplace(std::move(key),
                            blastProgram(bb, programs[fn], args))
                   .first;
        return it->second[proj];
      });
  bb.assertLit(~root);

  std::vector<bool> model;
  if (cfg.backend) {
    auto m = cfg.backend->solve(cnf, cfg.deadline);
    if (!m) {
      r.outcome = VerifyOutcome::Valid;
      return r;
    }
    model = std::move(*m);
  } else {
    sat::Limits lim;
    lim.cancel = cfg.cancel;
    lim.deadline = cfg.deadline;
    const sat::Result res = solver->solve({}, lim);
    if (res == sat::Result::Unknown)
      return r;
    if (res == sat::Result::Unsat) {
      r.outcome = VerifyOutcome::Valid;
      return r;
    }
    model.resize(solver->numVars());
    for (std::size_t v = 0; v < model.size(); ++v)
      model[v] = solver->modelValue(static_cast<sat::Var>(v));
  }
  Assignment a;
  for (const Bits &b : vars) {
    Word x = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
      const Lit l = b[i];
      const bool bit = l == bb.t()   ? true
                       : l == bb.f() ? false
                                     : model[static_cast<std::size_t>(l.var())] !=
                                           l.negated();
      if (bit)
        x |= Word{1} << i;
    }
    a.values.push_back(x);
  }
  BodyEvaluator ev(body);
  if (ev.holds(a.values, pointers(programs), width))
    throw InternalError("symbolic counterexample does not refute the body");
  r.outcome = VerifyOutcome::Counterexample;
  r.cex = std::move(a);
  r.pointsChecked = 1;
  return r;
}

VerifyResult findCounterexample(const SynthesisInstance &inst,
                                const CompiledBody &body,
                                const Witnesses &programs, unsigned width,
                                const VerifyConfig &cfg) {
  const unsigned n = bitsAt(inst, width);
  if (n <= cfg.explicitMaxBits)
    return findCounterexampleExplicit(inst, body, programs, width, cfg);
  VerifyResult probe = explicitSearch(inst, body, programs, width, cfg, false);
  if (probe.outcome == VerifyOutcome::Counterexample)
    return probe;
  try {
    return findCounterexampleSymbolic(inst, body, programs, width, cfg);
  } catch (const Unsupported &) {
    return probe;
  }
}

std::vector<Word> extensionCandidates(Word v, unsigned w, unsigned W) {
  const Word mw = widthMask(w), mW = widthMask(W);
  v &= mw;
  std::vector<Word> out;
  auto add = [&](Word x) {
    x &= mW;
    if (std::find(out.begin(), out.end(), x) == out.end())
      out.push_back(x);
  };
  add(v);
  if (v & signBit(w))
    add(v | (mW & ~mw));
  if (v == mw)
    add(mW);
  if (v == signBit(w))
    add(signBit(W));
  if (v == w - 1)
    add(W - 1);
  if (v == w)
    add(W);
  Word rep = 0;
  for (unsigned s = 0; s < W; s += w)
    rep |= v << s;
  add(rep);
  return out;
}

std::optional<Witnesses> generalizeConstants(const SynthesisInstance &inst,
                                             const CompiledBody &body,
                                             const Witnesses &programs,
                                             unsigned w, unsigned W,
                                             const VerifyConfig &cfg,
                                             unsigned trialCap,
                                             GeneralizeStats *stats) {
  struct Slot {
    std::size_t fn, k;
    std::vector<Word> options;
  };
  std::vector<Slot> slots;
  for (std::size_t i = 0; i < programs.size(); ++i)
    for (std::size_t k = 0; k < programs[i].constants.size(); ++k)
      slots.push_back({i, k, extensionCandidates(programs[i].constants[k], w, W)});

  Witnesses lifted = programs;
  for (auto &p : lifted)
    p.width = W;
  std::vector<std::size_t> pos(slots.size(), 0);
  GeneralizeStats local;
  GeneralizeStats &st = stats ? *stats : local;
  st = {};
  for (;;) {
    if (st.trials >= trialCap) {
      st.capped = true;
      return std::nullopt;
    }
    if (stop(cfg))
      return std::nullopt;
    for (std::size_t s = 0; s < slots.size(); ++s)
      lifted[slots[s].fn].constants[slots[s].k] = slots[s].options[pos[s]];
    ++st.trials;
    const VerifyResult r = findCounterexample(inst, body, lifted, W, cfg);
    if (r.outcome == VerifyOutcome::Valid)
      return lifted;
    std::size_t s = slots.size();
    for (;;) {
      if (s == 0)
        return std::nullopt;
      --s;
      if (++pos[s] < slots[s].options.size())
        break;
      pos[s] = 0;
    }
  }
}

} // namespace sosat
