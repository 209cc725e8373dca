#include "sosat/gp.hpp"

#include <algorithm>
#include <numeric>

namespace sosat {

namespace {

std::size_t uniform(std::mt19937_64 &rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

bool chance(std::mt19937_64 &rng, double p) {
  if (p <= 0)
    return false;
  if (p >= 1)
    return true;
  return std::uniform_real_distribution<double>(0, 1)(rng) < p;
}

Word randomConstant(std::mt19937_64 &rng, unsigned w) {
  const Word m = widthMask(w);
  if (chance(rng, 0.5)) {
    const Word special[] = {0, 1, m, signBit(w), Word{w - 1}, Word{w}};
    return special[uniform(rng, std::size(special))] & m;
  }
  return rng() & m;
}

Operand randomOperand(std::mt19937_64 &rng, const Program &p, std::size_t j) {
  const std::size_t c = p.constants.size();
  const std::size_t idx = uniform(rng, c + p.arity + j);
  if (idx < c)
    return Operand::constant(static_cast<std::uint32_t>(idx));
  if (idx < c + p.arity)
    return Operand::input(static_cast<std::uint32_t>(idx - c));
  return Operand::temp(static_cast<std::uint32_t>(idx - c - p.arity));
}

Instruction randomInstruction(std::mt19937_64 &rng, const Program &p,
                              std::size_t j, std::span<const Opcode> ops) {
  Instruction inst;
  inst.op = ops[uniform(rng, ops.size())];
  for (unsigned k = 0; k < inst.arity(); ++k)
    inst.args[k] = randomOperand(rng, p, j);
  return inst;
}

// Brings every operand back into the legal range of its slot.
void repair(Program &p, std::mt19937_64 &rng) {
  const std::size_t c = p.constants.size();
  for (std::size_t j = 0; j < p.body.size(); ++j) {
    Instruction &inst = p.body[j];
    for (unsigned k = 0; k < 3; ++k) {
      Operand &o = inst.args[k];
      if (k >= inst.arity()) {
        o = Operand::constant(0);
        continue;
      }
      switch (o.kind) {
      case Operand::Kind::Const:
        if (c == 0)
          o = Operand::input(o.index % p.arity);
        else
          o.index %= static_cast<std::uint32_t>(c);
        break;
      case Operand::Kind::Input:
        o.index %= p.arity;
        break;
      case Operand::Kind::Temp:
        if (j == 0)
          o = randomOperand(rng, p, 0);
        else
          o.index %= static_cast<std::uint32_t>(j);
        break;
      }
    }
  }
}

// Resizes a program to `len` instructions and `consts` constants at width
// `w`, keeping the tail of the body so that the outputs stay put.
void adapt(Program &p, unsigned len, unsigned consts, unsigned w,
           std::span<const Opcode> ops, std::mt19937_64 &rng) {
  const Word m = widthMask(w);
  p.width = w;
  for (Word &c : p.constants)
    c &= m;
  if (p.arity == 0)
    return;
  while (p.constants.size() > consts)
    p.constants.pop_back();
  while (p.constants.size() < consts)
    p.constants.push_back(randomConstant(rng, w));
  const auto cur = static_cast<long>(p.body.size());
  const long delta = static_cast<long>(len) - cur;
  if (delta < 0) {
    p.body.erase(p.body.begin(), p.body.begin() + (-delta));
  } else if (delta > 0) {
    std::vector<Instruction> head;
    for (long j = 0; j < delta; ++j)
      head.push_back(randomInstruction(rng, p, static_cast<std::size_t>(j), ops));
    p.body.insert(p.body.begin(), head.begin(), head.end());
  }
  for (auto &inst : p.body)
    for (unsigned k = 0; k < inst.arity(); ++k)
      if (inst.args[k].isTemp()) {
        const long idx = static_cast<long>(inst.args[k].index) + delta;
        inst.args[k].index = static_cast<std::uint32_t>(std::max(idx, 0L));
      }
  repair(p, rng);
}

Shape drawShape(const SynthesisInstance &inst, const SynthParams &params,
                unsigned slack, std::mt19937_64 &rng) {
  auto all = splits(inst, params.l, params.l);
  Shape s = all[uniform(rng, all.size())];
  std::vector<std::size_t> prog;
  for (std::size_t i = 0; i < inst.functions.size(); ++i)
    if (inst.functions[i].arity > 0)
      prog.push_back(i);
  if (!prog.empty() && slack > 0)
    s.length[prog[uniform(rng, prog.size())]] +=
        static_cast<unsigned>(uniform(rng, slack + 1));
  return s;
}

} // namespace

Individual randomIndividual(const GpShape &g, const Shape &shape,
                            std::mt19937_64 &rng) {
  Individual ind;
  const auto &fs = g.instance->functions;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    Program p;
    p.arity = fs[i].arity;
    p.outCount = fs[i].outCount;
    p.width = g.width;
    const unsigned nc = fs[i].arity == 0 ? fs[i].outCount : shape.consts[i];
    for (unsigned k = 0; k < nc; ++k)
      p.constants.push_back(randomConstant(rng, g.width));
    for (unsigned j = 0; j < shape.length[i]; ++j)
      p.body.push_back(randomInstruction(rng, p, j, g.opcodes));
    ind.programs.push_back(std::move(p));
  }
  return ind;
}

std::size_t fitness(const Individual &ind, BodyEvaluator &ev,
                    std::span<const Assignment> inputs, unsigned width) {
  std::vector<const Program *> ptrs;
  for (const auto &p : ind.programs)
    ptrs.push_back(&p);
  std::size_t n = 0;
  for (const auto &a : inputs)
    if (ev.holds(a.values, ptrs, width))
      ++n;
  return n;
}

const Individual &select(const Population &pop, unsigned tournament,
                         std::mt19937_64 &rng) {
  // Contestants are distinct members; ties go to the one drawn first.
  const auto &v = pop.individuals;
  const std::size_t k = std::clamp<std::size_t>(tournament, 1, v.size());
  std::vector<std::size_t> drawn;
  drawn.reserve(k);
  while (drawn.size() < k) {
    const std::size_t i = uniform(rng, v.size());
    if (std::find(drawn.begin(), drawn.end(), i) == drawn.end())
      drawn.push_back(i);
  }
  const Individual *best = &v[drawn[0]];
  for (std::size_t t = 1; t < k; ++t) {
    const Individual &x = v[drawn[t]];
    if (x.fitness.value_or(0) > best->fitness.value_or(0))
      best = &x;
  }
  return *best;
}

Individual crossover(const Individual &a, const Individual &b,
                     std::mt19937_64 &rng) {
  Individual child;
  for (std::size_t i = 0; i < a.programs.size(); ++i) {
    const Program &pa = a.programs[i];
    const Program &pb = b.programs[i];
    Program p = pb;
    for (std::size_t k = 0; k < p.constants.size(); ++k)
      if (k < pa.constants.size() && chance(rng, 0.5))
        p.constants[k] = pa.constants[k];
    const std::size_t cut =
        uniform(rng, std::min(pa.body.size(), pb.body.size()) + 1);
    for (std::size_t j = 0; j < cut; ++j)
      p.body[j] = pa.body[j];
    repair(p, rng);
    child.programs.push_back(std::move(p));
  }
  return child;
}

Individual mutate(const Individual &ind, const GpShape &g, double prob,
                  std::mt19937_64 &rng) {
  Individual out;
  for (const Program &src : ind.programs) {
    Program p = src;
    for (Word &c : p.constants)
      if (chance(rng, prob))
        c = randomConstant(rng, p.width);
    for (std::size_t j = 0; j < p.body.size(); ++j) {
      Instruction &inst = p.body[j];
      if (chance(rng, prob)) {
        const unsigned before = inst.arity();
        inst.op = g.opcodes[uniform(rng, g.opcodes.size())];
        for (unsigned k = before; k < inst.arity(); ++k)
          inst.args[k] = randomOperand(rng, p, j);
      }
      for (unsigned k = 0; k < inst.arity(); ++k)
        if (chance(rng, prob))
          inst.args[k] = randomOperand(rng, p, j);
    }
    repair(p, rng);
    out.programs.push_back(std::move(p));
  }
  return out;
}

void evolveStep(Population &pop, const GpShape &g, BodyEvaluator &ev,
                std::span<const Assignment> inputs, const GpConfig &cfg) {
  for (auto &ind : pop.individuals)
    if (!ind.fitness)
      ind.fitness = fitness(ind, ev, inputs, g.width);
  std::vector<std::size_t> order(pop.individuals.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) {
    return *pop.individuals[x].fitness > *pop.individuals[y].fitness;
  });
  std::vector<Individual> next;
  next.reserve(pop.capacity);
  for (std::size_t e = 0; e < cfg.elite && e < order.size(); ++e)
    next.push_back(pop.individuals[order[e]]);
  while (next.size() < pop.capacity) {
    const Individual &a = select(pop, cfg.tournament, pop.rng);
    Individual child = chance(pop.rng, cfg.crossover)
                           ? crossover(a, select(pop, cfg.tournament, pop.rng),
                                       pop.rng)
                           : a;
    child = mutate(child, g, cfg.mutation, pop.rng);
    child.fitness = fitness(child, ev, inputs, g.width);
    next.push_back(std::move(child));
  }
  pop.individuals = std::move(next);
  ++pop.generation;
}

// ---------------------------------------------------------------------------

GpStrategy::GpStrategy(GpConfig cfg) : cfg_(cfg) {
  pop_.capacity = cfg_.population;
  pop_.rng.seed(cfg_.seed);
}

void GpStrategy::reshape(const SynthContext &ctx) {
  shape_.instance = ctx.instance;
  shape_.width = ctx.params.w;
  shape_.opcodes.assign(ctx.opcodes.begin(), ctx.opcodes.end());
  if (pop_.individuals.empty()) {
    for (std::size_t i = 0; i < pop_.capacity; ++i)
      pop_.individuals.push_back(randomIndividual(
          shape_, drawShape(*ctx.instance, ctx.params, cfg_.slack, pop_.rng),
          pop_.rng));
    return;
  }
  // Carry the population over to the new parameters.
  for (auto &ind : pop_.individuals) {
    const Shape s = drawShape(*ctx.instance, ctx.params, cfg_.slack, pop_.rng);
    for (std::size_t i = 0; i < ind.programs.size(); ++i)
      adapt(ind.programs[i], s.length[i], s.consts[i], ctx.params.w,
            shape_.opcodes, pop_.rng);
    ind.fitness.reset();
  }
}

bool GpStrategy::harvest(const SynthContext &ctx, Candidate &out) {
  const std::size_t want = ctx.inputs.size();
  for (const auto &ind : pop_.individuals) {
    if (ind.fitness != want)
      continue;
    Witnesses canon;
    for (const auto &p : ind.programs)
      canon.push_back(canonicalize(p));
    if (totalLength(canon) > ctx.params.l)
      continue;
    out.programs = std::move(canon);
    out.origin = name();
    out.params = ctx.params;
    return true;
  }
  return false;
}

StepStatus GpStrategy::step(const SynthContext &ctx, std::uint64_t budget,
                            Candidate &out) {
  if (body_ != ctx.body) {
    body_ = ctx.body;
    ev_ = std::make_unique<BodyEvaluator>(*ctx.body);
  }
  if (shapeL_ != ctx.params.l || shapeW_ != ctx.params.w) {
    shapeL_ = ctx.params.l;
    shapeW_ = ctx.params.w;
    reshape(ctx);
  }
  if (inputsSeen_ != ctx.inputs.size()) {
    inputsSeen_ = ctx.inputs.size();
    for (auto &ind : pop_.individuals)
      ind.fitness.reset();
  }
  for (auto &ind : pop_.individuals)
    if (!ind.fitness)
      ind.fitness = fitness(ind, *ev_, ctx.inputs, ctx.params.w);
  if (harvest(ctx, out))
    return StepStatus::Found;
  for (std::uint64_t g = 0; g < budget; ++g) {
    if (ctx.stopRequested())
      return StepStatus::Continue;
    evolveStep(pop_, shape_, *ev_, ctx.inputs, cfg_);
    if (harvest(ctx, out))
      return StepStatus::Found;
  }
  return StepStatus::Continue;
}

} // namespace sosat
