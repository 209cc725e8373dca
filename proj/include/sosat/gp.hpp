//===- gp.hpp - Linear genetic programming over witness tuples -----------===//
//
// Individuals are raw (possibly non-canonical) program tuples. The population
// is kept across refinement iterations and only re-evaluated when the input
// set grows, so evolution continues where it left off.
//
//===----------------------------------------------------------------------===//
#pragma once

#include "sosat/synth.hpp"

#include <random>

namespace sosat {

struct GpConfig {
  std::size_t population = 200;
  unsigned tournament = 4;
  double crossover = 0.9;
  double mutation = 0.05;
  std::size_t elite = 2;
  /// Individuals may be this many instructions longer than l.
  unsigned slack = 2;
  std::uint64_t seed = 1;
};

struct Individual {
  Witnesses programs;
  std::optional<std::size_t> fitness;
};

struct Population {
  std::vector<Individual> individuals;
  std::size_t capacity = 200;
  std::uint64_t generation = 0;
  std::mt19937_64 rng;
};

/// What a randomly drawn individual looks like: widths, operand domains and
/// the opcodes mutation may pick.
struct GpShape {
  const SynthesisInstance *instance = nullptr;
  unsigned width = 4;
  std::vector<Opcode> opcodes;
};

Individual randomIndividual(const GpShape &g, const Shape &shape,
                            std::mt19937_64 &rng);

/// Number of inputs on which the tuple satisfies the body.
std::size_t fitness(const Individual &ind, BodyEvaluator &ev,
                    std::span<const Assignment> inputs, unsigned width);

/// Tournament among distinct members; fitness must be computed.
const Individual &select(const Population &pop, unsigned tournament,
                         std::mt19937_64 &rng);

/// Per function: a prefix of `a` joined to the suffix of `b` at one cut, with
/// constants drawn from either parent and out-of-range operands repaired.
Individual crossover(const Individual &a, const Individual &b,
                     std::mt19937_64 &rng);

/// Rewrites each opcode, operand and constant independently with
/// probability `p`.
Individual mutate(const Individual &ind, const GpShape &g, double p,
                  std::mt19937_64 &rng);

/// One generation: elites, then tournament parents, crossover and mutation.
/// Fitness of every member is up to date afterwards.
void evolveStep(Population &pop, const GpShape &g, BodyEvaluator &ev,
                std::span<const Assignment> inputs, const GpConfig &cfg);

/// Searches length l (plus slack) with up to l constants whatever the
/// current c; it never reports a shape exhausted.
class GpStrategy final : public SynthStrategy {
public:
  explicit GpStrategy(GpConfig cfg = {});

  std::string name() const override { return "gp"; }
  bool complete() const override { return false; }
  StepStatus step(const SynthContext &ctx, std::uint64_t budget,
                  Candidate &out) override;

  const Population &population() const { return pop_; }

private:
  void reshape(const SynthContext &ctx);
  bool harvest(const SynthContext &ctx, Candidate &out);

  GpConfig cfg_;
  Population pop_;
  GpShape shape_;
  std::unique_ptr<BodyEvaluator> ev_;
  const CompiledBody *body_ = nullptr;
  // Constant count is not part of the GP shape, so only l and w trigger a
  // reshape.
  unsigned shapeL_ = 0, shapeW_ = 0;
  std::size_t inputsSeen_ = 0;
};

} // namespace sosat
