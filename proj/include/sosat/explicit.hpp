//===- explicit.hpp - Exhaustive enumeration of canonical programs -------===//
#pragma once

#include "sosat/synth.hpp"

#include <memory>

namespace sosat {

/// The value of rank `r` in the constant order: 0, 1, all-ones, the sign bit,
/// then the remaining values ascending.
Word constantAtRank(std::uint64_t rank, unsigned width);
/// Number of distinct values at `width`, saturated at 2^63.
std::uint64_t valueCount(unsigned width);

/// Streams the canonical programs of exactly (l, c) at one width. The constant
/// table is the outer loop; inside a table the first instruction slot varies
/// slowest. Arity-0 signatures stream the degenerate forms instead (every
/// output tuple), and only for l = 0.
class ProgramEnumerator {
public:
  ProgramEnumerator(unsigned arity, unsigned outCount, unsigned length,
                    unsigned consts, unsigned width,
                    std::vector<Opcode> opcodes);

  bool next(Program &out);
  std::uint64_t produced() const { return produced_; }
  /// Lowest slot changed by the last next(); slots below it are unchanged.
  std::size_t firstChangedSlot() const { return changed_; }

private:
  bool advanceTable();
  bool buildChoices();

  Program proto_;
  std::vector<Opcode> ops_;
  std::vector<std::uint64_t> ranks_;
  std::vector<std::vector<Instruction>> choices_;
  std::vector<std::size_t> pos_;
  bool started_ = false;
  bool done_ = false;
  std::size_t changed_ = 0;
  std::uint64_t produced_ = 0;
};

/// The first program tuple of `shape` (in enumeration order) satisfying the
/// body on every input, if any.
std::optional<Witnesses> filterOnInputs(const SynthesisInstance &inst,
                                        const CompiledBody &body,
                                        const Shape &shape, unsigned width,
                                        std::span<const Opcode> opcodes,
                                        std::span<const Assignment> inputs);

class ExplicitStrategy final : public SynthStrategy {
public:
  ExplicitStrategy();
  ~ExplicitStrategy() override;

  std::string name() const override { return "explicit"; }
  bool complete() const override { return true; }
  StepStatus step(const SynthContext &ctx, std::uint64_t budget,
                  Candidate &out) override;

private:
  struct State;
  std::unique_ptr<State> s_;
};

} // namespace sosat
