//===- synth.hpp - Pieces shared by the candidate synthesisers -----------===//
//
// A strategy searches for witness programs of one shape (l, c, w) that satisfy
// the body on every stored input. Strategies are stepped with a budget and
// keep their position between steps, so the refinement loop can interleave
// them deterministically or drive each from its own thread.
//
//===----------------------------------------------------------------------===//
#pragma once

#include "sosat/formula.hpp"
#include "sosat/lang.hpp"

#include <atomic>
#include <chrono>
#include <map>
#include <string>
#include <vector>

namespace sosat {

/// One program per function symbol, aligned with SynthesisInstance::functions.
using Witnesses = std::vector<Program>;

std::map<std::string, Program> witnessMap(const SynthesisInstance &inst,
                                          const Witnesses &w);
std::size_t totalLength(const Witnesses &w);

struct SynthParams {
  unsigned l = 1;
  unsigned c = 0;
  unsigned w = 4;

  bool operator==(const SynthParams &) const = default;
};

/// Per-function lengths and constant counts. Functions of arity 0 always get
/// length 0 and `outCount` constants (the degenerate form).
struct Shape {
  std::vector<unsigned> length;
  std::vector<unsigned> consts;

  bool operator==(const Shape &) const = default;
};

/// Smallest total length any witness tuple can have: every function of
/// positive arity needs one instruction per output.
unsigned minimumLength(const SynthesisInstance &inst);
bool hasProgramFunctions(const SynthesisInstance &inst);

/// Every way to share l instructions and c constants among the functions of
/// positive arity, with c_i <= l_i and l_i >= outCount_i. Deterministic order.
std::vector<Shape> splits(const SynthesisInstance &inst, unsigned l, unsigned c);

/// Runs every program against every assignment; `programs` must already be
/// at `width`.
bool satisfiesAll(BodyEvaluator &ev, const Witnesses &programs,
                  std::span<const Assignment> inputs, unsigned width);

struct SynthContext {
  const SynthesisInstance *instance = nullptr;
  const CompiledBody *body = nullptr;
  SynthParams params;
  /// Changes whenever params change; strategies reset their cursors on it.
  std::uint64_t epoch = 0;
  std::span<const Assignment> inputs;
  std::span<const Opcode> opcodes;
  const std::atomic<bool> *cancel = nullptr;
  std::chrono::steady_clock::time_point deadline =
      std::chrono::steady_clock::time_point::max();

  bool stopRequested() const {
    return (cancel && cancel->load(std::memory_order_relaxed)) ||
           std::chrono::steady_clock::now() >= deadline;
  }
};

struct Candidate {
  Witnesses programs;
  std::string origin;
  SynthParams params;
};

/// GaveUp: the strategy cannot search this shape (too large, unsupported
/// opcodes); it sits out until the parameters change.
enum class StepStatus : std::uint8_t { Found, Exhausted, Continue, GaveUp };

class SynthStrategy {
public:
  virtual ~SynthStrategy() = default;
  virtual std::string name() const = 0;
  /// True when exhaustion proves that no program of the shape exists.
  virtual bool complete() const = 0;
  /// Searches for at most `budget` units of work. Units are strategy
  /// specific: candidates, SAT conflicts or generations.
  virtual StepStatus step(const SynthContext &ctx, std::uint64_t budget,
                          Candidate &out) = 0;
};

} // namespace sosat
