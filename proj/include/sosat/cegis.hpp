//===- cegis.hpp - The refinement loop and its parameter walk ------------===//
//
// SYNTH proposes programs of shape (l, c, w) that agree with the body on the
// stored inputs; VERIF either accepts them or returns a new input. While the
// synthesis width w is below the target width, a verified candidate is lifted
// by constant generalization; if that fails w grows. A failed SYNTH moves the
// shape: c grows up to l, then l grows and c resets. Past the 2^n bound the
// instance is unsatisfiable.
//
//===----------------------------------------------------------------------===//
#pragma once

#include "sosat/gp.hpp"
#include "sosat/symbolic.hpp"
#include "sosat/verify.hpp"

#include <map>
#include <ostream>

namespace sosat {

enum class Verdict : std::uint8_t { Sat, Unsat, Unknown };
enum class UnknownReason : std::uint8_t {
  None,
  Timeout,
  Cap,
  Unsupported,
  Cancelled
};

std::string_view verdictName(Verdict v);
std::string_view reasonName(UnknownReason r);

struct SolverConfig {
  bool useExplicit = true;
  bool useSymbolic = true;
  bool useGp = true;
  /// Round-robin with fixed budgets and no timing in the run log.
  bool deterministic = false;
  std::uint64_t seed = 1;
  double timeoutSeconds = 60;
  /// Optional cap on l below the 2^n bound; exceeding it yields UNKNOWN(cap).
  std::optional<std::uint64_t> maxLength;
  std::optional<unsigned> initialWidth;
  /// Overrides the instance width for verification.
  std::optional<unsigned> targetWidth;
  std::optional<unsigned> initialLength;
  bool enableShl = false;
  /// Null means the in-process solver.
  sat::SatBackend *backend = nullptr;
  sat::Engine engine = sat::Engine::Cadical;
  GpConfig gp;
  unsigned explicitMaxBits = 24;
  unsigned generalizeTrials = 64;
  unsigned divWidthLimit = 0;
  // Per-turn budgets in deterministic mode.
  std::uint64_t explicitBudget = 50'000;
  std::uint64_t symbolicBudget = 1'000;
  std::uint64_t gpBudget = 1;
  /// Run log sink, one JSON object per line.
  std::ostream *log = nullptr;
  const std::atomic<bool> *cancel = nullptr;
};

struct SolverStats {
  std::uint64_t iterations = 0;
  std::uint64_t synthCalls = 0;
  std::map<std::string, std::uint64_t> synthWins;
  std::map<std::string, std::uint64_t> verifWins;
  double synthSeconds = 0;
  double verifSeconds = 0;
  double generalizeSeconds = 0;
  unsigned finalL = 0, finalW = 0, finalC = 0;
  std::size_t counterexamples = 0;
  std::size_t minimalSolutionLength = 0;
};

struct SolverResult {
  Verdict verdict = Verdict::Unknown;
  UnknownReason reason = UnknownReason::None;
  std::map<std::string, Program> witnesses;
  SolverStats stats;
};

struct SearchState {
  unsigned l = 1;
  unsigned w = 4;
  unsigned c = 0;
  unsigned targetWidth = 32;
  std::vector<Assignment> inputs;
  std::uint64_t generation = 0;
};

struct LoopOutcome {
  enum Kind : std::uint8_t { SynthFailed, VerifFailed } kind = SynthFailed;
  bool smallWidthOk = false;
  bool generalized = false;
};

/// One step of the parameter walk on (l, w, c).
SearchState nextParams(SearchState s, const LoopOutcome &outcome);

struct StoppingBound {
  std::uint64_t value = 1;
  bool capped = false;
};

/// 2^n for n input bits, saturating, or the cap when that is lower.
StoppingBound stoppingBound(unsigned inputBits,
                            std::optional<std::uint64_t> cap = std::nullopt);
StoppingBound stoppingBound(const SynthesisInstance &inst,
                            std::optional<std::uint64_t> cap = std::nullopt);

SolverResult solve(const SynthesisInstance &inst, const SolverConfig &cfg);

} // namespace sosat
