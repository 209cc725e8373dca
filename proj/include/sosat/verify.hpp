//===- verify.hpp - Counterexample search and constant generalization ----===//
#pragma once

#include "sosat/sat.hpp"
#include "sosat/synth.hpp"

namespace sosat {

enum class CexOrder : std::uint8_t { Counting, RandomThenExhaustive };

struct VerifyConfig {
  /// Explicit search handles instances with at most this many input bits on
  /// its own; larger ones get random probes and then the SAT encoding.
  unsigned explicitMaxBits = 24;
  std::uint64_t randomProbes = 1024;
  CexOrder order = CexOrder::RandomThenExhaustive;
  std::uint64_t seed = 1;
  /// Null means the in-process solver.
  sat::SatBackend *backend = nullptr;
  sat::Engine engine = sat::Engine::Cadical;
  const std::atomic<bool> *cancel = nullptr;
  sat::Clock::time_point deadline = sat::Clock::time_point::max();
};

enum class VerifyOutcome : std::uint8_t { Valid, Counterexample, Unknown };

struct VerifyResult {
  VerifyOutcome outcome = VerifyOutcome::Unknown;
  Assignment cex;
  /// "explicit" or "symbolic": whichever search decided.
  std::string winner;
  std::uint64_t pointsChecked = 0;
};

/// Mixed-radix walk over every assignment at `width` (each universal ranges
/// over its effective width). Returns false after the last one.
bool nextAssignment(const SynthesisInstance &inst, unsigned width,
                    Assignment &a);

VerifyResult findCounterexampleExplicit(const SynthesisInstance &inst,
                                        const CompiledBody &body,
                                        const Witnesses &programs,
                                        unsigned width, const VerifyConfig &cfg);

/// Encodes the negated body with the programs fixed. Throws Unsupported for
/// floating-point bodies or programs.
VerifyResult findCounterexampleSymbolic(const SynthesisInstance &inst,
                                        const CompiledBody &body,
                                        const Witnesses &programs,
                                        unsigned width, const VerifyConfig &cfg);

/// Chooses the search by input size; Unknown when neither can decide in time.
VerifyResult findCounterexample(const SynthesisInstance &inst,
                                const CompiledBody &body,
                                const Witnesses &programs, unsigned width,
                                const VerifyConfig &cfg);

/// Candidate images of a constant `v` found at width `w` when moving to `W`,
/// in rule order with duplicates removed.
std::vector<Word> extensionCandidates(Word v, unsigned w, unsigned W);

struct GeneralizeStats {
  unsigned trials = 0;
  bool capped = false;
};

/// Lifts programs verified at `w` to `W` by rewriting constants through the
/// extension rules; the first combination that verifies at W is returned.
std::optional<Witnesses> generalizeConstants(const SynthesisInstance &inst,
                                             const CompiledBody &body,
                                             const Witnesses &programs,
                                             unsigned w, unsigned W,
                                             const VerifyConfig &cfg,
                                             unsigned trialCap = 64,
                                             GeneralizeStats *stats = nullptr);

} // namespace sosat
