//===- symbolic.hpp - SAT encoding of the synthesis query ----------------===//
//
// A program skeleton has, per instruction slot, a one-hot opcode selector and
// binary operand selectors over the slot's operand domain
//   [const 0 .. c-1, input 0 .. k-1, temp 0 .. j-1]
// which is numbered in the canonical operand order, so "commutative operands
// are ordered" is a plain unsigned comparison of selectors. Constant-table
// entries are free w-bit words. Each stored input instantiates the body once,
// with every application expanded into a copy of the skeleton's datapath.
//
//===----------------------------------------------------------------------===//
#pragma once

#include "sosat/bitblast.hpp"
#include "sosat/synth.hpp"

#include <functional>
#include <map>
#include <memory>

namespace sosat {

struct SlotSelectors {
  std::vector<Lit> opcode; // one-hot, aligned with ProgramSkeletonVars::opcodes
  std::array<Bits, 3> operand;
};

struct FunctionSkeleton {
  unsigned arity = 0;
  unsigned outCount = 1;
  std::vector<Bits> constants;
  std::vector<SlotSelectors> slots;
};

struct ProgramSkeletonVars {
  unsigned width = 0;
  std::vector<Opcode> opcodes;
  std::vector<FunctionSkeleton> functions;
};

using AppBlaster = std::function<Bits(std::uint32_t fn,
                                      std::span<const Bits> args,
                                      std::uint32_t projection)>;

/// The body as a single literal. `vars` holds one width-bit vector per
/// universal; narrow variables must already have their high bits false.
Lit blastBody(BitBlaster &bb, const CompiledBody &body, unsigned width,
              std::span<const Bits> vars, const AppBlaster &app);

/// A concrete program applied to symbolic arguments; returns the outputs.
std::vector<Bits> blastProgram(BitBlaster &bb, const Program &p,
                               std::span<const Bits> args);

inline constexpr std::size_t kDefaultClauseCeiling = 4'000'000;

class SynthEncoder {
public:
  SynthEncoder(const SynthesisInstance &inst, const CompiledBody &body,
               const Shape &shape, unsigned width,
               std::span<const Opcode> opcodes, ClauseSink &sink,
               std::size_t clauseCeiling = kDefaultClauseCeiling);

  /// Constrains the skeleton to satisfy the body at `a`.
  void addInput(const Assignment &a);
  const ProgramSkeletonVars &skeleton() const { return sk_; }
  std::size_t clauses() const { return sink_.count; }

private:
  struct CountingSink final : ClauseSink {
    ClauseSink *inner = nullptr;
    std::size_t count = 0;
    std::size_t ceiling = 0;
    sat::Var newVar() override { return inner->newVar(); }
    void addClause(std::span<const Lit> lits) override;
  };

  void buildSkeleton(const Shape &shape);
  void wellFormed(const FunctionSkeleton &f);
  std::vector<Bits> instantiate(std::uint32_t fn, std::span<const Bits> args);

  const CompiledBody &body_;
  unsigned width_;
  CountingSink sink_;
  BitBlaster bb_;
  ProgramSkeletonVars sk_;
  std::vector<std::map<std::vector<std::uint32_t>, std::vector<Bits>>> memo_;
};

struct SynthEncoding {
  sat::CnfFormula cnf;
  ProgramSkeletonVars skeleton;
};

/// The whole query as plain CNF: satisfiable iff some canonical program tuple
/// of `shape` satisfies the body on every input.
SynthEncoding encodeSynth(const SynthesisInstance &inst,
                          const CompiledBody &body, const Shape &shape,
                          unsigned width, std::span<const Opcode> opcodes,
                          std::span<const Assignment> inputs,
                          std::size_t clauseCeiling = kDefaultClauseCeiling);

/// Reads programs out of a model (index = SAT variable).
Witnesses decodeModel(const std::vector<bool> &model,
                      const ProgramSkeletonVars &skeleton);

/// Throws DecodeMismatch unless every program validates, is canonical and
/// the tuple satisfies the body on every input.
void checkDecoded(const SynthesisInstance &inst, const CompiledBody &body,
                  const Witnesses &programs, unsigned width,
                  std::span<const Assignment> inputs);

struct SymbolicConfig {
  std::size_t clauseCeiling = kDefaultClauseCeiling;
  /// Null means the in-process incremental solver.
  sat::SatBackend *backend = nullptr;
  sat::Engine engine = sat::Engine::Cadical;
  /// Drop div/mod from the opcode set above this width (0 = never).
  unsigned divWidthLimit = 0;
};

class SymbolicStrategy final : public SynthStrategy {
public:
  explicit SymbolicStrategy(SymbolicConfig cfg = {});
  ~SymbolicStrategy() override;

  std::string name() const override { return "symbolic"; }
  bool complete() const override { return cfg_.divWidthLimit == 0; }
  StepStatus step(const SynthContext &ctx, std::uint64_t budget,
                  Candidate &out) override;

private:
  struct State;
  SymbolicConfig cfg_;
  std::unique_ptr<State> s_;
};

} // namespace sosat
