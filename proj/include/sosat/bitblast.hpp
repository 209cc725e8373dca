//===- bitblast.hpp - Word-level circuits to CNF -------------------------===//
//
// Gates are Tseitin-encoded as they are created, with constant folding and
// structural hashing, so identical sub-circuits (e.g. two applications of
// one skeleton to the same arguments) cost nothing extra.
//
//===----------------------------------------------------------------------===//
#pragma once

#include "sosat/lang.hpp"
#include "sosat/sat.hpp"

#include <unordered_map>

namespace sosat {

using sat::Lit;

/// Where the clauses go: the in-process solver or a CNF buffer.
class ClauseSink {
public:
  virtual ~ClauseSink() = default;
  virtual sat::Var newVar() = 0;
  virtual void addClause(std::span<const Lit> lits) = 0;
};

class SolverSink final : public ClauseSink {
public:
  explicit SolverSink(sat::IncrementalSolver &s) : s_(s) {}
  sat::Var newVar() override { return s_.newVar(); }
  void addClause(std::span<const Lit> lits) override { s_.addClause(lits); }

private:
  sat::IncrementalSolver &s_;
};

class CnfSink final : public ClauseSink {
public:
  explicit CnfSink(sat::CnfFormula &f) : f_(f) {}
  sat::Var newVar() override { return static_cast<sat::Var>(f_.numVars++); }
  void addClause(std::span<const Lit> lits) override;

private:
  sat::CnfFormula &f_;
};

using Bits = std::vector<Lit>;

class BitBlaster {
public:
  explicit BitBlaster(ClauseSink &sink);

  Lit t() const { return true_; }
  Lit f() const { return ~true_; }
  Lit fresh() { return Lit::make(sink_.newVar()); }
  std::optional<bool> constValue(Lit l) const {
    if (l == true_)
      return true;
    if (l == ~true_)
      return false;
    return std::nullopt;
  }
  void assertLit(Lit l) { sink_.addClause({&l, 1}); }
  void addClause(std::span<const Lit> lits) { sink_.addClause(lits); }

  Lit mkAnd(Lit a, Lit b);
  Lit mkOr(Lit a, Lit b) { return ~mkAnd(~a, ~b); }
  Lit mkXor(Lit a, Lit b);
  Lit mkIte(Lit c, Lit a, Lit b);
  Lit mkAnd(std::span<const Lit> ls);
  Lit mkOr(std::span<const Lit> ls);

  Bits constant(Word v, unsigned w) const;
  Bits freshBits(unsigned w);
  std::optional<Word> constWord(const Bits &b) const;

  Bits mux(Lit c, const Bits &a, const Bits &b);
  Lit nonzero(const Bits &a);
  Lit equal(const Bits &a, const Bits &b);
  Lit ult(const Bits &a, const Bits &b);
  Lit slt(const Bits &a, const Bits &b);
  Bits add(const Bits &a, const Bits &b, Lit carryIn);
  Bits sub(const Bits &a, const Bits &b);
  Bits neg(const Bits &a);
  Bits mul(const Bits &a, const Bits &b);
  /// Unsigned restoring division; b = 0 gives q = all-ones, r = a.
  std::pair<Bits, Bits> udivrem(const Bits &a, const Bits &b);
  Bits shift(Opcode op, const Bits &a, const Bits &amount);

  /// Bit-level semantics of `op`, matching evalInstruction exactly.
  /// Throws Unsupported for floating-point opcodes.
  Bits op(Opcode op, std::span<const Bits> args);

  std::size_t gateCount() const { return gates_; }

private:
  struct Key {
    std::uint32_t kind, a, b, c;
    bool operator==(const Key &) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key &k) const {
      std::uint64_t h = k.kind;
      h = h * 0x9E3779B97F4A7C15ull ^ k.a;
      h = h * 0x9E3779B97F4A7C15ull ^ k.b;
      h = h * 0x9E3779B97F4A7C15ull ^ k.c;
      return static_cast<std::size_t>(h ^ (h >> 29));
    }
  };

  void clause(std::initializer_list<Lit> ls) {
    sink_.addClause(std::span<const Lit>(ls.begin(), ls.size()));
  }
  Bits signedDivRem(const Bits &a, const Bits &b, bool wantRem);

  ClauseSink &sink_;
  Lit true_;
  std::unordered_map<Key, Lit, KeyHash> cache_;
  std::size_t gates_ = 0;
};

} // namespace sosat
