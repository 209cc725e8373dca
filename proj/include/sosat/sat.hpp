//===- sat.hpp - CDCL SAT solver and CNF plumbing ------------------------===//
//
// The builtin engine is a conflict-driven clause-learning solver in the
// MiniSat mould: two watched literals, first-UIP learning with recursive
// minimisation, VSIDS, phase saving, Luby restarts and LBD-guided learnt-clause
// reduction. It is incremental: clauses may be added between solve() calls and
// learnt clauses are kept. The default engine wraps CaDiCaL behind the same
// interface.
//
//===----------------------------------------------------------------------===//
#pragma once

#include "sosat/error.hpp"

#include <atomic>
#include <chrono>
#include <memory>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sosat::sat {

using Var = std::int32_t;

struct Lit {
  std::uint32_t x = 0;

  static Lit make(Var v, bool negated = false) {
    return Lit{(static_cast<std::uint32_t>(v) << 1) | (negated ? 1u : 0u)};
  }
  Var var() const { return static_cast<Var>(x >> 1); }
  bool negated() const { return x & 1; }
  Lit operator~() const { return Lit{x ^ 1u}; }
  Lit operator^(bool flip) const { return Lit{x ^ (flip ? 1u : 0u)}; }
  bool operator==(const Lit &) const = default;
  auto operator<=>(const Lit &) const = default;
};

enum class Result : std::uint8_t { Sat, Unsat, Unknown };

using Clock = std::chrono::steady_clock;

struct Limits {
  /// Conflicts allowed in this call; negative means unlimited.
  std::int64_t conflicts = -1;
  const std::atomic<bool> *cancel = nullptr;
  Clock::time_point deadline = Clock::time_point::max();
};

struct Stats {
  std::uint64_t conflicts = 0;
  std::uint64_t decisions = 0;
  std::uint64_t propagations = 0;
  std::uint64_t restarts = 0;
};

/// What the encoders and strategies need from an incremental SAT engine.
class IncrementalSolver {
public:
  virtual ~IncrementalSolver() = default;
  virtual Var newVar() = 0;
  virtual std::size_t numVars() const = 0;
  virtual bool addClause(std::span<const Lit> lits) = 0;
  virtual Result solve(std::span<const Lit> assumptions,
                       const Limits &limits) = 0;
  virtual bool modelValue(Var v) const = 0;
  /// Conflicts over the solver's lifetime.
  virtual std::uint64_t conflicts() const = 0;
};

enum class Engine : std::uint8_t { Builtin, Cadical };

std::unique_ptr<IncrementalSolver> makeSolver(Engine engine);
std::string_view engineName(Engine engine);
std::optional<Engine> engineFromName(std::string_view name);

class Solver final : public IncrementalSolver {
public:
  Solver();
  ~Solver() override;
  Solver(const Solver &) = delete;
  Solver &operator=(const Solver &) = delete;

  Var newVar() override;
  std::size_t numVars() const override { return assigns_.size(); }
  std::size_t numClauses() const { return clauses_.size(); }
  std::size_t numLearnts() const { return learnts_.size(); }

  /// Adds a clause at decision level 0. Returns false once the clause set is
  /// known to be unsatisfiable.
  bool addClause(std::span<const Lit> lits) override;
  bool addClause(std::initializer_list<Lit> lits) {
    return addClause(std::span<const Lit>(lits.begin(), lits.size()));
  }

  Result solve(std::span<const Lit> assumptions, const Limits &limits) override;
  Result solve(std::span<const Lit> assumptions = {}) {
    return solve(assumptions, Limits{});
  }

  /// Valid after solve() returned Sat.
  bool modelValue(Var v) const override {
    return model_[static_cast<std::size_t>(v)];
  }
  bool modelValue(Lit l) const { return modelValue(l.var()) != l.negated(); }

  bool okay() const { return ok_; }
  const Stats &stats() const { return stats_; }
  std::uint64_t conflicts() const override { return stats_.conflicts; }

private:
  using CRef = std::uint32_t;
  static constexpr CRef kNoReason = 0xFFFFFFFFu;

  struct Watcher {
    CRef cref;
    Lit blocker;
  };

  // Clause arena layout: [size][flags|lbd][activity bits][lits...]
  std::uint32_t &csize(CRef c) { return arena_[c]; }
  std::uint32_t csize(CRef c) const { return arena_[c]; }
  bool learnt(CRef c) const { return arena_[c + 1] & 1u; }
  bool deleted(CRef c) const { return arena_[c + 1] & 2u; }
  void markDeleted(CRef c) { arena_[c + 1] |= 2u; }
  std::uint32_t lbd(CRef c) const { return arena_[c + 1] >> 2; }
  void setLbd(CRef c, std::uint32_t v) {
    arena_[c + 1] = (arena_[c + 1] & 3u) | (v << 2);
  }
  float &activity(CRef c) { return reinterpret_cast<float &>(arena_[c + 2]); }
  Lit *lits(CRef c) { return reinterpret_cast<Lit *>(&arena_[c + 3]); }
  const Lit *lits(CRef c) const {
    return reinterpret_cast<const Lit *>(&arena_[c + 3]);
  }

  CRef allocClause(std::span<const Lit> lits, bool learnt);
  void attach(CRef c);
  void detachAll();
  void removeClause(CRef c);
  bool locked(CRef c) const;

  // 0 = true, 1 = false, 2 = undef
  std::uint8_t value(Lit l) const {
    std::uint8_t a = assigns_[static_cast<std::size_t>(l.var())];
    return a == 2 ? 2 : static_cast<std::uint8_t>(a ^ (l.negated() ? 1 : 0));
  }
  int level(Var v) const { return level_[static_cast<std::size_t>(v)]; }
  int decisionLevel() const { return static_cast<int>(trailLim_.size()); }

  void enqueue(Lit l, CRef reason);
  CRef propagate();
  void analyze(CRef confl, std::vector<Lit> &learnt, int &btLevel,
               std::uint32_t &lbdOut);
  bool litRedundant(Lit p, std::uint32_t abstractLevels);
  std::uint32_t abstractLevel(Var v) const {
    return 1u << (static_cast<std::uint32_t>(level(v)) & 31u);
  }
  void cancelUntil(int lvl);
  Lit pickBranch();
  void reduceDb();
  void simplifyDb();
  void garbageCollect();
  Result search(std::int64_t maxConflicts, const Limits &limits,
                std::int64_t &budgetLeft);

  // VSIDS heap
  void heapInsert(Var v);
  void heapUp(std::size_t i);
  void heapDown(std::size_t i);
  Var heapPop();
  bool heapContains(Var v) const {
    return heapIndex_[static_cast<std::size_t>(v)] >= 0;
  }
  void bumpVar(Var v);
  void bumpClause(CRef c);

  std::vector<std::uint32_t> arena_;
  std::size_t wasted_ = 0;
  std::vector<CRef> clauses_;
  std::vector<CRef> learnts_;
  std::vector<std::vector<Watcher>> watches_;

  std::vector<std::uint8_t> assigns_;
  std::vector<int> level_;
  std::vector<CRef> reason_;
  std::vector<std::uint8_t> polarity_;
  std::vector<double> varAct_;
  std::vector<std::uint8_t> seen_;
  std::vector<Lit> trail_;
  std::vector<int> trailLim_;
  std::size_t qhead_ = 0;

  std::vector<Var> heap_;
  std::vector<int> heapIndex_;

  std::vector<bool> model_;
  std::vector<Lit> assumptions_;
  std::vector<Lit> analyzeStack_;
  std::vector<Lit> analyzeToClear_;
  std::vector<std::uint32_t> lbdStamp_;
  std::uint32_t lbdCounter_ = 0;

  double varInc_ = 1.0;
  double varDecay_ = 0.95;
  float clauseInc_ = 1.0f;
  float clauseDecay_ = 0.999f;
  double maxLearnts_ = 0;
  std::uint64_t nextReduce_ = 2000;
  int simpTrail_ = -1;
  bool ok_ = true;
  Stats stats_;
};

// ---------------------------------------------------------------------------
// CNF as plain data, with DIMACS import/export and pluggable backends.

struct CnfFormula {
  unsigned numVars = 0;
  /// DIMACS-style literals: +v / -v with v in [1, numVars].
  std::vector<std::vector<int>> clauses;

  void addClause(std::vector<int> c) { clauses.push_back(std::move(c)); }
};

std::string toDimacs(const CnfFormula &cnf);
CnfFormula parseDimacs(std::string_view text);

/// Parses solver output: an "s SATISFIABLE"/"s UNSATISFIABLE" line and "v"
/// lines. Returns the model (index v-1 holds variable v) or nullopt for unsat.
/// Throws BackendUnavailable when no status line is present.
std::optional<std::vector<bool>> parseModel(std::string_view text,
                                            unsigned numVars);

class SatBackend {
public:
  virtual ~SatBackend() = default;
  /// nullopt means unsatisfiable. Throws BackendTimeout when the deadline
  /// passes first.
  virtual std::optional<std::vector<bool>>
  solve(const CnfFormula &cnf, Clock::time_point deadline) = 0;
  virtual std::string name() const = 0;
};

class BuiltinBackend final : public SatBackend {
public:
  std::optional<std::vector<bool>> solve(const CnfFormula &cnf,
                                         Clock::time_point deadline) override;
  std::string name() const override { return "builtin"; }
};

/// Runs an external DIMACS solver as a subprocess: `path <cnf-file>`.
class ExternalBackend final : public SatBackend {
public:
  explicit ExternalBackend(std::string path) : path_(std::move(path)) {}
  std::optional<std::vector<bool>> solve(const CnfFormula &cnf,
                                         Clock::time_point deadline) override;
  std::string name() const override { return path_; }

private:
  std::string path_;
};

} // namespace sosat::sat
