#include "sosat/sat.hpp"

#include <cadical.hpp>

namespace sosat::sat {

namespace {

int toExternal(Lit l) {
  const int v = static_cast<int>(l.var()) + 1;
  return l.negated() ? -v : v;
}

class Cadical final : public IncrementalSolver, CaDiCaL::Terminator,
                      CaDiCaL::Learner {
public:
  Cadical() {
    s_.connect_terminator(this);
    s_.connect_learner(this);
  }
  ~Cadical() override {
    s_.disconnect_terminator();
    s_.disconnect_learner();
  }

  Var newVar() override {
    const Var v = static_cast<Var>(vars_++);
    if (vars_ > reserved_) {
      reserved_ = std::max<std::size_t>(1024, 2 * reserved_);
      s_.reserve(static_cast<int>(reserved_));
    }
    return v;
  }
  std::size_t numVars() const override { return vars_; }

  bool addClause(std::span<const Lit> lits) override {
    for (Lit l : lits)
      s_.add(toExternal(l));
    s_.add(0);
    return true;
  }

  Result solve(std::span<const Lit> assumptions,
               const Limits &limits) override {
    limits_ = &limits;
    for (Lit l : assumptions)
      s_.assume(toExternal(l));
    if (limits.conflicts >= 0)
      s_.limit("conflicts",
               static_cast<int>(std::min<std::int64_t>(limits.conflicts,
                                                       1 << 30)));
    const int r = s_.solve();
    limits_ = nullptr;
    model_.clear();
    if (r == 10) {
      model_.resize(vars_);
      for (std::size_t v = 0; v < vars_; ++v)
        model_[v] = s_.val(static_cast<int>(v) + 1) > 0;
      return Result::Sat;
    }
    return r == 20 ? Result::Unsat : Result::Unknown;
  }

  bool modelValue(Var v) const override {
    return model_[static_cast<std::size_t>(v)];
  }
  std::uint64_t conflicts() const override { return learnt_; }

private:
  bool terminate() override {
    if (!limits_)
      return false;
    if (limits_->cancel && limits_->cancel->load(std::memory_order_relaxed))
      return true;
    return limits_->deadline != Clock::time_point::max() &&
           Clock::now() >= limits_->deadline;
  }
  // Every conflict learns one clause, so this doubles as a conflict counter.
  bool learning(int) override {
    ++learnt_;
    return false;
  }
  void learn(int) override {}

  CaDiCaL::Solver s_;
  std::size_t vars_ = 0;
  std::size_t reserved_ = 0;
  const Limits *limits_ = nullptr;
  std::vector<bool> model_;
  std::uint64_t learnt_ = 0;
};

} // namespace

std::unique_ptr<IncrementalSolver> makeSolver(Engine engine) {
  if (engine == Engine::Builtin)
    return std::make_unique<Solver>();
  return std::make_unique<Cadical>();
}

std::string_view engineName(Engine engine) {
  return engine == Engine::Builtin ? "builtin" : "cadical";
}

std::optional<Engine> engineFromName(std::string_view name) {
  if (name == "builtin")
    return Engine::Builtin;
  if (name == "cadical")
    return Engine::Cadical;
  return std::nullopt;
}

} // namespace sosat::sat
