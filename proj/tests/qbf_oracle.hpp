// Game-tree evaluation of small closed QBFs, written against the expression
// tree directly so it shares nothing with the solver's evaluator.
#pragma once

#include "sosat/encodings.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

namespace qbf_oracle {

using namespace sosat;

inline bool truth(const ExprPtr &e, const std::map<std::string, bool> &env);

inline bool value(const ExprPtr &e, const std::map<std::string, bool> &env) {
  switch (e->kind) {
  case ExprKind::Literal:
    return (e->value & 1) != 0;
  case ExprKind::Var:
    return env.at(e->name);
  case ExprKind::Bool:
    return truth(e, env);
  case ExprKind::Op: {
    const auto &c = e->children;
    switch (e->op) {
    case Opcode::And:
      return value(c[0], env) && value(c[1], env);
    case Opcode::Or:
      return value(c[0], env) || value(c[1], env);
    case Opcode::Xor:
    case Opcode::Neq:
      return value(c[0], env) != value(c[1], env);
    case Opcode::Eq:
      return value(c[0], env) == value(c[1], env);
    case Opcode::Not:
      return !value(c[0], env);
    default:
      break;
    }
    break;
  }
  default:
    break;
  }
  throw std::logic_error("not a propositional matrix");
}

inline bool truth(const ExprPtr &e, const std::map<std::string, bool> &env) {
  if (e->kind != ExprKind::Bool)
    return value(e, env);
  const auto &c = e->children;
  switch (e->boolOp) {
  case BoolOp::And:
    return std::all_of(c.begin(), c.end(),
                       [&](const ExprPtr &k) { return truth(k, env); });
  case BoolOp::Or:
    return std::any_of(c.begin(), c.end(),
                       [&](const ExprPtr &k) { return truth(k, env); });
  case BoolOp::Not:
    return !truth(c[0], env);
  case BoolOp::Implies:
    return !truth(c[0], env) || truth(c[1], env);
  case BoolOp::Iff:
    return truth(c[0], env) == truth(c[1], env);
  }
  return false;
}

inline bool evaluate(const QbfFormula &q, std::size_t level,
                     std::map<std::string, bool> &env) {
  if (level == q.prefix.size())
    return truth(q.matrix, env);
  const auto &[quant, name] = q.prefix[level];
  bool results[2];
  for (int b = 0; b < 2; ++b) {
    env[name] = b != 0;
    results[b] = evaluate(q, level + 1, env);
  }
  return quant == Quantifier::Forall ? results[0] && results[1]
                                     : results[0] || results[1];
}

inline bool evaluate(const QbfFormula &q) {
  std::map<std::string, bool> env;
  return evaluate(q, 0, env);
}

/// The matrix with the given truth table over `vars`; bit k of `table` is the
/// value at the assignment whose i-th variable is bit i of k.
inline ExprPtr fromTable(const std::vector<std::string> &vars,
                         std::uint64_t table) {
  std::vector<ExprPtr> minterms;
  for (std::uint64_t k = 0; k < (std::uint64_t{1} << vars.size()); ++k) {
    if (!((table >> k) & 1))
      continue;
    std::vector<ExprPtr> lits;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      auto v = ex::var(vars[i]);
      lits.push_back((k >> i) & 1 ? v : ex::bnot(v));
    }
    minterms.push_back(ex::band(std::move(lits)));
  }
  if (minterms.empty())
    return ex::lit(0);
  return ex::bor(std::move(minterms));
}

/// Every prefix order and quantifier choice over `n` variables.
inline std::vector<std::vector<std::pair<Quantifier, std::string>>>
allPrefixes(unsigned n) {
  std::vector<std::string> names;
  for (unsigned i = 0; i < n; ++i)
    names.push_back("q" + std::to_string(i));
  std::vector<std::vector<std::pair<Quantifier, std::string>>> out;
  std::vector<unsigned> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  do {
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      std::vector<std::pair<Quantifier, std::string>> p;
      for (unsigned i = 0; i < n; ++i)
        p.push_back({(mask >> i) & 1 ? Quantifier::Exists : Quantifier::Forall,
                     names[perm[i]]});
      out.push_back(std::move(p));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

inline QbfFormula random(std::mt19937_64 &rng, unsigned n) {
  const auto prefixes = allPrefixes(n);
  QbfFormula q;
  q.prefix = prefixes[rng() % prefixes.size()];
  std::vector<std::string> vars;
  for (unsigned i = 0; i < n; ++i)
    vars.push_back("q" + std::to_string(i));
  q.matrix = fromTable(vars, rng() & ((std::uint64_t{1} << (1u << n)) - 1));
  return q;
}

} // namespace qbf_oracle
