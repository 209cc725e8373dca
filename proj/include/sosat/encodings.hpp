//===- encodings.hpp - Reductions from analysis problems to formulas -----===//
//
// Loops are given relationally: an initial-state predicate I over the state
// variables x, a guard G over x and a transition relation B over x and the
// primed copies x'. A primed variable is spelled with a trailing quote.
//
//===----------------------------------------------------------------------===//
#pragma once

#include "sosat/formula.hpp"

#include <filesystem>

namespace sosat {

struct LoopSystem {
  unsigned width = 8;
  std::vector<VarDecl> vars;
  ExprPtr init, guard, body;
  /// Only used by the safety encoding; absent means "true".
  ExprPtr assertion;
};

std::string primed(std::string_view name);

/// Throws UnknownSymbol when I, G or A mention anything but state variables,
/// or B anything but state variables and their primed copies.
void checkLoop(const LoopSystem &loop);

/// (width N)(loop (vars x (y 4)) (init E) (guard E) (body E) [(assert E)])
LoopSystem parseLoop(std::string_view text);

/// exists S. forall x x'.
///   I(x) -> S(x)  and  S(x) & G(x) & B(x,x') -> S(x')  and  S(x) & !G(x) -> A(x)
SOSFormula encodeSafety(const LoopSystem &loop, const ExprPtr &assertion);

/// exists R W. forall x x'.
///   I(x) & G(x) -> W(x)  and
///   G(x) & W(x) & B(x,x') -> W(x') & R(x) > 0 & R(x) > R(x')
/// with unsigned comparisons, so the order on ranks is well founded.
SOSFormula encodeTermination(const LoopSystem &loop);

/// exists N C x0. forall x.
///   N(x0)  and  N(x) -> G(x)  and  N(x) -> B(x, C(x)) & N(C(x))
/// C maps the state tuple to a successor tuple; x0 is one nullary symbol per
/// state variable, named x0_<var>.
SOSFormula encodeNontermination(const LoopSystem &loop);

struct QbfFormula {
  std::vector<std::pair<Quantifier, std::string>> prefix;
  /// Propositional over the prefix variables, read at width 1.
  ExprPtr matrix;
};

/// The closed QBF as a width-1 formula; existentials become Skolem symbols
/// when the result is skolemized.
SOSFormula encodeQbf(const QbfFormula &q);

/// Dual prefix and negated matrix.
QbfFormula negateQbf(const QbfFormula &q);

/// Standard QDIMACS. Variables named v<k>; variables missing from the prefix
/// are bound existentially outermost.
QbfFormula parseQdimacs(std::string_view text);

/// exists P. forall inputs. P(inputs) = reference, one equation per output.
SOSFormula encodeSuperopt(const std::vector<ExprPtr> &reference,
                          const std::vector<VarDecl> &inputs, unsigned width);
/// Inputs are named x0, x1, ... after the program's arity.
SOSFormula encodeSuperopt(const Program &reference);

/// The program as expressions over variables x0, x1, ..., one per output.
std::vector<ExprPtr> programExprs(const Program &p);

enum class CaseStatus : std::uint8_t { Solved, KnownHard };

struct BenchmarkCase {
  std::string id;
  std::string title;
  /// Empty for known-hard cases without a formula.
  std::filesystem::path file;
  std::optional<SOSFormula> formula;
  std::optional<Program> reference;
  std::optional<unsigned> referenceLength;
  CaseStatus status = CaseStatus::Solved;
  bool enableShl = false;
};

/// Reads manifest.json and the formula files it names.
std::vector<BenchmarkCase> loadCorpus(const std::filesystem::path &dir);

} // namespace sosat
