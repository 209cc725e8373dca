//===- formula.hpp - Second-order formulas and synthesis instances -------===//
//
// An SOSFormula is an existential second-order prefix, a first-order prefix
// and a quantifier-free body over words. Skolemization turns it into a
// SynthesisInstance whose first-order prefix is purely universal.
//
//===----------------------------------------------------------------------===//
#pragma once

#include "sosat/lang.hpp"
#include "sosat/sexpr.hpp"

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sosat {

enum class ExprKind : std::uint8_t { Literal, WidthAtom, Var, Op, Bool, App };

/// Width-generic literals, resolved at the machine width in use.
enum class WidthAtom : std::uint8_t { Width, Ones, SignBit };

enum class BoolOp : std::uint8_t { And, Or, Not, Implies, Iff };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  ExprKind kind = ExprKind::Literal;
  Word value = 0;
  WidthAtom atom = WidthAtom::Width;
  Opcode op = Opcode::Add;
  BoolOp boolOp = BoolOp::And;
  std::string name;
  unsigned projection = 0;
  std::vector<ExprPtr> children;
};

namespace ex {
ExprPtr lit(Word value);
ExprPtr atom(WidthAtom a);
ExprPtr var(std::string name);
ExprPtr op(Opcode op, std::vector<ExprPtr> args);
ExprPtr band(std::vector<ExprPtr> args);
ExprPtr bor(std::vector<ExprPtr> args);
ExprPtr bnot(ExprPtr e);
ExprPtr bimplies(ExprPtr a, ExprPtr b);
ExprPtr biff(ExprPtr a, ExprPtr b);
ExprPtr app(std::string fn, std::vector<ExprPtr> args, unsigned projection = 0);
} // namespace ex

bool structurallyEqual(const ExprPtr &a, const ExprPtr &b);
std::string toString(const ExprPtr &e);

/// Replaces variable references by the mapped expressions.
ExprPtr substitute(const ExprPtr &e, const std::map<std::string, ExprPtr> &vars);

/// Parses a single body expression. Variables and applications are not
/// resolved here; see parseFormula for a checked parse.
ExprPtr parseExpr(const SExpr &s);

struct FunctionSignature {
  std::string name;
  unsigned arity = 0;
  unsigned outCount = 1;
  bool predicate = false;

  bool operator==(const FunctionSignature &) const = default;
};

struct VarDecl {
  std::string name;
  /// Explicit bit width; when empty the variable has the formula width.
  std::optional<unsigned> width;

  /// Effective width on a machine of width `machineWidth`.
  unsigned widthAt(unsigned machineWidth) const {
    return width ? std::min(*width, machineWidth) : machineWidth;
  }

  bool operator==(const VarDecl &) const = default;
};

enum class Quantifier : std::uint8_t { Forall, Exists };

struct QuantifiedVar {
  Quantifier quantifier = Quantifier::Forall;
  VarDecl var;

  bool operator==(const QuantifiedVar &) const = default;
};

struct SOSFormula {
  unsigned width = 32;
  std::vector<FunctionSignature> functions;
  std::vector<QuantifiedVar> prefix;
  ExprPtr body;
};

struct SynthesisInstance {
  unsigned width = 32;
  std::vector<FunctionSignature> functions;
  std::vector<VarDecl> universals;
  ExprPtr body;

  /// Total bits of all universals at the instance width.
  unsigned inputBits() const;
  std::optional<std::size_t> functionIndex(std::string_view name) const;
};

/// A point of the universal domain, aligned with SynthesisInstance::universals.
struct Assignment {
  std::vector<Word> values;

  auto operator<=>(const Assignment &) const = default;
};

/// Throws UnknownSymbol / ArityMismatch / SyntaxError when an invariant fails.
void checkFormula(const SOSFormula &f);

SOSFormula parseFormula(std::string_view text);
/// Builds a formula from already-read top-level forms; unknown forms are
/// reported through `extra` when non-null instead of raising an error.
SOSFormula formulaFromForms(std::span<const SExpr> forms,
                            std::vector<const SExpr *> *extra = nullptr);
std::string printFormula(const SOSFormula &f);

SynthesisInstance skolemize(const SOSFormula &f);

/// The instance as a formula with a purely universal prefix.
SOSFormula toFormula(const SynthesisInstance &inst);

unsigned inputBitCount(const SynthesisInstance &inst);

/// The body flattened into a topologically ordered node array with variables
/// and functions resolved to indices. Shared subtrees are compiled once.
class CompiledBody {
public:
  struct Node {
    ExprKind kind;
    Opcode op;
    BoolOp boolOp;
    WidthAtom atom;
    Word value;
    std::uint32_t index;      // variable or function index
    std::uint32_t projection;
    std::uint32_t firstChild;
    std::uint32_t numChildren;
  };

  CompiledBody(const ExprPtr &body, std::span<const VarDecl> vars,
               std::span<const FunctionSignature> functions);
  explicit CompiledBody(const SynthesisInstance &inst)
      : CompiledBody(inst.body, inst.universals, inst.functions) {}

  std::span<const Node> nodes() const { return nodes_; }
  std::span<const std::uint32_t> children(const Node &n) const {
    return {childIdx_.data() + n.firstChild, n.numChildren};
  }
  std::span<const VarDecl> vars() const { return vars_; }
  std::span<const FunctionSignature> functions() const { return functions_; }
  bool usesFloat() const { return usesFloat_; }

private:
  std::uint32_t compile(const ExprPtr &e,
                        std::map<const Expr *, std::uint32_t> &memo);

  std::vector<Node> nodes_;
  std::vector<std::uint32_t> childIdx_;
  std::vector<VarDecl> vars_;
  std::vector<FunctionSignature> functions_;
  bool usesFloat_ = false;
};

/// Evaluates a compiled body. Holds scratch buffers, so one evaluator per
/// thread.
class BodyEvaluator {
public:
  explicit BodyEvaluator(const CompiledBody &body) : body_(&body) {}

  /// `programs` is indexed like the body's function list.
  bool holds(std::span<const Word> vars,
             std::span<const Program *const> programs, unsigned width);

  /// Generic form: `app(functionIndex, args, projection) -> Word`.
  template <class AppFn>
  bool holdsWith(std::span<const Word> vars, unsigned width, AppFn &&app);

private:
  Word literal(const CompiledBody::Node &n, unsigned width) const;

  const CompiledBody *body_;
  std::vector<Word> values_;
  std::vector<Word> args_;
  std::vector<Word> temps_;
  std::vector<Word> outs_;
};

/// Truth of the body at `assignment`, interpreting each function symbol by
/// its witness program. Throws Error on a signature/width mismatch.
bool evaluateBody(const SynthesisInstance &inst, const Assignment &assignment,
                  const std::map<std::string, Program> &witnesses,
                  unsigned width);

/// Checks that `p` can interpret `sig` at machine width `width`.
void checkWitness(const FunctionSignature &sig, const Program &p,
                  unsigned width);

// ---------------------------------------------------------------------------

template <class AppFn>
bool BodyEvaluator::holdsWith(std::span<const Word> vars, unsigned width,
                              AppFn &&app) {
  const auto nodes = body_->nodes();
  values_.resize(nodes.size());
  const Word m = widthMask(width);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto &n = nodes[i];
    auto kids = body_->children(n);
    Word r = 0;
    switch (n.kind) {
    case ExprKind::Literal:
    case ExprKind::WidthAtom:
      r = literal(n, width);
      break;
    case ExprKind::Var:
      r = vars[n.index] & widthMask(body_->vars()[n.index].widthAt(width));
      break;
    case ExprKind::Op: {
      std::array<Word, 3> a{};
      for (std::size_t k = 0; k < kids.size() && k < 3; ++k)
        a[k] = values_[kids[k]];
      r = evalInstruction(n.op, {a.data(), kids.size()}, width);
      break;
    }
    case ExprKind::Bool:
      switch (n.boolOp) {
      case BoolOp::And:
        r = 1;
        for (auto k : kids)
          if (values_[k] == 0)
            r = 0;
        break;
      case BoolOp::Or:
        r = 0;
        for (auto k : kids)
          if (values_[k] != 0)
            r = 1;
        break;
      case BoolOp::Not:
        r = values_[kids[0]] == 0;
        break;
      case BoolOp::Implies:
        r = values_[kids[0]] == 0 || values_[kids[1]] != 0;
        break;
      case BoolOp::Iff:
        r = (values_[kids[0]] != 0) == (values_[kids[1]] != 0);
        break;
      }
      break;
    case ExprKind::App: {
      args_.resize(kids.size());
      for (std::size_t k = 0; k < kids.size(); ++k)
        args_[k] = values_[kids[k]];
      r = app(n.index, std::span<const Word>(args_), n.projection) & m;
      break;
    }
    }
    values_[i] = r;
  }
  return values_.back() != 0;
}

} // namespace sosat
