#include "sosat/formula.hpp"

#include <gtest/gtest.h>

#include <functional>
#include <random>

using namespace sosat;

namespace {

const char *kSymmetric = R"((width 8)
(exists-fun S (arity 2) (out 1) (predicate))
(forall x1 x2)
(assert (implies (app S x1 x2) (app S x2 x1)))
)";

Program binary(Opcode op, unsigned w) {
  Program p;
  p.arity = 2;
  p.width = w;
  p.body = {Instruction(op, {Operand::input(0), Operand::input(1)})};
  return p;
}

} // namespace

TEST(ParseFormula, SymmetricRelation) {
  SOSFormula f = parseFormula(kSymmetric);
  EXPECT_EQ(f.width, 8u);
  ASSERT_EQ(f.functions.size(), 1u);
  EXPECT_EQ(f.functions[0], (FunctionSignature{"S", 2, 1, true}));
  ASSERT_EQ(f.prefix.size(), 2u);
  EXPECT_EQ(f.prefix[0].quantifier, Quantifier::Forall);
  EXPECT_EQ(f.prefix[1].var.name, "x2");
  auto expect = ex::op(Opcode::Implies,
                       {ex::app("S", {ex::var("x1"), ex::var("x2")}),
                        ex::app("S", {ex::var("x2"), ex::var("x1")})});
  EXPECT_TRUE(structurallyEqual(f.body, expect));
}

TEST(ParseFormula, Errors) {
  EXPECT_THROW(parseFormula("(width 8)(forall x)(assert (app T x))"),
               UnknownSymbol);
  EXPECT_THROW(parseFormula("(width 8)(forall x)(assert (eq x y))"),
               UnknownSymbol);
  EXPECT_THROW(parseFormula("(width 8)(exists-fun S (arity 2))(forall x)"
                            "(assert (app S x))"),
               ArityMismatch);
  EXPECT_THROW(parseFormula("(width 8)(forall x)(assert (add x))"),
               ArityMismatch);
  EXPECT_THROW(parseFormula("(width 8)(exists-fun S (arity 1) (out 2))"
                            "(forall x)(assert (app (S 2) x))"),
               ArityMismatch);
  EXPECT_THROW(parseFormula("(width 8)(forall x)(assert (eq x 1)"), SyntaxError);
  EXPECT_THROW(parseFormula("(width 8)(bogus)"), SyntaxError);
}

TEST(ParseFormula, RoundTrip) {
  const char *texts[] = {
      kSymmetric,
      "(width 4)(exists-fun C (arity 2) (out 2))(forall a (b 3))(exists y)"
      "(assert (band (eq (app (C 1) a b) y) (bnot (biff true false))))",
      "(width 32)(forall x)(assert (bor (eq x #ones) (slt x #signbit) "
      "(le x #width) (eq 0x10 16)))",
  };
  for (const char *t : texts) {
    SOSFormula f = parseFormula(t);
    SOSFormula g = parseFormula(printFormula(f));
    EXPECT_EQ(f.width, g.width);
    EXPECT_EQ(f.functions, g.functions);
    EXPECT_EQ(f.prefix, g.prefix);
    EXPECT_TRUE(structurallyEqual(f.body, g.body)) << printFormula(f);
  }
}

TEST(Skolemize, ExistsAfterForall) {
  SOSFormula f = parseFormula("(width 8)(exists-fun S (arity 2))"
                              "(forall x)(exists y)(assert (app S x y))");
  SynthesisInstance inst = skolemize(f);
  ASSERT_EQ(inst.functions.size(), 2u);
  EXPECT_EQ(inst.functions[1].name, "F_y");
  EXPECT_EQ(inst.functions[1].arity, 1u);
  ASSERT_EQ(inst.universals.size(), 1u);
  auto expect =
      ex::app("S", {ex::var("x"), ex::app("F_y", {ex::var("x")})});
  EXPECT_TRUE(structurallyEqual(inst.body, expect)) << toString(inst.body);
}

TEST(Skolemize, NoExistentialIsIdentity) {
  SOSFormula f = parseFormula(kSymmetric);
  SynthesisInstance inst = skolemize(f);
  EXPECT_EQ(inst.functions, f.functions);
  EXPECT_EQ(inst.body, f.body);
  EXPECT_EQ(inst.universals.size(), 2u);
}

TEST(Skolemize, LeadingExistentialIsConstant) {
  SOSFormula f = parseFormula("(width 8)(exists y)(forall x)(assert (le x y))");
  SynthesisInstance inst = skolemize(f);
  ASSERT_EQ(inst.functions.size(), 1u);
  EXPECT_EQ(inst.functions[0].arity, 0u);
}

TEST(Skolemize, FreshNameAvoidsClash) {
  SOSFormula f = parseFormula("(width 8)(exists-fun F_y (arity 0))"
                              "(exists y)(assert (eq y (app F_y)))");
  SynthesisInstance inst = skolemize(f);
  ASSERT_EQ(inst.functions.size(), 2u);
  EXPECT_NE(inst.functions[1].name, "F_y");
}

TEST(EvaluateBody, SymmetricRelation) {
  SynthesisInstance inst = skolemize(parseFormula(kSymmetric));
  std::map<std::string, Program> eq{{"S", binary(Opcode::Eq, 8)}};
  EXPECT_TRUE(evaluateBody(inst, {{3, 3}}, eq, 8));
  std::map<std::string, Program> lt{{"S", binary(Opcode::Lt, 8)}};
  EXPECT_FALSE(evaluateBody(inst, {{1, 2}}, lt, 8));
}

TEST(EvaluateBody, TrueLiteral) {
  SynthesisInstance inst =
      skolemize(parseFormula("(width 8)(forall x)(assert true)"));
  for (Word x : {0u, 7u, 255u})
    EXPECT_TRUE(evaluateBody(inst, {{x}}, {}, 8));
}

TEST(EvaluateBody, WitnessMismatch) {
  SynthesisInstance inst = skolemize(parseFormula(kSymmetric));
  std::map<std::string, Program> wrongWidth{{"S", binary(Opcode::Eq, 4)}};
  EXPECT_THROW(evaluateBody(inst, {{1, 1}}, wrongWidth, 8), UnsupportedWidth);
  Program unary;
  unary.arity = 1;
  unary.width = 8;
  unary.body = {Instruction(Opcode::Not, {Operand::input(0)})};
  std::map<std::string, Program> wrongArity{{"S", unary}};
  EXPECT_THROW(evaluateBody(inst, {{1, 1}}, wrongArity, 8), ArityMismatch);
}

TEST(EvaluateBody, WidthAtomsAndNarrowVars) {
  SynthesisInstance inst = skolemize(parseFormula(
      "(width 8)(forall (x 3))(assert (band (le x 7) (eq #signbit 128) "
      "(eq #width 8) (eq #ones 255)))"));
  std::map<std::string, Program> none;
  // The narrow variable only sees its low 3 bits.
  EXPECT_TRUE(evaluateBody(inst, {{0xFF}}, none, 8));
  CompiledBody body(inst);
  BodyEvaluator ev(body);
  std::vector<Word> x{5};
  EXPECT_FALSE(ev.holds(x, {}, 4)); // atoms move with the machine width
}

TEST(InputBitCount, Examples) {
  SynthesisInstance a;
  a.width = 8;
  a.universals = {{"p", 1}, {"q", 1}};
  EXPECT_EQ(inputBitCount(a), 2u);
  SynthesisInstance b;
  b.width = 8;
  b.universals = {{"x", std::nullopt}};
  EXPECT_EQ(inputBitCount(b), 8u);
  SynthesisInstance c;
  EXPECT_EQ(inputBitCount(c), 0u);
}

// ---------------------------------------------------------------------------
// Skolemization preserves satisfiability. Both sides are decided by brute
// force over every interpretation of the function symbols as lookup tables.

namespace {

using Table = std::vector<Word>; // indexed by packed arguments

struct Interp {
  std::vector<Table> tables;
};

std::size_t tableSize(unsigned arity, unsigned w) {
  return std::size_t{1} << (arity * w);
}

std::size_t packArgs(std::span<const Word> args, unsigned w) {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < args.size(); ++i)
    idx |= static_cast<std::size_t>(args[i]) << (i * w);
  return idx;
}

// Calls `fn` for every assignment of tables to the given signatures; stops
// early when it returns true. Returns whether any call returned true.
bool forEachInterp(const std::vector<FunctionSignature> &sigs, unsigned w,
                   const std::function<bool(const Interp &)> &fn) {
  Interp in;
  for (const auto &s : sigs)
    in.tables.emplace_back(tableSize(s.arity, w), 0);
  const Word top = widthMask(w);
  for (;;) {
    if (fn(in))
      return true;
    // odometer over all table cells
    std::size_t t = 0, cell = 0;
    for (;;) {
      if (t == in.tables.size())
        return false;
      if (cell == in.tables[t].size()) {
        ++t;
        cell = 0;
        continue;
      }
      if (in.tables[t][cell] < top) {
        ++in.tables[t][cell];
        break;
      }
      in.tables[t][cell] = 0;
      ++cell;
    }
  }
}

// Truth of `Q_k x_k ... . body` under `in`, quantifying variable k upwards.
bool quantify(BodyEvaluator &ev, const SOSFormula &f, const Interp &in,
              std::vector<Word> &vals, std::size_t k) {
  if (k == f.prefix.size())
    return ev.holdsWith(vals, f.width,
                        [&](std::uint32_t fn, std::span<const Word> args,
                            std::uint32_t) {
                          return in.tables[fn][packArgs(args, f.width)];
                        });
  const bool isForall = f.prefix[k].quantifier == Quantifier::Forall;
  const Word top = widthMask(f.prefix[k].var.widthAt(f.width));
  for (Word v = 0; v <= top; ++v) {
    vals[k] = v;
    const bool r = quantify(ev, f, in, vals, k + 1);
    if (isForall && !r)
      return false;
    if (!isForall && r)
      return true;
  }
  return isForall;
}

bool bruteForceSat(const SOSFormula &f) {
  std::vector<VarDecl> vars;
  for (const auto &q : f.prefix)
    vars.push_back(q.var);
  CompiledBody body(f.body, vars, f.functions);
  BodyEvaluator ev(body);
  std::vector<Word> vals(vars.size());
  return forEachInterp(f.functions, f.width, [&](const Interp &in) {
    return quantify(ev, f, in, vals, 0);
  });
}

ExprPtr randomExpr(std::mt19937_64 &rng, const std::vector<std::string> &vars,
                   const std::vector<FunctionSignature> &fns, int depth) {
  const int pick = static_cast<int>(rng() % 10);
  if (depth == 0 || pick < 3) {
    if (!vars.empty() && rng() % 3 != 0)
      return ex::var(vars[rng() % vars.size()]);
    return ex::lit(rng() % 4);
  }
  if (pick < 5 && !fns.empty()) {
    const auto &s = fns[rng() % fns.size()];
    std::vector<ExprPtr> args;
    for (unsigned i = 0; i < s.arity; ++i)
      args.push_back(randomExpr(rng, vars, fns, depth - 1));
    return ex::app(s.name, args);
  }
  if (pick < 7) {
    static const BoolOp bools[] = {BoolOp::And, BoolOp::Or, BoolOp::Not,
                                   BoolOp::Implies, BoolOp::Iff};
    BoolOp b = bools[rng() % 5];
    auto a = randomExpr(rng, vars, fns, depth - 1);
    if (b == BoolOp::Not)
      return ex::bnot(a);
    auto c = randomExpr(rng, vars, fns, depth - 1);
    switch (b) {
    case BoolOp::And:
      return ex::band({a, c});
    case BoolOp::Or:
      return ex::bor({a, c});
    case BoolOp::Implies:
      return ex::bimplies(a, c);
    default:
      return ex::biff(a, c);
    }
  }
  static const Opcode ops[] = {Opcode::Add, Opcode::Xor, Opcode::Eq,
                               Opcode::Lt,  Opcode::Ite, Opcode::Not,
                               Opcode::Sub, Opcode::And};
  Opcode op = ops[rng() % 8];
  std::vector<ExprPtr> args;
  for (unsigned i = 0; i < opcodeArity(op); ++i)
    args.push_back(randomExpr(rng, vars, fns, depth - 1));
  return ex::op(op, args);
}

} // namespace

TEST(Skolemize, EquisatisfiableBruteForce) {
  std::mt19937_64 rng(2024);
  int satCount = 0, unsatCount = 0;
  for (int iter = 0; iter < 300; ++iter) {
    SOSFormula f;
    f.width = 1 + rng() % 2;
    const unsigned nvars = 1 + rng() % 2;
    std::vector<std::string> names;
    for (unsigned i = 0; i < nvars; ++i) {
      QuantifiedVar q;
      q.quantifier = rng() % 2 ? Quantifier::Forall : Quantifier::Exists;
      q.var.name = "v" + std::to_string(i);
      if (f.width == 2 && rng() % 4 == 0)
        q.var.width = 1;
      f.prefix.push_back(q);
      names.push_back(q.var.name);
    }
    if (rng() % 2) {
      // Keep the table space small: arity-2 symbols only at width 1.
      FunctionSignature s;
      s.name = "S";
      s.arity = f.width == 1 ? static_cast<unsigned>(rng() % 3)
                             : static_cast<unsigned>(rng() % 2);
      f.functions.push_back(s);
    }
    f.body = randomExpr(rng, names, f.functions, 3);
    checkFormula(f);

    SynthesisInstance inst = skolemize(f);
    for (const auto &s : inst.functions)
      ASSERT_LE(s.arity, 2u);
    const bool orig = bruteForceSat(f);
    const bool skol = bruteForceSat(toFormula(inst));
    ASSERT_EQ(orig, skol) << printFormula(f);
    (orig ? satCount : unsatCount)++;
  }
  // The generator should produce both outcomes.
  EXPECT_GT(satCount, 10);
  EXPECT_GT(unsatCount, 10);
}
