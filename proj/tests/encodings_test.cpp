#include "helpers.hpp"
#include "qbf_oracle.hpp"
#include "sosat/cegis.hpp"
#include "sosat/encodings.hpp"
#include "sosat/verify.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace sosat;
using namespace testing_helpers;

namespace {

SolverConfig quick(double seconds = 60) {
  SolverConfig cfg;
  cfg.deterministic = true;
  cfg.timeoutSeconds = seconds;
  return cfg;
}

LoopSystem loop(const std::string &text) { return parseLoop(text); }

const char *kCount = "(width 8)(loop (vars x) (init (eq x 0)) (guard (lt x 10))"
                     " (body (eq x' (add x 1))) (assert (eq x 10)))";
const char *kDecrement = "(width 8)(loop (vars x) (init true) (guard (lt 0 x))"
                         " (body (eq x' (sub x 1))))";
const char *kStay = "(width 4)(loop (vars x) (init true) (guard (neq x 0))"
                    " (body (eq x' x)))";

Program prog(const std::string &text) { return parseProgram(text); }

// Every assignment of the universals of `f` at its width, with `w` as the
// interpretation, agrees with the hand-written body `expected`.
void expectSameTruthTable(const SOSFormula &f, const std::string &expected,
                          const std::map<std::string, Program> &w) {
  SynthesisInstance a = skolemize(f);
  SynthesisInstance b = a;
  b.body = parseExpr(parseSExprs(expected).front());
  for (const Assignment &pt : allPoints(a, a.width))
    ASSERT_EQ(evaluateBody(a, pt, w, a.width), evaluateBody(b, pt, w, b.width))
        << toString(a.body);
}

QbfFormula qbf(std::vector<std::pair<Quantifier, std::string>> prefix,
               const std::string &matrix) {
  return {std::move(prefix), parseExpr(parseSExprs(matrix).front())};
}

Verdict solveQbf(const QbfFormula &q) {
  return solve(skolemize(encodeQbf(q)), quick()).verdict;
}

constexpr auto A = Quantifier::Forall;
constexpr auto E = Quantifier::Exists;

} // namespace

TEST(ParseLoop, Forms) {
  const auto l = loop("(width 6)(loop (vars x (y 3)) (init (eq x y)) (guard true)"
                      " (body (band (eq x' y) (eq y' x))))");
  EXPECT_EQ(l.width, 6u);
  ASSERT_EQ(l.vars.size(), 2u);
  EXPECT_EQ(l.vars[1].width, 3u);
  EXPECT_FALSE(l.assertion);
  EXPECT_THROW(loop("(loop (vars x) (init (eq z 0)) (guard true) (body true))"),
               UnknownSymbol);
  EXPECT_THROW(loop("(loop (vars x) (init true) (guard (eq x' 0)) (body true))"),
               UnknownSymbol);
  EXPECT_THROW(loop("(loop (vars x) (init true) (guard true))"), SyntaxError);
  EXPECT_THROW(loop("(width 8)"), SyntaxError);
}

// Each encoder against the formula written out by hand for the same loop,
// under several interpretations of the unknowns.
TEST(EncoderFaithfulness, Safety) {
  auto l = loop("(width 2)(loop (vars x) (init (eq x 0)) (guard (lt x 2))"
                " (body (eq x' (add x 1))) (assert (eq x 2)))");
  const auto f = encodeSafety(l, l.assertion);
  const std::string hand =
      "(band (implies (eq x 0) (app S x))"
      " (implies (band (app S x) (lt x 2) (eq x' (add x 1))) (app S x'))"
      " (implies (band (app S x) (bnot (lt x 2))) (eq x 2)))";
  for (const char *s : {"prog 1 1 2 consts 2\nt1 = le x0 c0\n",
                        "prog 1 1 2 consts\nt1 = eq x0 x0\n",
                        "prog 1 1 2 consts 1\nt1 = lt x0 c0\n",
                        "prog 1 1 2 consts 3\nt1 = and x0 c0\n"})
    expectSameTruthTable(f, hand, {{"S", prog(s)}});
}

TEST(EncoderFaithfulness, Termination) {
  auto l = loop("(width 2)(loop (vars x) (init (neq x 3)) (guard (lt 0 x))"
                " (body (eq x' (sub x 1))))");
  const auto f = encodeTermination(l);
  const std::string hand =
      "(band (implies (band (neq x 3) (lt 0 x)) (app W x))"
      " (implies (band (lt 0 x) (app W x) (eq x' (sub x 1)))"
      "  (band (app W x') (lt 0 (app R x)) (lt (app R x') (app R x)))))";
  const char *rs[] = {"prog 1 1 2 consts\nt1 = min x0 x0\n",
                      "prog 1 1 2 consts\nt1 = neg x0\n",
                      "prog 1 1 2 consts 1\nt1 = add x0 c0\n"};
  const char *ws[] = {"prog 1 1 2 consts\nt1 = eq x0 x0\n",
                      "prog 1 1 2 consts 2\nt1 = lt x0 c0\n"};
  for (const char *r : rs)
    for (const char *w : ws)
      expectSameTruthTable(f, hand, {{"R", prog(r)}, {"W", prog(w)}});
}

TEST(EncoderFaithfulness, Nontermination) {
  auto l = loop("(width 2)(loop (vars x y) (init true) (guard (neq x y))"
                " (body (band (eq x' y) (eq y' x))))");
  const auto f = encodeNontermination(l);
  const std::string hand =
      "(band (app N (app x0_x) (app x0_y))"
      " (implies (app N x y) (neq x y))"
      " (implies (app N x y) (band (band (eq (app (C 0) x y) y)"
      "                                  (eq (app (C 1) x y) x))"
      "                            (app N (app (C 0) x y) (app (C 1) x y)))))";
  const std::map<std::string, Program> w = {
      {"N", prog("prog 2 1 2 consts\nt1 = neq x0 x1\n")},
      {"C", prog("prog 2 2 2 consts\nt1 = min x1 x1\nt2 = min x0 x0\n")},
      {"x0_x", prog("prog 0 1 2 consts 1\n")},
      {"x0_y", prog("prog 0 1 2 consts 2\n")}};
  expectSameTruthTable(f, hand, w);
  auto w2 = w;
  w2["C"] = prog("prog 2 2 2 consts\nt1 = min x0 x0\nt2 = min x1 x1\n");
  w2["x0_y"] = prog("prog 0 1 2 consts 1\n");
  expectSameTruthTable(f, hand, w2);
}

TEST(EncodeSafety, CountingLoop) {
  auto l = loop(kCount);
  const auto inst = skolemize(encodeSafety(l, l.assertion));
  // S(x) = x <= 10 is an invariant.
  const std::map<std::string, Program> s = {
      {"S", prog("prog 1 1 8 consts 10\nt1 = le x0 c0\n")}};
  EXPECT_TRUE(holdsEverywhere(inst, s, 8));
  const auto r = solve(inst, quick());
  ASSERT_EQ(r.verdict, Verdict::Sat);
  EXPECT_TRUE(holdsEverywhere(inst, r.witnesses, 8));
}

TEST(EncodeSafety, TrivialAndViolated) {
  auto l = loop(kCount);
  const auto yes = skolemize(encodeSafety(l, nullptr));
  const auto r = solve(yes, quick());
  ASSERT_EQ(r.verdict, Verdict::Sat);
  EXPECT_TRUE(holdsEverywhere(yes, r.witnesses, 8));

  auto bad = loop("(width 1)(loop (vars x) (init (eq x 1)) (guard false)"
                  " (body (eq x' x)) (assert (eq x 0)))");
  EXPECT_EQ(solve(skolemize(encodeSafety(bad, bad.assertion)), quick()).verdict,
            Verdict::Unsat);
}

TEST(EncodeTermination, Decrement) {
  const auto inst = skolemize(encodeTermination(loop(kDecrement)));
  const std::map<std::string, Program> rw = {
      {"R", prog("prog 1 1 8 consts\nt1 = min x0 x0\n")},
      {"W", prog("prog 1 1 8 consts\nt1 = eq x0 x0\n")}};
  EXPECT_TRUE(holdsEverywhere(inst, rw, 8));
  const auto r = solve(inst, quick());
  ASSERT_EQ(r.verdict, Verdict::Sat);
  EXPECT_TRUE(holdsEverywhere(inst, r.witnesses, 8));
}

TEST(EncodeTermination, NonterminatingAndGuardFalse) {
  const auto spin = skolemize(encodeTermination(
      loop("(width 1)(loop (vars x) (init true) (guard true) (body (eq x' x)))")));
  EXPECT_EQ(solve(spin, quick()).verdict, Verdict::Unsat);
  const auto never = skolemize(encodeTermination(
      loop("(width 4)(loop (vars x) (init true) (guard false) (body true))")));
  const auto r = solve(never, quick());
  ASSERT_EQ(r.verdict, Verdict::Sat);
  EXPECT_TRUE(holdsEverywhere(never, r.witnesses, 4));
}

TEST(EncodeNontermination, Stay) {
  const auto inst = skolemize(encodeNontermination(loop(kStay)));
  const std::map<std::string, Program> ncx = {
      {"N", prog("prog 1 1 4 consts 0\nt1 = neq c0 x0\n")},
      {"C", prog("prog 1 1 4 consts\nt1 = min x0 x0\n")},
      {"x0_x", prog("prog 0 1 4 consts 1\n")}};
  EXPECT_TRUE(holdsEverywhere(inst, ncx, 4));
  const auto r = solve(inst, quick());
  ASSERT_EQ(r.verdict, Verdict::Sat);
  EXPECT_TRUE(holdsEverywhere(inst, r.witnesses, 4));
}

TEST(EncodeNontermination, TerminatingLoopsAreUnsat) {
  const auto dec = skolemize(encodeNontermination(
      loop("(width 2)(loop (vars x) (init true) (guard (lt 0 x))"
           " (body (eq x' (sub x 1))))")));
  EXPECT_EQ(solve(dec, quick()).verdict, Verdict::Unsat);
  const auto never = skolemize(encodeNontermination(
      loop("(width 1)(loop (vars x) (init true) (guard false) (body true))")));
  EXPECT_EQ(solve(never, quick()).verdict, Verdict::Unsat);
}

TEST(EncodeQbf, Examples) {
  const auto q1 = qbf({{A, "a"}, {E, "b"}}, "(xor a b)");
  EXPECT_EQ(solveQbf(q1), Verdict::Sat);
  const auto r = solve(skolemize(encodeQbf(q1)), quick());
  ASSERT_EQ(r.witnesses.size(), 1u);
  const Program &f = r.witnesses.begin()->second;
  EXPECT_EQ(exec(f, std::vector<Word>{0})[0], 1u);
  EXPECT_EQ(exec(f, std::vector<Word>{1})[0], 0u);

  EXPECT_EQ(solveQbf(qbf({{E, "a"}, {A, "b"}}, "(and a b)")), Verdict::Unsat);
  EXPECT_EQ(solveQbf(negateQbf(q1)), Verdict::Unsat);
}

TEST(NegateQbf, Involution) {
  const auto q = qbf({{A, "a"}, {E, "b"}, {A, "c"}}, "(bor (xor a b) c)");
  const auto n = negateQbf(q);
  EXPECT_EQ(n.prefix[0].first, E);
  EXPECT_EQ(n.prefix[1].first, A);
  const auto back = negateQbf(n);
  EXPECT_EQ(back.prefix, q.prefix);
  EXPECT_TRUE(structurallyEqual(back.matrix, q.matrix));
}

TEST(ParseQdimacs, Prefix) {
  const auto q = parseQdimacs("c example\np cnf 3 2\na 1 0\ne 2 0\n"
                              "1 -2 0\n-1 2 3 0\n");
  ASSERT_EQ(q.prefix.size(), 3u);
  EXPECT_EQ(q.prefix[0], (std::pair<Quantifier, std::string>{E, "v3"}));
  EXPECT_EQ(q.prefix[1], (std::pair<Quantifier, std::string>{A, "v1"}));
  EXPECT_EQ(q.prefix[2], (std::pair<Quantifier, std::string>{E, "v2"}));
  // v3 = 1 and v2 = v1 satisfy both clauses.
  EXPECT_TRUE(qbf_oracle::evaluate(q));
  EXPECT_EQ(solveQbf(q), Verdict::Sat);
  EXPECT_THROW(parseQdimacs("1 2 0\n"), SyntaxError);
  EXPECT_THROW(parseQdimacs("p cnf 2 1\n1 3 0\n"), SyntaxError);
  EXPECT_THROW(parseQdimacs("p cnf 2 1\n1 0\na 2 0\n"), SyntaxError);
}

TEST(EncodeQbf, RandomThreeVariableAgainstOracle) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    const auto q = qbf_oracle::random(rng, 3);
    const bool truth = qbf_oracle::evaluate(q);
    EXPECT_EQ(solveQbf(q), truth ? Verdict::Sat : Verdict::Unsat)
        << toString(q.matrix);
    EXPECT_EQ(solveQbf(negateQbf(q)), truth ? Verdict::Unsat : Verdict::Sat);
  }
}

TEST(EncodeSuperopt, FromProgram) {
  const Program max8 =
      prog("prog 2 1 4 consts\nt1 = le x0 x1\nt2 = xor x0 x1\nt3 = mul t1 t2\n"
           "t4 = xor t3 x0\n");
  const auto inst = skolemize(encodeSuperopt(max8));
  const auto r = solve(inst, quick());
  ASSERT_EQ(r.verdict, Verdict::Sat);
  EXPECT_LE(r.stats.minimalSolutionLength, 4u);
  for (Word x = 0; x < 16; ++x)
    for (Word y = 0; y < 16; ++y)
      EXPECT_EQ(exec(r.witnesses.at("P"), std::vector<Word>{x, y})[0],
                std::max(x, y));

  const auto id = skolemize(encodeSuperopt(prog("prog 1 1 8 consts\nt1 = min x0 x0\n")));
  const auto ri = solve(id, quick());
  ASSERT_EQ(ri.verdict, Verdict::Sat);
  EXPECT_EQ(ri.stats.minimalSolutionLength, 1u);
}

TEST(EncodeSuperopt, SwapAtSmallWidth) {
  const Program swap =
      prog("prog 2 2 4 consts\nt1 = xor x0 x1\nt2 = xor t1 x0\nt3 = xor t1 t2\n");
  EXPECT_EQ(exec(swap, std::vector<Word>{3, 9}), (std::vector<Word>{9, 3}));
  const auto inst = skolemize(encodeSuperopt(swap));
  const auto r = solve(inst, quick());
  ASSERT_EQ(r.verdict, Verdict::Sat);
  EXPECT_LE(r.stats.minimalSolutionLength, 3u);
  EXPECT_TRUE(holdsEverywhere(inst, r.witnesses, 4));
}

TEST(ProgramExprs, AgreeWithExec) {
  const Program p = prog("prog 2 2 8 consts 3 200\nt1 = mul x0 c0\n"
                         "t2 = ite x1 t1 c1\nt3 = sub t2 x1\n");
  const auto f = encodeSuperopt(p);
  const auto inst = skolemize(f);
  EXPECT_TRUE(holdsEverywhere(inst, {{"P", p}}, 8));
}

TEST(Corpus, Manifest) {
  const auto cases = loadCorpus(SOSAT_CORPUS_DIR);
  ASSERT_EQ(cases.size(), 29u);
  std::map<std::string, const BenchmarkCase *> byId;
  for (const auto &c : cases)
    byId[c.id] = &c;
  EXPECT_EQ(byId.at("P1")->referenceLength, 2u);
  EXPECT_EQ(byId.at("P14")->referenceLength, 4u);
  EXPECT_EQ(byId.at("P22")->status, CaseStatus::KnownHard);
  EXPECT_TRUE(byId.at("B29")->enableShl);
  EXPECT_EQ(byId.at("B28")->formula->functions[0].outCount, 2u);
  int hard = 0;
  for (const auto &c : cases)
    hard += c.status == CaseStatus::KnownHard;
  EXPECT_EQ(hard, 8);
}

// Each listed reference program is a witness of its own case at the target
// width.
TEST(Corpus, ReferencesSatisfyTheirFormulas) {
  for (const auto &c : loadCorpus(SOSAT_CORPUS_DIR)) {
    if (!c.reference)
      continue;
    const auto inst = skolemize(*c.formula);
    CompiledBody body(inst);
    VerifyConfig cfg;
    const auto r = findCounterexample(inst, body, {*c.reference}, inst.width, cfg);
    EXPECT_EQ(r.outcome, VerifyOutcome::Valid) << c.id;
  }
}
