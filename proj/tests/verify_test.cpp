#include "helpers.hpp"
#include "sosat/verify.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace sosat;
using namespace testing_helpers;

namespace {

const char *kAbs = "(ite (slt x 0) (neg x) x)";

Program p9(unsigned w, Word shift) {
  Program p = parseProgram("prog 1 1 " + std::to_string(w) + " consts " +
                           std::to_string(shift) +
                           "\nt1 = ashr x0 c0 ; t2 = xor x0 t1 ; t3 = sub t2 t1\n");
  return p;
}

VerifyConfig counting() {
  VerifyConfig cfg;
  cfg.order = CexOrder::Counting;
  return cfg;
}

} // namespace

TEST(FindCounterexample, CorrectAbsAtWidth8) {
  const auto inst = superopt(kAbs, 8);
  CompiledBody body(inst);
  const VerifyResult r = findCounterexample(inst, body, {p9(8, 7)}, 8, counting());
  EXPECT_EQ(r.outcome, VerifyOutcome::Valid);
  EXPECT_EQ(r.winner, "explicit");
  EXPECT_EQ(r.pointsChecked, 256u);
}

TEST(FindCounterexample, WrapAround) {
  const auto inst = instance("(width 8)(exists-fun P (arity 1) (out 1) "
                             "(function))(forall x)(assert (le x (app P x)))");
  CompiledBody body(inst);
  const Program p = parseProgram("prog 1 1 8 consts 1\nt1 = add x0 c0\n");
  for (auto order : {CexOrder::Counting, CexOrder::RandomThenExhaustive}) {
    VerifyConfig cfg;
    cfg.order = order;
    const VerifyResult r = findCounterexample(inst, body, {p}, 8, cfg);
    ASSERT_EQ(r.outcome, VerifyOutcome::Counterexample);
    EXPECT_EQ(r.cex.values, std::vector<Word>{255});
  }
  VerifyConfig cfg;
  const VerifyResult s = findCounterexampleSymbolic(inst, body, {p}, 8, cfg);
  ASSERT_EQ(s.outcome, VerifyOutcome::Counterexample);
  EXPECT_EQ(s.cex.values, std::vector<Word>{255});
  EXPECT_EQ(s.winner, "symbolic");
}

TEST(FindCounterexample, FalseBodyGivesFirstAssignment) {
  const auto inst = instance("(width 4)(exists-fun P (arity 1) (out 1) "
                             "(function))(forall x y)(assert (eq 0 1))");
  CompiledBody body(inst);
  const Program p = parseProgram("prog 1 1 4 consts\nt1 = neg x0\n");
  const VerifyResult r = findCounterexample(inst, body, {p}, 4, counting());
  ASSERT_EQ(r.outcome, VerifyOutcome::Counterexample);
  EXPECT_EQ(r.cex.values, (std::vector<Word>{0, 0}));
  EXPECT_EQ(r.pointsChecked, 1u);
}

TEST(FindCounterexample, TrueBodyIsValid) {
  const auto inst = instance("(width 4)(exists-fun P (arity 1) (out 1) "
                             "(function))(forall x)(assert (eq 1 1))");
  CompiledBody body(inst);
  const Program p = parseProgram("prog 1 1 4 consts\nt1 = neg x0\n");
  EXPECT_EQ(findCounterexample(inst, body, {p}, 4, {}).outcome,
            VerifyOutcome::Valid);
}

TEST(FindCounterexample, IdentityAgainstP1) {
  const auto inst = superopt("(and x (sub x 1))", 8);
  CompiledBody body(inst);
  const Program id = parseProgram("prog 1 1 8 consts\nt1 = min x0 x0\n");
  const VerifyResult r = findCounterexample(inst, body, {id}, 8, counting());
  ASSERT_EQ(r.outcome, VerifyOutcome::Counterexample);
  EXPECT_EQ(r.cex.values, std::vector<Word>{1});
}

// The exhaustive sweep visits every assignment exactly once.
TEST(FindCounterexample, ExhaustiveCount) {
  const auto inst = instance(
      "(width 6)(exists-fun P (arity 2) (out 1) (function))(forall x (y 3))"
      "(assert (eq (app P x y) (add x y)))");
  CompiledBody body(inst);
  const Program p = parseProgram("prog 2 1 6 consts\nt1 = add x0 x1\n");
  VerifyConfig cfg = counting();
  const VerifyResult r = findCounterexampleExplicit(inst, body, {p}, 6, cfg);
  EXPECT_EQ(r.outcome, VerifyOutcome::Valid);
  EXPECT_EQ(r.pointsChecked, 1u << 9);

  Assignment a;
  a.values = {0, 0};
  std::set<std::vector<Word>> seen;
  do
    seen.insert(a.values);
  while (nextAssignment(inst, 6, a));
  EXPECT_EQ(seen.size(), 1u << 9);
}

TEST(FindCounterexample, LargeInputsGoSymbolic) {
  const auto inst = superopt(kAbs, 32);
  CompiledBody body(inst);
  const VerifyResult ok = findCounterexample(inst, body, {p9(32, 31)}, 32, {});
  EXPECT_EQ(ok.outcome, VerifyOutcome::Valid);
  EXPECT_EQ(ok.winner, "symbolic");
  const VerifyResult bad = findCounterexample(inst, body, {p9(32, 30)}, 32, {});
  ASSERT_EQ(bad.outcome, VerifyOutcome::Counterexample);
  Witnesses w{p9(32, 30)};
  EXPECT_FALSE(evaluateBody(inst, bad.cex, witnessMap(inst, w), 32));
}

// Symbolic and explicit searches agree on whether a counterexample exists.
TEST(FindCounterexample, SearchesAgree) {
  std::mt19937_64 rng(21);
  const char *specs[] = {"(and x (sub x 1))", "(or x (add x 1))", kAbs,
                         "(xor x (lshr x 1))", "(mul x 3)"};
  const char *cands[] = {"t1 = sub x0 c0 ; t2 = and x0 t1",
                         "t1 = add x0 c0 ; t2 = or x0 t1",
                         "t1 = lshr x0 c0 ; t2 = xor x0 t1",
                         "t1 = add x0 x0 ; t2 = add x0 t1",
                         "t1 = mul x0 c0 ; t2 = min x0 t1"};
  int valid = 0;
  for (unsigned w : {4u, 6u, 12u})
    for (const char *s : specs)
      for (const char *c : cands) {
        const auto inst = superopt(s, w);
        CompiledBody body(inst);
        const Word k = rng() % 4;
        const Program p = parseProgram("prog 1 1 " + std::to_string(w) +
                                       " consts " + std::to_string(k) + "\n" + c +
                                       "\n");
        VerifyConfig cfg;
        const auto e = findCounterexampleExplicit(inst, body, {p}, w, cfg);
        const auto y = findCounterexampleSymbolic(inst, body, {p}, w, cfg);
        EXPECT_EQ(e.outcome, y.outcome) << s << " / " << c << " @" << w;
        valid += e.outcome == VerifyOutcome::Valid;
      }
  EXPECT_GT(valid, 0);
}

TEST(ExtensionCandidates, RuleOrder) {
  EXPECT_EQ(extensionCandidates(1, 4, 8), (std::vector<Word>{1, 0x11}));
  // 15 at w=4: value, sign-extension (= all ones), repetition.
  EXPECT_EQ(extensionCandidates(15, 4, 8), (std::vector<Word>{15, 255}));
  EXPECT_EQ(extensionCandidates(8, 4, 8),
            (std::vector<Word>{8, 0xf8, 0x80, 0x88}));
  EXPECT_EQ(extensionCandidates(3, 4, 32),
            (std::vector<Word>{3, 31, 0x33333333}));
  EXPECT_EQ(extensionCandidates(4, 4, 8), (std::vector<Word>{4, 8, 0x44}));
  EXPECT_EQ(extensionCandidates(0, 4, 8), (std::vector<Word>{0}));
}

TEST(Generalize, AbsShiftAmount) {
  const auto inst16 = superopt(kAbs, 16);
  CompiledBody body16(inst16);
  ASSERT_EQ(findCounterexample(superopt(kAbs, 8), CompiledBody(superopt(kAbs, 8)),
                               {p9(8, 7)}, 8, {})
                .outcome,
            VerifyOutcome::Valid);
  GeneralizeStats st;
  auto lifted = generalizeConstants(inst16, body16, {p9(8, 7)}, 8, 16,
                                    counting(), 64, &st);
  ASSERT_TRUE(lifted);
  EXPECT_EQ((*lifted)[0].constants[0], 15u);
  EXPECT_EQ((*lifted)[0].width, 16u);
  EXPECT_TRUE(holdsEverywhere(inst16, witnessMap(inst16, *lifted), 16));

  const auto inst32 = superopt(kAbs, 32);
  CompiledBody body32(inst32);
  auto at32 = generalizeConstants(inst32, body32, {p9(8, 7)}, 8, 32, {});
  ASSERT_TRUE(at32);
  EXPECT_EQ((*at32)[0].constants[0], 31u);
}

TEST(Generalize, ValuePreserved) {
  const Program p1 =
      parseProgram("prog 1 1 4 consts 1\nt1 = sub x0 c0 ; t2 = and x0 t1\n");
  for (unsigned W = 5; W <= 12; ++W) {
    const auto inst = superopt("(and x (sub x 1))", W);
    CompiledBody body(inst);
    GeneralizeStats st;
    auto lifted = generalizeConstants(inst, body, {p1}, 4, W, counting(), 64, &st);
    ASSERT_TRUE(lifted) << W;
    EXPECT_EQ((*lifted)[0].constants[0], 1u);
    EXPECT_EQ(st.trials, 1u);
    EXPECT_TRUE(holdsEverywhere(inst, witnessMap(inst, *lifted), W));
  }
}

// x - 4 equals x + 12 only modulo 16; no extension of 4 repairs that.
TEST(Generalize, WidthAccidentalWitness) {
  const Program p = parseProgram("prog 1 1 4 consts 4\nt1 = sub x0 c0\n");
  const auto small = superopt("(add x 12)", 4);
  ASSERT_TRUE(holdsEverywhere(small, witnessMap(small, {p}), 4));
  const auto inst = superopt("(add x 12)", 8);
  CompiledBody body(inst);
  GeneralizeStats st;
  EXPECT_FALSE(generalizeConstants(inst, body, {p}, 4, 8, counting(), 64, &st));
  EXPECT_EQ(st.trials, extensionCandidates(4, 4, 8).size());
  EXPECT_FALSE(st.capped);
}

TEST(Generalize, TrialCap) {
  const Program p = parseProgram(
      "prog 1 1 4 consts 8 9 10\nt1 = sub x0 c0 ; t2 = add t1 c1 ; t3 = xor t2 c2\n");
  const auto inst = superopt("(add x 100)", 8);
  CompiledBody body(inst);
  GeneralizeStats st;
  EXPECT_FALSE(generalizeConstants(inst, body, {p}, 4, 8, counting(), 5, &st));
  EXPECT_TRUE(st.capped);
  EXPECT_EQ(st.trials, 5u);
}
