#include "helpers.hpp"
#include "sosat/cegis.hpp"
#include "sosat/explicit.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <random>
#include <sstream>

using namespace sosat;
using namespace testing_helpers;
using nlohmann::json;

namespace {

SolverConfig quick(double seconds = 30) {
  SolverConfig cfg;
  cfg.deterministic = true;
  cfg.timeoutSeconds = seconds;
  return cfg;
}

std::vector<json> parseLog(const std::string &text) {
  std::vector<json> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    out.push_back(json::parse(line));
  return out;
}

// Shortest total length of any witness for a one-function instance, by
// exhaustive filtering over every input.
std::optional<unsigned> bruteMinimal(const SynthesisInstance &inst,
                                     unsigned maxL) {
  const unsigned w = inst.width;
  CompiledBody body(inst);
  const auto all = allPoints(inst, w);
  for (unsigned l = 1; l <= maxL; ++l)
    for (unsigned c = 0; c <= l; ++c)
      if (filterOnInputs(inst, body, Shape{{l}, {c}}, w, synthesisOpcodes(),
                         all))
        return l;
  return std::nullopt;
}

} // namespace

TEST(NextParams, DecisionTree) {
  SearchState s;
  s.l = 3;
  s.c = 1;
  s.w = 4;
  s.targetWidth = 32;
  auto n = nextParams(s, {LoopOutcome::SynthFailed});
  EXPECT_EQ(std::tie(n.l, n.c, n.w), std::make_tuple(3u, 2u, 4u));
  s.c = 3;
  n = nextParams(s, {LoopOutcome::SynthFailed});
  EXPECT_EQ(std::tie(n.l, n.c, n.w), std::make_tuple(4u, 0u, 4u));
  n = nextParams(s, {LoopOutcome::VerifFailed, false, false});
  EXPECT_EQ(std::tie(n.l, n.c, n.w), std::make_tuple(3u, 3u, 4u));
  n = nextParams(s, {LoopOutcome::VerifFailed, true, false});
  EXPECT_EQ(std::tie(n.l, n.c, n.w), std::make_tuple(3u, 3u, 5u));
  s.w = 32;
  n = nextParams(s, {LoopOutcome::VerifFailed, true, false});
  EXPECT_EQ(n.w, 32u);
}

// c never exceeds l along a walk of failures.
TEST(NextParams, ConstantsBoundedByLength) {
  SearchState s;
  for (int i = 0; i < 200; ++i) {
    s = nextParams(s, {LoopOutcome::SynthFailed});
    ASSERT_LE(s.c, s.l);
    ASSERT_GE(s.l, 1u);
  }
}

TEST(StoppingBound, Examples) {
  EXPECT_EQ(stoppingBound(2u).value, 4u);
  EXPECT_FALSE(stoppingBound(2u).capped);
  EXPECT_EQ(stoppingBound(0u).value, 1u);
  const auto capped = stoppingBound(8u, 64);
  EXPECT_EQ(capped.value, 64u);
  EXPECT_TRUE(capped.capped);
  EXPECT_EQ(stoppingBound(100u).value, ~std::uint64_t{0});
  EXPECT_FALSE(stoppingBound(3u, 64).capped);
}

TEST(Solve, ConstantBound) {
  const auto inst = instance("(width 8)(exists-fun P (arity 1) (out 1) "
                             "(function))(forall (x 3))(assert (le x (app P x)))");
  const auto r = solve(inst, quick());
  ASSERT_EQ(r.verdict, Verdict::Sat);
  EXPECT_EQ(r.stats.minimalSolutionLength, 1u);
  EXPECT_TRUE(holdsEverywhere(inst, r.witnesses, 8));
}

TEST(Solve, SymmetricRelation) {
  const auto inst = instance(
      "(width 1)(exists-fun S (arity 2) (out 1) (predicate))(forall x y)"
      "(assert (implies (app S x y) (app S y x)))");
  const auto r = solve(inst, quick());
  ASSERT_EQ(r.verdict, Verdict::Sat);
  EXPECT_TRUE(holdsEverywhere(inst, r.witnesses, 1));
}

TEST(Solve, ContradictionIsUnsat) {
  const auto inst = instance(
      "(width 1)(exists-fun P (arity 2) (out 1) (function))(forall x y)"
      "(assert (band (eq (app P x y) (and x y)) (eq (app P x y) (or x y))))");
  const auto r = solve(inst, quick(120));
  EXPECT_EQ(r.verdict, Verdict::Unsat);
  EXPECT_EQ(r.stats.finalL, 5u);
}

TEST(Solve, CapIsUnknownNotUnsat) {
  const auto inst = instance(
      "(width 1)(exists-fun P (arity 2) (out 1) (function))(forall x y)"
      "(assert (band (eq (app P x y) (and x y)) (eq (app P x y) (or x y))))");
  SolverConfig cfg = quick();
  cfg.maxLength = 2;
  const auto r = solve(inst, cfg);
  EXPECT_EQ(r.verdict, Verdict::Unknown);
  EXPECT_EQ(r.reason, UnknownReason::Cap);
}

TEST(Solve, TimeoutIsUnknown) {
  // Needs far more than a millisecond.
  const auto inst = superopt("(mul (add x 1) (sub x 3))", 32);
  SolverConfig cfg = quick(0.001);
  const auto r = solve(inst, cfg);
  EXPECT_EQ(r.verdict, Verdict::Unknown);
  EXPECT_EQ(r.reason, UnknownReason::Timeout);
}

TEST(Solve, GroundInstances) {
  const auto yes = instance("(width 8)(exists y)(assert (eq (add y 3) 10))");
  const auto r = solve(yes, quick());
  ASSERT_EQ(r.verdict, Verdict::Sat);
  EXPECT_TRUE(holdsEverywhere(yes, r.witnesses, 8));
  const auto no = instance("(width 8)(exists y)(assert (eq (add y y) 3))");
  EXPECT_EQ(solve(no, quick()).verdict, Verdict::Unsat);
}

TEST(Solve, CorpusWitnessesAtWidth8) {
  const char *exprs[] = {"(and x (sub x 1))", "(and x (add x 1))",
                         "(and x (neg x))", "(xor x (sub x 1))",
                         "(ite (slt x 0) (neg x) x)"};
  for (const char *e : exprs) {
    const auto inst = superopt(e, 8);
    for (bool det : {true, false}) {
      SolverConfig cfg = quick();
      cfg.deterministic = det;
      const auto r = solve(inst, cfg);
      ASSERT_EQ(r.verdict, Verdict::Sat) << e;
      EXPECT_TRUE(holdsEverywhere(inst, r.witnesses, 8)) << e;
    }
  }
}

// Random small instances: SAT verdicts hold everywhere and have the brute-force
// minimal length; UNSAT verdicts have no witness within the bound.
TEST(Solve, SoundAndMinimalOnRandomInstances) {
  std::mt19937_64 rng(5);
  const char *bin[] = {"add", "sub", "and", "or", "xor", "mul", "lshr", "min"};
  int sat = 0;
  for (int t = 0; t < 25; ++t) {
    const std::string e = std::string("(") + bin[rng() % 8] + " (" +
                          bin[rng() % 8] + " x " + std::to_string(rng() % 4) +
                          ") " + (rng() % 2 ? "x" : std::to_string(rng() % 16)) +
                          ")";
    const auto inst = superopt(e, 4);
    const auto r = solve(inst, quick());
    ASSERT_NE(r.verdict, Verdict::Unknown) << e;
    ASSERT_EQ(r.verdict, Verdict::Sat) << e;
    ++sat;
    EXPECT_TRUE(holdsEverywhere(inst, r.witnesses, 4)) << e;
    const auto brute = bruteMinimal(inst, 3);
    if (brute) {
      EXPECT_EQ(r.stats.minimalSolutionLength, *brute) << e;
    } else {
      EXPECT_GT(r.stats.minimalSolutionLength, 3u) << e;
    }
  }
  EXPECT_EQ(sat, 25);
}

TEST(Solve, SingleStrategies) {
  const auto inst = superopt("(and x (sub x 1))", 8);
  for (int k = 0; k < 3; ++k) {
    SolverConfig cfg = quick();
    cfg.useExplicit = k == 0;
    cfg.useSymbolic = k == 1;
    cfg.useGp = k == 2;
    // GP never exhausts a shape, so alone it only searches the length it
    // starts at.
    if (k == 2)
      cfg.initialLength = 2;
    const auto r = solve(inst, cfg);
    ASSERT_EQ(r.verdict, Verdict::Sat) << k;
    EXPECT_EQ(r.stats.minimalSolutionLength, 2u) << k;
    EXPECT_TRUE(holdsEverywhere(inst, r.witnesses, 8));
  }
  SolverConfig gpShort = quick(1);
  gpShort.useExplicit = gpShort.useSymbolic = false;
  const auto stuck = solve(inst, gpShort);
  EXPECT_EQ(stuck.verdict, Verdict::Unknown);
  EXPECT_EQ(stuck.reason, UnknownReason::Timeout);
  EXPECT_EQ(stuck.stats.finalL, 1u);

  SolverConfig none = quick();
  none.useExplicit = none.useSymbolic = none.useGp = false;
  EXPECT_THROW(solve(inst, none), Error);
}

TEST(RunLog, LengthMonotoneAndFirstWitnessMinimal) {
  const char *exprs[] = {"(and x (sub x 1))", "(or x (sub x 1))",
                         "(ite (slt x 0) (neg x) x)", "(add x 12)"};
  for (const char *e : exprs) {
    std::ostringstream os;
    SolverConfig cfg = quick();
    cfg.log = &os;
    const auto r = solve(superopt(e, 8), cfg);
    ASSERT_EQ(r.verdict, Verdict::Sat);
    unsigned last = 0;
    std::optional<std::size_t> firstValid;
    std::size_t lengthAtCandidate = 0;
    bool restarted = false;
    for (const json &j : parseLog(os.str())) {
      if (j["event"] == "param-change" && j["reason"] == "width-restart")
        restarted = true;
      if (j["event"] == "synth-start") {
        if (!restarted) {
          EXPECT_GE(j["l"].get<unsigned>(), last) << e;
        }
        last = j["l"].get<unsigned>();
      }
      if (j["event"] == "candidate")
        lengthAtCandidate = j["length"].get<std::size_t>();
      if (j["event"] == "verif-valid" && !firstValid)
        firstValid = lengthAtCandidate;
      if (j["event"] == "verdict") {
        ASSERT_TRUE(firstValid);
        EXPECT_EQ(j["minimal_solution_length"].get<std::size_t>(), *firstValid);
      }
    }
    EXPECT_FALSE(restarted) << e;
  }
}

TEST(RunLog, DeterministicRunsMatch) {
  for (const char *e : {"(and x (sub x 1))", "(ite (slt x 0) (neg x) x)"}) {
    std::string logs[2];
    for (auto &text : logs) {
      std::ostringstream os;
      SolverConfig cfg = quick();
      cfg.log = &os;
      cfg.seed = 9;
      solve(superopt(e, 8), cfg);
      text = os.str();
    }
    EXPECT_FALSE(logs[0].empty());
    EXPECT_EQ(logs[0], logs[1]);
  }
}

TEST(RunLog, WinCountsMatchEvents) {
  for (bool det : {true, false}) {
    std::ostringstream os;
    SolverConfig cfg = quick();
    cfg.deterministic = det;
    cfg.log = &os;
    const auto r = solve(superopt("(ite (slt x 0) (neg x) x)", 8), cfg);
    ASSERT_EQ(r.verdict, Verdict::Sat);
    std::uint64_t synthDecided = 0, verifDecided = 0;
    std::set<std::vector<Word>> cexes;
    for (const json &j : parseLog(os.str())) {
      const std::string ev = j["event"];
      synthDecided += ev == "synth-fail" || ev == "candidate";
      verifDecided += ev == "cex" || ev == "verif-valid";
      if (ev == "cex")
        EXPECT_TRUE(cexes.insert(j["values"].get<std::vector<Word>>()).second);
    }
    std::uint64_t sw = 0, vw = 0;
    for (const auto &[k, v] : r.stats.synthWins)
      sw += v;
    for (const auto &[k, v] : r.stats.verifWins)
      vw += v;
    EXPECT_EQ(sw, synthDecided);
    EXPECT_EQ(vw, verifDecided);
    EXPECT_EQ(r.stats.iterations, verifDecided);
  }
}

// Iterations stay within the 2^n input bound on exhaustively checkable cases.
TEST(Solve, IterationBound) {
  for (const char *e : {"(and x (sub x 1))", "(xor x (lshr x 1))", "(mul x 3)"}) {
    const auto inst = superopt(e, 4);
    const auto r = solve(inst, quick());
    ASSERT_EQ(r.verdict, Verdict::Sat);
    EXPECT_LE(r.stats.counterexamples, 16u);
  }
}

TEST(Solve, NarrowWidthTarget) {
  const auto inst = superopt("(and x (sub x 1))", 32);
  SolverConfig cfg = quick();
  cfg.targetWidth = 6;
  const auto r = solve(inst, cfg);
  ASSERT_EQ(r.verdict, Verdict::Sat);
  EXPECT_EQ(r.witnesses.at("P").width, 6u);
  auto narrow = inst;
  narrow.width = 6;
  EXPECT_TRUE(holdsEverywhere(narrow, r.witnesses, 6));
}

TEST(Solve, Cancelled) {
  std::atomic<bool> stop{true};
  SolverConfig cfg = quick();
  cfg.cancel = &stop;
  const auto r = solve(superopt("(and x (sub x 1))", 8), cfg);
  EXPECT_EQ(r.verdict, Verdict::Unknown);
  EXPECT_EQ(r.reason, UnknownReason::Cancelled);
}
