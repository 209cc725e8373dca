#include "helpers.hpp"
#include "sosat/explicit.hpp"
#include "sosat/symbolic.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace sosat;
using namespace testing_helpers;

namespace {

std::optional<Witnesses> solveShape(const SynthesisInstance &inst,
                                    const Shape &shape, unsigned w,
                                    std::span<const Assignment> inputs,
                                    sat::Engine engine = sat::Engine::Cadical) {
  CompiledBody body(inst);
  auto solver = sat::makeSolver(engine);
  SolverSink sink(*solver);
  const auto ops = synthesisOpcodes();
  SynthEncoder enc(inst, body, shape, w, ops, sink);
  for (const auto &a : inputs)
    enc.addInput(a);
  if (solver->solve({}, {}) != sat::Result::Sat)
    return std::nullopt;
  std::vector<bool> model(solver->numVars());
  for (std::size_t v = 0; v < model.size(); ++v)
    model[v] = solver->modelValue(static_cast<sat::Var>(v));
  Witnesses progs = decodeModel(model, enc.skeleton());
  checkDecoded(inst, body, progs, w, inputs);
  return progs;
}

bool clauseSatisfied(const std::vector<int> &clause,
                     const std::vector<bool> &model) {
  for (int l : clause) {
    const bool v = model[static_cast<std::size_t>(std::abs(l) - 1)];
    if ((l > 0) == v)
      return true;
  }
  return false;
}

// A random expression over x (and y) of the given depth.
std::string randomExpr(std::mt19937_64 &rng, int depth, bool twoVars) {
  static const char *bin[] = {"add", "sub", "and", "or", "xor", "mul",
                              "lshr", "ashr", "min", "max", "le", "slt"};
  static const char *un[] = {"neg", "not"};
  std::uniform_int_distribution<int> pick(0, 9);
  if (depth == 0) {
    const int k = pick(rng);
    if (k < 5)
      return "x";
    if (k < 8 && twoVars)
      return "y";
    return std::to_string(k % 4);
  }
  if (pick(rng) < 2)
    return std::string("(") + un[pick(rng) % 2] + " " +
           randomExpr(rng, depth - 1, twoVars) + ")";
  return std::string("(") + bin[std::uniform_int_distribution<int>(0, 11)(rng)] +
         " " + randomExpr(rng, depth - 1, twoVars) + " " +
         randomExpr(rng, depth - 1, twoVars) + ")";
}

} // namespace

TEST(EncodeSynth, P1SingleInput) {
  const auto inst = superopt("(and x (sub x 1))", 4);
  const auto in = points({12});
  auto progs = solveShape(inst, Shape{{2}, {1}}, 4, in);
  ASSERT_TRUE(progs);
  const Program &p = (*progs)[0];
  EXPECT_EQ(p.length(), 2u);
  EXPECT_EQ(p.constants.size(), 1u);
  EXPECT_EQ(exec(p, std::vector<Word>{12})[0], 8u);
  EXPECT_TRUE(validate(p).empty());
  EXPECT_TRUE(isCanonical(p));
}

TEST(EncodeSynth, UnsatBelowMinimalLength) {
  const auto inst = superopt("(and x (sub x 1))", 4);
  const auto all = allPoints(inst, 4);
  CompiledBody body(inst);
  for (unsigned c = 0; c <= 1; ++c) {
    // The explicit search agrees that nothing of length 1 fits.
    ASSERT_FALSE(filterOnInputs(inst, body, Shape{{1}, {c}}, 4,
                                synthesisOpcodes(), all));
    EXPECT_FALSE(solveShape(inst, Shape{{1}, {c}}, 4, all));
  }
  EXPECT_TRUE(solveShape(inst, Shape{{2}, {1}}, 4, all));
}

TEST(EncodeSynth, ZeroInputs) {
  const auto inst = superopt("(and x (sub x 1))", 4);
  for (unsigned c = 0; c <= 2; ++c) {
    auto progs = solveShape(inst, Shape{{2}, {c}}, 4, {});
    ASSERT_TRUE(progs);
    EXPECT_TRUE(isCanonical((*progs)[0]));
    EXPECT_EQ((*progs)[0].constants.size(), c);
  }
}

TEST(EncodeSynth, PlainCnfMatchesIncremental) {
  const auto inst = superopt("(and x (sub x 1))", 4);
  CompiledBody body(inst);
  const auto in = points({12, 7});
  const auto ops = synthesisOpcodes();
  SynthEncoding enc = encodeSynth(inst, body, Shape{{2}, {1}}, 4, ops, in);
  EXPECT_GT(enc.cnf.numVars, 0u);
  sat::BuiltinBackend backend;
  auto model = backend.solve(enc.cnf, sat::Clock::time_point::max());
  ASSERT_TRUE(model);
  Witnesses progs = decodeModel(*model, enc.skeleton);
  EXPECT_NO_THROW(checkDecoded(inst, body, progs, 4, in));

  const std::string dimacs = sat::toDimacs(enc.cnf);
  EXPECT_EQ(dimacs.rfind("p cnf ", 0), 0u);
  EXPECT_EQ(sat::parseDimacs(dimacs).clauses.size(), enc.cnf.clauses.size());
}

// Two opcode selectors at once violates the one-hot clauses.
TEST(EncodeSynth, OneHotViolationIsRejected) {
  const auto inst = superopt("(and x (sub x 1))", 4);
  CompiledBody body(inst);
  const auto in = points({12});
  const auto ops = synthesisOpcodes();
  SynthEncoding enc = encodeSynth(inst, body, Shape{{2}, {1}}, 4, ops, in);
  sat::BuiltinBackend backend;
  auto model = backend.solve(enc.cnf, sat::Clock::time_point::max());
  ASSERT_TRUE(model);
  const auto &slot = enc.skeleton.functions[0].slots[0];
  std::vector<bool> bad = *model;
  for (Lit l : slot.opcode)
    bad[static_cast<std::size_t>(l.var())] = !l.negated();
  bool allSat = true;
  for (const auto &c : enc.cnf.clauses)
    allSat = allSat && clauseSatisfied(c, bad);
  EXPECT_FALSE(allSat);
}

TEST(EncodeSynth, CapacityCeiling) {
  const auto inst = superopt("(and x (sub x 1))", 4);
  CompiledBody body(inst);
  const auto ops = synthesisOpcodes();
  EXPECT_THROW(encodeSynth(inst, body, Shape{{2}, {1}}, 4, ops, points({1, 2}),
                           100),
               CapacityError);
}

TEST(EncodeSynth, EnginesAgree) {
  const auto inst = superopt("(and x (sub x 1))", 4);
  const auto in = points({12, 7, 0, 5});
  for (unsigned l = 1; l <= 2; ++l)
    for (unsigned c = 0; c <= l; ++c)
      EXPECT_EQ(solveShape(inst, Shape{{l}, {c}}, 4, in).has_value(),
                solveShape(inst, Shape{{l}, {c}}, 4, in, sat::Engine::Builtin)
                    .has_value())
          << l << " " << c;
}

// Satisfiable exactly when the explicit enumerator finds a witness, on small
// corpus cases at reduced width.
TEST(EncodeSynth, AgreesWithExplicitOnCorpus) {
  const char *exprs[] = {"(and x (sub x 1))", "(and x (add x 1))",
                         "(and x (neg x))",   "(xor x (sub x 1))",
                         "(or x (sub x 1))",  "(or x (add x 1))"};
  std::mt19937_64 rng(3);
  const auto ops = synthesisOpcodes();
  for (const char *e : exprs) {
    const auto inst = superopt(e, 3);
    CompiledBody body(inst);
    std::vector<Assignment> in;
    for (int k = 0; k < 3; ++k)
      in.push_back({{rng() & 7}});
    for (unsigned l = 1; l <= 2; ++l)
      for (unsigned c = 0; c <= 1; ++c) {
        const Shape sh{{l}, {c}};
        EXPECT_EQ(filterOnInputs(inst, body, sh, 3, ops, in).has_value(),
                  solveShape(inst, sh, 3, in).has_value())
            << e << " l=" << l << " c=" << c;
      }
  }
}

TEST(EncodeSynth, AgreesWithExplicitOnRandomInstances) {
  std::mt19937_64 rng(17);
  const auto ops = synthesisOpcodes();
  int sat = 0;
  for (int t = 0; t < 50; ++t) {
    const bool two = t % 3 == 0;
    const auto inst = superopt(randomExpr(rng, 2, two), 2, two ? "x y" : "x",
                               two ? 2 : 1);
    CompiledBody body(inst);
    std::vector<Assignment> in;
    for (int k = 0; k < 3; ++k) {
      Assignment a;
      for (std::size_t v = 0; v < inst.universals.size(); ++v)
        a.values.push_back(rng() & 3);
      in.push_back(a);
    }
    const unsigned l = 1 + static_cast<unsigned>(t % 2);
    const unsigned c = static_cast<unsigned>((t / 2) % 2);
    const Shape sh{{l}, {c}};
    const bool ex = filterOnInputs(inst, body, sh, 2, ops, in).has_value();
    EXPECT_EQ(ex, solveShape(inst, sh, 2, in).has_value()) << t;
    sat += ex;
  }
  // Both outcomes occur, so the agreement is not vacuous.
  EXPECT_GT(sat, 5);
  EXPECT_LT(sat, 45);
}

TEST(EncodeSynth, MultipleFunctions) {
  // f(x) xor g(x) = not x, one instruction each.
  const auto inst = instance(
      "(width 3)(exists-fun f (arity 1) (out 1) (function))"
      "(exists-fun g (arity 1) (out 1) (function))(forall x)"
      "(assert (eq (xor (app f x) (app g x)) (not x)))");
  const auto all = allPoints(inst, 3);
  auto progs = solveShape(inst, Shape{{1, 1}, {0, 0}}, 3, all);
  ASSERT_TRUE(progs);
  EXPECT_EQ(progs->size(), 2u);
}

TEST(SymbolicStrategy, FindsAndExhausts) {
  const auto inst = superopt("(and x (sub x 1))", 4);
  CompiledBody body(inst);
  const auto ops = synthesisOpcodes();
  const auto in = points({12, 7, 0, 5, 9, 1});
  SymbolicStrategy s;
  SynthContext ctx;
  ctx.instance = &inst;
  ctx.body = &body;
  ctx.opcodes = ops;
  ctx.inputs = in;
  ctx.params = {1, 1, 4};
  ctx.epoch = 1;
  Candidate out;
  StepStatus st;
  while ((st = s.step(ctx, 10, out)) == StepStatus::Continue) {
  }
  EXPECT_EQ(st, StepStatus::Exhausted);
  ctx.params = {2, 1, 4};
  ctx.epoch = 2;
  while ((st = s.step(ctx, 10, out)) == StepStatus::Continue) {
  }
  ASSERT_EQ(st, StepStatus::Found);
  EXPECT_EQ(out.origin, "symbolic");
  for (const auto &a : in)
    EXPECT_EQ(exec(out.programs[0], a.values)[0],
              a.values[0] & (a.values[0] - 1) & 15);
}

TEST(SymbolicStrategy, GivesUpOnFloat) {
  const auto inst = superopt("(fadd x x)", 32);
  CompiledBody body(inst);
  const auto ops = synthesisOpcodes();
  SymbolicStrategy s;
  SynthContext ctx;
  ctx.instance = &inst;
  ctx.body = &body;
  ctx.opcodes = ops;
  ctx.params = {1, 0, 32};
  Candidate out;
  EXPECT_EQ(s.step(ctx, 10, out), StepStatus::GaveUp);
}
