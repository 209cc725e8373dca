#include "helpers.hpp"
#include "sosat/explicit.hpp"

#include <gtest/gtest.h>

#include <functional>

using namespace sosat;
using namespace testing_helpers;

namespace {

std::vector<Program> enumerateAll(unsigned arity, unsigned l, unsigned c,
                                  unsigned w, std::vector<Opcode> ops) {
  ProgramEnumerator e(arity, 1, l, c, w, std::move(ops));
  std::vector<Program> out;
  Program p;
  while (e.next(p))
    out.push_back(p);
  return out;
}

// Every raw program of the shape, filtered by the rule-by-rule check.
std::set<std::string> naiveCanonical(unsigned arity, unsigned l, unsigned c,
                                     unsigned w,
                                     const std::vector<Opcode> &ops) {
  std::set<std::string> out;
  const Word values = Word{1} << w;
  std::vector<Word> table(c, 0);
  std::vector<Instruction> body(l);

  std::function<void(unsigned)> slot = [&](unsigned j) {
    if (j == l) {
      Program p;
      p.arity = arity;
      p.width = w;
      p.constants = table;
      p.body = body;
      if (oracleCanonical(p))
        out.insert(prettyPrint(p));
      return;
    }
    std::vector<Operand> domain;
    for (unsigned k = 0; k < c; ++k)
      domain.push_back(Operand::constant(k));
    for (unsigned k = 0; k < arity; ++k)
      domain.push_back(Operand::input(k));
    for (unsigned k = 0; k < j; ++k)
      domain.push_back(Operand::temp(k));
    for (Opcode op : ops) {
      const unsigned ar = opcodeArity(op);
      std::size_t combos = 1;
      for (unsigned k = 0; k < ar; ++k)
        combos *= domain.size();
      for (std::size_t idx = 0; idx < combos; ++idx) {
        Instruction in;
        in.op = op;
        std::size_t rest = idx;
        for (unsigned k = 0; k < 3; ++k) {
          if (k < ar) {
            in.args[k] = domain[rest % domain.size()];
            rest /= domain.size();
          } else {
            in.args[k] = Operand::constant(0);
          }
        }
        body[j] = in;
        slot(j + 1);
      }
    }
  };

  std::function<void(unsigned)> tables = [&](unsigned k) {
    if (k == c) {
      slot(0);
      return;
    }
    for (Word v = 0; v < values; ++v) {
      table[k] = v;
      tables(k + 1);
    }
  };
  tables(0);
  return out;
}

} // namespace

TEST(ConstantOrder, FrontsSpecialValues) {
  EXPECT_EQ(constantAtRank(0, 8), 0u);
  EXPECT_EQ(constantAtRank(1, 8), 1u);
  EXPECT_EQ(constantAtRank(2, 8), 255u);
  EXPECT_EQ(constantAtRank(3, 8), 128u);
  EXPECT_EQ(constantAtRank(4, 8), 2u);
  EXPECT_EQ(constantAtRank(5, 8), 3u);
  std::set<Word> seen;
  for (std::uint64_t r = 0; r < 16; ++r)
    seen.insert(constantAtRank(r, 4));
  EXPECT_EQ(seen.size(), 16u);
  // Width 1: 0 and 1 are also all-ones and the sign bit.
  EXPECT_EQ(valueCount(1), 2u);
  EXPECT_EQ(constantAtRank(0, 1), 0u);
  EXPECT_EQ(constantAtRank(1, 1), 1u);
}

TEST(Enumerate, UnaryOnlyLengthOne) {
  auto progs = enumerateAll(1, 1, 0, 1, {Opcode::Neg, Opcode::Not});
  ASSERT_EQ(progs.size(), 2u);
  EXPECT_EQ(progs[0].body[0].op, Opcode::Neg);
  EXPECT_EQ(progs[1].body[0].op, Opcode::Not);
  for (const auto &p : progs)
    EXPECT_EQ(p.body[0].args[0], Operand::input(0));
}

TEST(Enumerate, LengthZeroIsEmpty) {
  EXPECT_TRUE(enumerateAll(1, 0, 0, 4, synthesisOpcodes()).empty());
  EXPECT_TRUE(enumerateAll(2, 0, 1, 4, synthesisOpcodes()).empty());
}

TEST(Enumerate, DegenerateFormsForArityZero) {
  ProgramEnumerator e(0, 2, 0, 2, 2, synthesisOpcodes());
  Program p;
  std::set<std::vector<Word>> seen;
  while (e.next(p)) {
    EXPECT_TRUE(p.isDegenerate());
    seen.insert(p.constants);
  }
  EXPECT_EQ(seen.size(), 16u); // every pair of 2-bit outputs
}

// Set equality with the naive generator on small shapes.
TEST(Enumerate, MatchesNaiveGenerator) {
  const auto ops = synthesisOpcodes();
  struct Case {
    unsigned arity, l, c, w;
  };
  const Case cases[] = {{1, 1, 0, 1}, {1, 1, 1, 1}, {1, 1, 2, 1},
                        {2, 1, 0, 1}, {2, 1, 1, 2}, {1, 2, 0, 1},
                        {1, 2, 1, 1}, {1, 2, 0, 2}, {1, 2, 1, 2},
                        {2, 2, 0, 1}};
  for (const Case &k : cases) {
    const auto progs = enumerateAll(k.arity, k.l, k.c, k.w, ops);
    std::set<std::string> got;
    for (const auto &p : progs) {
      EXPECT_TRUE(isCanonical(p));
      EXPECT_TRUE(validate(p).empty());
      got.insert(prettyPrint(p));
    }
    EXPECT_EQ(got.size(), progs.size())
        << "duplicates at arity " << k.arity << " l " << k.l << " c " << k.c
        << " w " << k.w;
    EXPECT_EQ(got, naiveCanonical(k.arity, k.l, k.c, k.w, ops))
        << "arity " << k.arity << " l " << k.l << " c " << k.c << " w "
        << k.w;
  }
}

TEST(Enumerate, FirstChangedSlotTracksOdometer) {
  ProgramEnumerator e(1, 1, 3, 0, 2, synthesisOpcodes());
  Program prev, p;
  ASSERT_TRUE(e.next(prev));
  for (int i = 0; i < 5000 && e.next(p); ++i) {
    const std::size_t ch = e.firstChangedSlot();
    for (std::size_t j = 0; j < ch; ++j)
      ASSERT_EQ(p.body[j], prev.body[j]);
    prev = p;
  }
}

TEST(Enumerate, LengthOrderAcrossRestarts) {
  std::vector<std::size_t> lengths;
  for (unsigned l = 1; l <= 2; ++l)
    for (unsigned c = 0; c <= l; ++c)
      for (const auto &p : enumerateAll(1, l, c, 1, synthesisOpcodes()))
        lengths.push_back(p.length());
  EXPECT_TRUE(std::is_sorted(lengths.begin(), lengths.end()));
}

TEST(FilterOnInputs, P1) {
  const auto inst = superopt("(and x (sub x 1))", 4);
  CompiledBody body(inst);
  // {12, 7, 0} alone admits x & (x + x); 5, 9 and 1 rule that out.
  const auto inputs = points({12, 7, 0, 5, 9, 1});
  const auto ops = synthesisOpcodes();
  // Nothing of length 1 fits these points.
  for (unsigned c = 0; c <= 1; ++c)
    EXPECT_FALSE(filterOnInputs(inst, body, Shape{{1}, {c}}, 4, ops, inputs));
  auto found = filterOnInputs(inst, body, Shape{{2}, {1}}, 4, ops, inputs);
  ASSERT_TRUE(found);
  const Program &p = (*found)[0];
  EXPECT_EQ(prettyPrint(p), "prog 1 1 4 consts 1\nt1 = sub x0 c0\nt2 = and x0 t1\n");
  for (const auto &a : inputs)
    EXPECT_EQ(exec(p, a.values)[0], a.values[0] & (a.values[0] - 1));
}

TEST(FilterOnInputs, EmptyInputsGiveFirstProgram) {
  const auto inst = superopt("(and x (sub x 1))", 4);
  CompiledBody body(inst);
  const auto ops = synthesisOpcodes();
  auto found = filterOnInputs(inst, body, Shape{{1}, {0}}, 4, ops, {});
  ASSERT_TRUE(found);
  EXPECT_EQ((*found)[0], enumerateAll(1, 1, 0, 4, ops).front());
}

TEST(FilterOnInputs, ContradictoryInputs) {
  // P(x) = y cannot hold once two y values are stored for one x.
  const auto inst2 = instance("(width 4)(exists-fun P (arity 1) (out 1) (function))"
                              "(forall x y)(assert (eq (app P x) y))");
  CompiledBody body(inst2);
  std::vector<Assignment> in = {{{3, 1}}, {{3, 2}}};
  const auto ops = synthesisOpcodes();
  for (unsigned c = 0; c <= 2; ++c)
    EXPECT_FALSE(filterOnInputs(inst2, body, Shape{{2}, {c}}, 4, ops, in));
}

TEST(ExplicitStrategy, ExhaustsAndResumes) {
  const auto inst = superopt("(and x (sub x 1))", 4);
  CompiledBody body(inst);
  const auto ops = synthesisOpcodes();
  const auto inputs = points({12, 7, 0, 5, 9, 1});
  ExplicitStrategy s;
  SynthContext ctx;
  ctx.instance = &inst;
  ctx.body = &body;
  ctx.opcodes = ops;
  ctx.inputs = inputs;
  ctx.params = {1, 0, 4};
  ctx.epoch = 1;
  Candidate out;
  StepStatus st;
  std::size_t turns = 0;
  while ((st = s.step(ctx, 7, out)) == StepStatus::Continue)
    ++turns;
  EXPECT_EQ(st, StepStatus::Exhausted);
  EXPECT_GT(turns, 1u); // small budgets force several resumptions

  ctx.params = {2, 1, 4};
  ctx.epoch = 2;
  while ((st = s.step(ctx, 50, out)) == StepStatus::Continue) {
  }
  ASSERT_EQ(st, StepStatus::Found);
  EXPECT_EQ(out.origin, "explicit");
  EXPECT_EQ(out.params, ctx.params);
  BodyEvaluator ev(body);
  EXPECT_TRUE(satisfiesAll(ev, out.programs, inputs, 4));
}
