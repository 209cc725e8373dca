#include "oracle.hpp"

#include "sosat/lang.hpp"

#include <gtest/gtest.h>

#include <map>
#include <random>

using namespace sosat;

namespace {

Word eval2(Opcode op, Word a, Word b, unsigned w) {
  std::array<Word, 2> args{a, b};
  return evalInstruction(op, args, w);
}

Program p1(unsigned w) {
  Program p;
  p.arity = 1;
  p.width = w;
  p.constants = {1};
  p.body = {Instruction(Opcode::Sub, {Operand::input(0), Operand::constant(0)}),
            Instruction(Opcode::And, {Operand::input(0), Operand::temp(0)})};
  return p;
}

Program p9(unsigned w) {
  Program p;
  p.arity = 1;
  p.width = w;
  p.constants = {w - 1};
  p.body = {Instruction(Opcode::Ashr, {Operand::input(0), Operand::constant(0)}),
            Instruction(Opcode::Xor, {Operand::input(0), Operand::temp(0)}),
            Instruction(Opcode::Sub, {Operand::temp(1), Operand::temp(0)})};
  return p;
}

} // namespace

TEST(EvalInstruction, SpecExamples) {
  EXPECT_EQ(eval2(Opcode::Add, 3, 5, 8), 8u);
  EXPECT_EQ(eval2(Opcode::Add, 255, 1, 8), 0u);
  EXPECT_EQ(eval2(Opcode::Div, 5, 0, 8), 255u);
  EXPECT_EQ(eval2(Opcode::Mod, 5, 0, 8), 5u);
  EXPECT_EQ(eval2(Opcode::Slt, 0x80, 0x01, 8), 1u);
}

TEST(EvalInstruction, FloatNeedsWidth32) {
  EXPECT_THROW(eval2(Opcode::Fadd, 1, 2, 16), UnsupportedWidth);
  const Word one = 0x3f800000, two = 0x40000000, three = 0x40400000;
  EXPECT_EQ(eval2(Opcode::Fadd, one, two, 32), three);
}

// Every opcode against the oracle: exhaustive at w <= 4, sampled up to 64.
TEST(EvalInstruction, MatchesOracle) {
  std::mt19937_64 rng(7);
  for (Opcode op : allOpcodes()) {
    const std::string name(opcodeName(op));
    const unsigned n = opcodeArity(op);
    for (unsigned w : {1u, 2u, 3u, 4u, 7u, 8u, 13u, 32u, 63u, 64u}) {
      if (isFloatOpcode(op) && w != 32)
        continue;
      const Word m = widthMask(w);
      std::vector<std::vector<Word>> cases;
      if (w <= 4) {
        const Word span = m + 1;
        Word total = 1;
        for (unsigned k = 0; k < n; ++k)
          total *= span;
        for (Word i = 0; i < total; ++i) {
          std::vector<Word> a;
          Word r = i;
          for (unsigned k = 0; k < n; ++k) {
            a.push_back(r % span);
            r /= span;
          }
          cases.push_back(a);
        }
      } else {
        const Word edges[] = {0, 1, m, m - 1, signBit(w), signBit(w) - 1, 2};
        for (int i = 0; i < 400; ++i) {
          std::vector<Word> a;
          for (unsigned k = 0; k < n; ++k)
            a.push_back(rng() % 3 == 0 ? edges[rng() % 7] & m : rng() & m);
          cases.push_back(a);
        }
      }
      for (const auto &a : cases) {
        Word expect = 0;
        ASSERT_TRUE(oracle::eval(name, a, w, expect)) << name;
        const Word got = evalInstruction(op, a, w);
        if (isFloatOpcode(op) && std::isnan(oracle::asFloat(expect))) {
          EXPECT_TRUE(std::isnan(oracle::asFloat(got)));
          continue;
        }
        ASSERT_EQ(got, expect) << name << " w=" << w << " a0=" << a[0];
        ASSERT_EQ(got & ~m, 0u);
        if (isBooleanProducing(op))
          ASSERT_LE(got, 1u);
      }
    }
  }
}

TEST(Exec, SpecExamples) {
  std::vector<Word> x{0b01100};
  EXPECT_EQ(exec(p1(8), x), std::vector<Word>{0b01000});
  std::vector<Word> y{0xFB};
  EXPECT_EQ(exec(p9(8), y), std::vector<Word>{5});

  Program eight;
  eight.arity = 0;
  eight.width = 8;
  eight.constants = {8};
  EXPECT_EQ(exec(eight, {}), std::vector<Word>{8});
}

TEST(Exec, AgreesWithOracleOnP9) {
  std::vector<oracle::Step> steps = {
      {"ashr", {"x0", "c0"}}, {"xor", {"x0", "t1"}}, {"sub", {"t2", "t1"}}};
  for (unsigned w : {4u, 8u}) {
    for (Word x = 0; x <= widthMask(w); ++x) {
      std::vector<Word> in{x};
      EXPECT_EQ(exec(p9(w), in), oracle::run(steps, 1, {w - 1}, in, w));
    }
  }
}

TEST(Exec, RejectsMalformed) {
  Program p = p1(8);
  p.body[0].args[0] = Operand::temp(0);
  std::vector<Word> x{1};
  EXPECT_THROW(exec(p, x), MalformedProgram);
  EXPECT_THROW(exec(p1(8), std::vector<Word>{1, 2}), MalformedProgram);
}

TEST(Validate, Examples) {
  EXPECT_TRUE(validate(p1(8)).empty());

  Program self = p1(8);
  self.body[0].args[0] = Operand::temp(0);
  auto v = validate(self);
  ASSERT_FALSE(v.empty());
  EXPECT_NE(v.front().find("forward/self reference"), std::string::npos);

  Program range = p1(8);
  range.constants = {1, 2};
  range.body[0].args[1] = Operand::constant(2);
  v = validate(range);
  ASSERT_FALSE(v.empty());
  EXPECT_NE(v.front().find("constant index out of range"), std::string::npos);

  Program fl;
  fl.arity = 2;
  fl.width = 8;
  fl.body = {Instruction(Opcode::Fadd, {Operand::input(0), Operand::input(1)})};
  EXPECT_FALSE(validate(fl).empty());
}

TEST(IsCanonical, Examples) {
  EXPECT_TRUE(isCanonical(p1(8)));

  Program allConst;
  allConst.arity = 1;
  allConst.width = 8;
  allConst.constants = {1, 2};
  allConst.body = {
      Instruction(Opcode::Add, {Operand::constant(0), Operand::constant(1)})};
  EXPECT_FALSE(isCanonical(allConst));

  Program addZero;
  addZero.arity = 1;
  addZero.width = 8;
  addZero.constants = {0};
  addZero.body = {
      Instruction(Opcode::Add, {Operand::input(0), Operand::constant(0)})};
  EXPECT_FALSE(isCanonical(addZero));

  Program swapped;
  swapped.arity = 2;
  swapped.width = 8;
  swapped.body = {Instruction(Opcode::Mul, {Operand::input(1), Operand::input(0)})};
  EXPECT_FALSE(isCanonical(swapped));

  Program dup;
  dup.arity = 1;
  dup.width = 8;
  dup.constants = {3, 3};
  dup.body = {Instruction(Opcode::Sub, {Operand::input(0), Operand::constant(1)})};
  EXPECT_FALSE(isCanonical(dup));
}

TEST(Text, ParseP1) {
  Program p = parseProgram("prog 1 1 8 consts 1\nt1 = sub x0 c0 ; t2 = and x0 t1\n");
  EXPECT_EQ(p, p1(8));
}

TEST(Text, ArityError) {
  try {
    parseProgram("prog 1 1 8 consts\nt1 = and x0\n");
    FAIL() << "expected a syntax error";
  } catch (const SyntaxError &e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("operand"), std::string::npos);
  }
}

TEST(Text, OtherErrors) {
  EXPECT_THROW(parseProgram("prog 1 1 8 consts\nt1 = frob x0 x0\n"), SyntaxError);
  EXPECT_THROW(parseProgram("prog 1 1 8 consts\nt1 = add x0 t1\n"), SyntaxError);
  EXPECT_THROW(parseProgram("prog 1 1 8 consts 256\nt1 = add x0 c0\n"), SyntaxError);
  EXPECT_THROW(parseProgram("prog 1 1 8 consts\nt2 = add x0 x0\n"), SyntaxError);
  EXPECT_EQ(parseProgram("prog 1 1 8 consts 0xff\nt1 = add x0 c0 # c\n").constants[0],
            255u);
}

// Random valid programs survive print -> parse unchanged.
TEST(Text, RoundTripProperty) {
  std::mt19937_64 rng(11);
  const auto ops = allOpcodes();
  for (int iter = 0; iter < 2000; ++iter) {
    Program p;
    p.width = 1 + rng() % 64;
    p.arity = 1 + rng() % 3;
    const unsigned c = rng() % 3;
    for (unsigned k = 0; k < c; ++k)
      p.constants.push_back(rng() & widthMask(p.width));
    const unsigned l = 1 + rng() % 6;
    for (unsigned i = 0; i < l; ++i) {
      Opcode op;
      do
        op = ops[rng() % ops.size()];
      while (isFloatOpcode(op) && p.width != 32);
      Instruction inst;
      inst.op = op;
      for (unsigned k = 0; k < inst.arity(); ++k) {
        unsigned pick = rng() % 3;
        if (pick == 0 && c > 0)
          inst.args[k] = Operand::constant(rng() % c);
        else if (pick == 1 && i > 0)
          inst.args[k] = Operand::temp(rng() % i);
        else
          inst.args[k] = Operand::input(rng() % p.arity);
      }
      p.body.push_back(inst);
    }
    p.outCount = 1 + rng() % std::min<unsigned>(l, 2);
    ASSERT_TRUE(validate(p).empty());
    ASSERT_EQ(parseProgram(prettyPrint(p)), p) << prettyPrint(p);
  }
}

// Whenever an instruction is on the nop list, it equals the forwarded operand
// on every input, so removing it and rewiring uses is sound.
TEST(Canonical, NopSoundness) {
  std::size_t checked = 0;
  for (unsigned w = 1; w <= 6; ++w) {
    const Word span = widthMask(w) + 1;
    // Two inputs plus one constant exhaustively up to w=4; then one input.
    const bool twoInputs = w <= 4;
    std::vector<Operand> pool = {Operand::input(0), Operand::constant(0)};
    if (twoInputs)
      pool.push_back(Operand::input(1));
    for (Opcode op : synthesisOpcodes(true)) {
      const unsigned n = opcodeArity(op);
      std::size_t combos = 1;
      for (unsigned k = 0; k < n; ++k)
        combos *= pool.size();
      for (std::size_t ci = 0; ci < combos; ++ci) {
        Instruction inst;
        inst.op = op;
        std::size_t r = ci;
        for (unsigned k = 0; k < n; ++k) {
          inst.args[k] = pool[r % pool.size()];
          r /= pool.size();
        }
        for (Word c = 0; c < span; ++c) {
          std::vector<Word> consts{c};
          auto fwd = nopForward(inst, consts, w);
          if (!fwd)
            continue;
          ++checked;
          const Word ySpan = twoInputs ? span : 1;
          for (Word x = 0; x < span; ++x) {
            for (Word y = 0; y < ySpan; ++y) {
              auto value = [&](const Operand &o) {
                return o.isConst() ? c : o.index == 0 ? x : y;
              };
              std::array<Word, 3> a{};
              for (unsigned k = 0; k < n; ++k)
                a[k] = value(inst.args[k]);
              ASSERT_EQ(evalInstruction(op, {a.data(), n}, w), value(*fwd))
                  << opcodeName(op) << " w=" << w;
            }
          }
        }
      }
    }
  }
  EXPECT_GT(checked, 500u);
}

// Every program of length <= 2 over one input and at most one constant has
// a canonical equivalent that is no longer.
TEST(Canonical, CompletenessSmallPrograms) {
  const auto ops = synthesisOpcodes(true);
  for (unsigned w = 1; w <= 4; ++w) {
    const Word span = widthMask(w) + 1;
    for (unsigned c = 0; c <= 1; ++c) {
      auto operandsFor = [&](unsigned temps) {
        std::vector<Operand> pool = {Operand::input(0)};
        if (c)
          pool.push_back(Operand::constant(0));
        for (unsigned t = 0; t < temps; ++t)
          pool.push_back(Operand::temp(t));
        return pool;
      };
      auto instructions = [&](unsigned temps) {
        std::vector<Instruction> out;
        auto pool = operandsFor(temps);
        for (Opcode op : ops) {
          const unsigned n = opcodeArity(op);
          std::size_t combos = 1;
          for (unsigned k = 0; k < n; ++k)
            combos *= pool.size();
          for (std::size_t ci = 0; ci < combos; ++ci) {
            Instruction inst;
            inst.op = op;
            std::size_t r = ci;
            for (unsigned k = 0; k < n; ++k) {
              inst.args[k] = pool[r % pool.size()];
              r /= pool.size();
            }
            out.push_back(inst);
          }
        }
        return out;
      };
      const auto first = instructions(0);
      const auto second = instructions(1);
      const Word cvals = c ? span : 1;
      for (Word cv = 0; cv < cvals; ++cv) {
        auto check = [&](const Program &p) {
          Program q = canonicalize(p);
          ASSERT_TRUE(validate(q).empty()) << prettyPrint(p);
          ASSERT_TRUE(isCanonical(q)) << prettyPrint(p) << "->\n" << prettyPrint(q);
          ASSERT_LE(q.length(), p.length());
          for (Word x = 0; x < span; ++x) {
            std::vector<Word> in{x};
            ASSERT_EQ(exec(q, in), exec(p, in)) << prettyPrint(p);
          }
        };
        Program p;
        p.arity = 1;
        p.width = w;
        if (c)
          p.constants = {cv};
        for (const auto &a : first) {
          p.body = {a};
          check(p);
          if (w > 2)
            continue; // length 2 exhaustively only at small widths
          for (const auto &b : second) {
            p.body = {a, b};
            check(p);
          }
        }
      }
    }
  }
}

// Length-2 programs at w=3,4 are sampled rather than enumerated.
TEST(Canonical, CompletenessSampled) {
  std::mt19937_64 rng(3);
  const auto ops = synthesisOpcodes(true);
  for (int iter = 0; iter < 20000; ++iter) {
    Program p;
    p.width = 3 + rng() % 2;
    p.arity = 1 + rng() % 2;
    const unsigned c = rng() % 3;
    for (unsigned k = 0; k < c; ++k)
      p.constants.push_back(rng() & widthMask(p.width));
    for (unsigned i = 0; i < 2; ++i) {
      Instruction inst;
      inst.op = ops[rng() % ops.size()];
      for (unsigned k = 0; k < inst.arity(); ++k) {
        unsigned pick = rng() % 3;
        if (pick == 0 && c > 0)
          inst.args[k] = Operand::constant(rng() % c);
        else if (pick == 1 && i > 0)
          inst.args[k] = Operand::temp(0);
        else
          inst.args[k] = Operand::input(rng() % p.arity);
      }
      p.body.push_back(inst);
    }
    Program q = canonicalize(p);
    ASSERT_TRUE(isCanonical(q)) << prettyPrint(p);
    ASSERT_LE(q.length(), p.length());
    const Word span = widthMask(p.width) + 1;
    for (Word x = 0; x < span; ++x)
      for (Word y = 0; y < (p.arity == 2 ? span : 1); ++y) {
        std::vector<Word> in{x};
        if (p.arity == 2)
          in.push_back(y);
        ASSERT_EQ(exec(q, in), exec(p, in)) << prettyPrint(p);
      }
  }
}

TEST(Canonical, ArityZeroBecomesDegenerate) {
  Program p;
  p.arity = 0;
  p.width = 8;
  p.constants = {3, 5};
  p.body = {Instruction(Opcode::Add, {Operand::constant(0), Operand::constant(1)})};
  Program q = canonicalize(p);
  EXPECT_TRUE(q.isDegenerate());
  EXPECT_EQ(q.constants, std::vector<Word>{8});
}

// Table lookup with eq/ite realises every unary function on 2-bit words.
TEST(Universality, EveryTwoBitFunction) {
  const unsigned w = 2;
  for (unsigned code = 0; code < 256; ++code) {
    Word table[4];
    for (unsigned v = 0; v < 4; ++v)
      table[v] = (code >> (2 * v)) & 3;
    Program p;
    p.arity = 1;
    p.width = w;
    p.constants = {0, 1, 2, 3};
    // r = table[3]; for v = 2..0: r = ite(eq(x, v), table[v], r)
    p.body.push_back(Instruction(
        Opcode::Ite, {Operand::input(0), Operand::constant(static_cast<std::uint32_t>(table[3])),
                      Operand::constant(static_cast<std::uint32_t>(table[3]))}));
    for (int v = 2; v >= 0; --v) {
      const auto cur = static_cast<std::uint32_t>(p.body.size() - 1);
      p.body.push_back(Instruction(
          Opcode::Eq, {Operand::input(0), Operand::constant(static_cast<std::uint32_t>(v))}));
      p.body.push_back(Instruction(
          Opcode::Ite, {Operand::temp(cur + 1),
                        Operand::constant(static_cast<std::uint32_t>(table[v])),
                        Operand::temp(cur)}));
    }
    for (Word x = 0; x < 4; ++x) {
      std::vector<Word> in{x};
      ASSERT_EQ(exec(p, in)[0], table[x]) << code;
    }
  }
}
