#include "sosat/bitblast.hpp"
#include "sosat/sat.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace sosat;
using sat::Lit;
using sat::Result;

namespace {

// Brute-force satisfiability of a small DIMACS clause set.
bool bruteSat(unsigned n, const std::vector<std::vector<int>> &clauses) {
  for (std::uint32_t m = 0; m < (1u << n); ++m) {
    bool all = true;
    for (const auto &c : clauses) {
      bool any = false;
      for (int l : c) {
        const bool v = (m >> (std::abs(l) - 1)) & 1;
        if ((l > 0) == v)
          any = true;
      }
      if (!any) {
        all = false;
        break;
      }
    }
    if (all)
      return true;
  }
  return false;
}

bool modelSatisfies(const std::vector<bool> &model,
                    const std::vector<std::vector<int>> &clauses) {
  for (const auto &c : clauses) {
    bool any = false;
    for (int l : c)
      if ((l > 0) == model[static_cast<std::size_t>(std::abs(l) - 1)])
        any = true;
    if (!any)
      return false;
  }
  return true;
}

} // namespace

TEST(Solver, Trivial) {
  sat::Solver s;
  auto x = s.newVar();
  EXPECT_TRUE(s.addClause({Lit::make(x)}));
  EXPECT_FALSE(s.addClause({Lit::make(x, true)}));
  EXPECT_EQ(s.solve(), Result::Unsat);

  sat::Solver t;
  auto a = t.newVar(), b = t.newVar();
  t.addClause({Lit::make(a), Lit::make(b)});
  ASSERT_EQ(t.solve(), Result::Sat);
  EXPECT_TRUE(t.modelValue(a) || t.modelValue(b));
}

TEST(Solver, RandomThreeSatAgainstBruteForce) {
  std::mt19937 rng(1);
  int sats = 0, unsats = 0;
  for (int iter = 0; iter < 400; ++iter) {
    const unsigned n = 3 + rng() % 10;
    const unsigned m = static_cast<unsigned>(n * (3.0 + (rng() % 30) / 10.0));
    sat::CnfFormula cnf;
    cnf.numVars = n;
    for (unsigned k = 0; k < m; ++k) {
      std::vector<int> c;
      for (int j = 0; j < 3; ++j) {
        int v = 1 + static_cast<int>(rng() % n);
        c.push_back(rng() % 2 ? v : -v);
      }
      cnf.addClause(c);
    }
    const bool expect = bruteSat(n, cnf.clauses);
    sat::BuiltinBackend backend;
    auto model = backend.solve(cnf, sat::Clock::time_point::max());
    ASSERT_EQ(model.has_value(), expect);
    if (model)
      ASSERT_TRUE(modelSatisfies(*model, cnf.clauses));
    (expect ? sats : unsats)++;
  }
  EXPECT_GT(sats, 50);
  EXPECT_GT(unsats, 50);
}

// Pigeonhole 7 into 6 needs real search and many learnt clauses.
TEST(Solver, PigeonholeUnsat) {
  const int P = 7, H = 6;
  sat::Solver s;
  std::vector<std::vector<sat::Var>> x(P, std::vector<sat::Var>(H));
  for (auto &row : x)
    for (auto &v : row)
      v = s.newVar();
  for (int p = 0; p < P; ++p) {
    std::vector<Lit> c;
    for (int h = 0; h < H; ++h)
      c.push_back(Lit::make(x[p][h]));
    s.addClause(c);
  }
  for (int h = 0; h < H; ++h)
    for (int p = 0; p < P; ++p)
      for (int q = p + 1; q < P; ++q)
        s.addClause({Lit::make(x[p][h], true), Lit::make(x[q][h], true)});
  EXPECT_EQ(s.solve(), Result::Unsat);
}

TEST(Solver, IncrementalAndAssumptions) {
  sat::Solver s;
  std::vector<sat::Var> v;
  for (int i = 0; i < 4; ++i)
    v.push_back(s.newVar());
  s.addClause({Lit::make(v[0]), Lit::make(v[1])});
  std::vector<Lit> assume{Lit::make(v[0], true)};
  ASSERT_EQ(s.solve(assume), Result::Sat);
  EXPECT_TRUE(s.modelValue(v[1]));
  s.addClause({Lit::make(v[1], true)});
  EXPECT_EQ(s.solve(assume), Result::Unsat);
  ASSERT_EQ(s.solve(), Result::Sat);
  EXPECT_TRUE(s.modelValue(v[0]));
  s.addClause({Lit::make(v[0], true)});
  EXPECT_EQ(s.solve(), Result::Unsat);
}

TEST(Solver, ConflictBudgetIsResumable) {
  const int P = 8, H = 7;
  sat::Solver s;
  std::vector<std::vector<sat::Var>> x(P, std::vector<sat::Var>(H));
  for (auto &row : x)
    for (auto &v : row)
      v = s.newVar();
  for (int p = 0; p < P; ++p) {
    std::vector<Lit> c;
    for (int h = 0; h < H; ++h)
      c.push_back(Lit::make(x[p][h]));
    s.addClause(c);
  }
  for (int h = 0; h < H; ++h)
    for (int p = 0; p < P; ++p)
      for (int q = p + 1; q < P; ++q)
        s.addClause({Lit::make(x[p][h], true), Lit::make(x[q][h], true)});
  sat::Limits lim;
  lim.conflicts = 50;
  int rounds = 0;
  Result r;
  do {
    r = s.solve({}, lim);
    ++rounds;
  } while (r == Result::Unknown && rounds < 100000);
  EXPECT_EQ(r, Result::Unsat);
  EXPECT_GT(rounds, 1);
}

TEST(Dimacs, RoundTripAndModel) {
  sat::CnfFormula cnf;
  cnf.numVars = 3;
  cnf.addClause({1, -2});
  cnf.addClause({2, 3});
  cnf.addClause({-1});
  const std::string text = sat::toDimacs(cnf);
  EXPECT_EQ(text.substr(0, 11), "p cnf 3 3\n1");
  sat::CnfFormula back = sat::parseDimacs("c comment\n" + text);
  EXPECT_EQ(back.numVars, 3u);
  EXPECT_EQ(back.clauses, cnf.clauses);

  auto model = sat::parseModel("s SATISFIABLE\nv -1 -2\nv 3 0\n", 3);
  ASSERT_TRUE(model);
  EXPECT_EQ(*model, (std::vector<bool>{false, false, true}));
  EXPECT_FALSE(sat::parseModel("s UNSATISFIABLE\n", 3));
  EXPECT_THROW(sat::parseModel("garbage\n", 3), BackendUnavailable);
  EXPECT_THROW(sat::parseDimacs("1 2 0\n"), SyntaxError);
}

TEST(ExternalBackend, MissingBinary) {
  sat::ExternalBackend b("/nonexistent/solver");
  sat::CnfFormula cnf;
  cnf.numVars = 1;
  cnf.addClause({1});
  EXPECT_THROW(b.solve(cnf, sat::Clock::time_point::max()), BackendUnavailable);
}

// ---------------------------------------------------------------------------
// The bit-blasted semantics of every opcode equal evalInstruction. Operands
// are free variables pinned by assumptions, so the clauses themselves are
// exercised rather than constant folding; the folded path is checked too.

namespace {

void checkOpcodeAgreement(Opcode op, unsigned w, std::size_t maxCases,
                          std::mt19937_64 &rng) {
  const unsigned n = opcodeArity(op);
  sat::Solver s;
  SolverSink sink(s);
  BitBlaster bb(sink);
  std::vector<Bits> in;
  for (unsigned k = 0; k < n; ++k)
    in.push_back(bb.freshBits(w));
  const Bits out = bb.op(op, in);

  const Word span = widthMask(w) + 1;
  std::size_t total = 1;
  for (unsigned k = 0; k < n; ++k)
    total *= static_cast<std::size_t>(span);
  const bool exhaustive = total <= maxCases;
  const std::size_t cases = exhaustive ? total : maxCases;
  for (std::size_t ci = 0; ci < cases; ++ci) {
    std::vector<Word> vals(n);
    std::size_t r = ci;
    for (unsigned k = 0; k < n; ++k) {
      vals[k] = exhaustive ? static_cast<Word>(r % span) : (rng() & widthMask(w));
      r /= static_cast<std::size_t>(span);
    }
    const Word expect = evalInstruction(op, vals, w);
    std::vector<Lit> assume;
    for (unsigned k = 0; k < n; ++k)
      for (unsigned i = 0; i < w; ++i)
        assume.push_back(in[k][i] ^ !((vals[k] >> i) & 1));
    ASSERT_EQ(s.solve(assume), Result::Sat);
    Word got = 0;
    for (unsigned i = 0; i < w; ++i)
      if (s.modelValue(out[i]))
        got |= Word{1} << i;
    ASSERT_EQ(got, expect) << opcodeName(op) << " w=" << w << " a=" << vals[0]
                           << " b=" << (n > 1 ? vals[1] : 0);

    // Folded path.
    std::vector<Bits> cin;
    for (unsigned k = 0; k < n; ++k)
      cin.push_back(bb.constant(vals[k], w));
    auto folded = bb.constWord(bb.op(op, cin));
    ASSERT_TRUE(folded.has_value()) << opcodeName(op);
    ASSERT_EQ(*folded, expect) << opcodeName(op) << " folded";
  }
}

} // namespace

TEST(BitBlast, AgreesWithInterpreterAtWidth4Exhaustive) {
  std::mt19937_64 rng(5);
  for (Opcode op : synthesisOpcodes(true))
    checkOpcodeAgreement(op, 4, 1u << 12, rng);
}

TEST(BitBlast, AgreesWithInterpreterOtherWidths) {
  std::mt19937_64 rng(9);
  for (unsigned w : {1u, 2u, 3u, 5u, 6u, 8u, 12u, 32u})
    for (Opcode op : synthesisOpcodes(true))
      checkOpcodeAgreement(op, w, w <= 3 ? 4096 : 150, rng);
}

TEST(BitBlast, FloatUnsupported) {
  sat::Solver s;
  SolverSink sink(s);
  BitBlaster bb(sink);
  std::vector<Bits> in{bb.freshBits(32), bb.freshBits(32)};
  EXPECT_THROW(bb.op(Opcode::Fadd, in), Unsupported);
}

TEST(BitBlast, StructuralHashingSharesGates) {
  sat::Solver s;
  SolverSink sink(s);
  BitBlaster bb(sink);
  Bits a = bb.freshBits(8), b = bb.freshBits(8);
  std::vector<Bits> args{a, b};
  bb.op(Opcode::Mul, args);
  const std::size_t g = bb.gateCount();
  bb.op(Opcode::Mul, args);
  EXPECT_EQ(bb.gateCount(), g);
}
