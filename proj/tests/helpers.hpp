// Instance builders and small independent checkers shared by the synthesis,
// verification and loop tests.
#pragma once

#include "oracle.hpp"
#include "sosat/formula.hpp"
#include "sosat/lang.hpp"
#include "sosat/synth.hpp"

#include <set>
#include <string>

namespace testing_helpers {

using namespace sosat;

/// exists P of the given arity with P(vars) = expr, universally over `vars`.
inline SynthesisInstance superopt(const std::string &expr, unsigned width,
                                  const std::string &vars = "x",
                                  unsigned arity = 1) {
  const std::string text = "(width " + std::to_string(width) +
                           ")(exists-fun P (arity " + std::to_string(arity) +
                           ") (out 1) (function))(forall " + vars +
                           ")(assert (eq (app P " + vars + ") " + expr + "))";
  return skolemize(parseFormula(text));
}

inline SynthesisInstance instance(const std::string &text) {
  return skolemize(parseFormula(text));
}

inline std::vector<Assignment> points(std::initializer_list<Word> xs) {
  std::vector<Assignment> out;
  for (Word x : xs)
    out.push_back({{x}});
  return out;
}

inline std::vector<Assignment> allPoints(const SynthesisInstance &inst,
                                         unsigned width) {
  std::vector<Assignment> out;
  unsigned bits = 0;
  for (const auto &v : inst.universals)
    bits += v.widthAt(width);
  for (Word k = 0; k < (Word{1} << bits); ++k) {
    Assignment a;
    Word rest = k;
    for (const auto &v : inst.universals) {
      const unsigned vw = v.widthAt(width);
      a.values.push_back(rest & widthMask(vw));
      rest >>= vw;
    }
    out.push_back(std::move(a));
  }
  return out;
}

/// Exhaustive truth of the body for every assignment at `width`, evaluated
/// through the public evaluator entry point with programs at `width`.
inline bool holdsEverywhere(const SynthesisInstance &inst,
                            const std::map<std::string, Program> &w,
                            unsigned width) {
  for (const Assignment &a : allPoints(inst, width))
    if (!evaluateBody(inst, a, w, width))
      return false;
  return true;
}

/// Canonicality written out from the rules, independent of the library.
inline bool oracleCanonical(const Program &p) {
  if (p.body.empty())
    return true;
  std::set<Word> seen;
  for (Word c : p.constants)
    if (!seen.insert(c).second)
      return false;
  const Word m = oracle::mask(p.width);
  auto rank = [](const Operand &o) {
    const int k = o.isConst() ? 0 : o.isInput() ? 1 : 2;
    return std::pair<int, std::uint32_t>(k, o.index);
  };
  auto constIs = [&](const Operand &o, Word v) {
    return o.isConst() && (p.constants[o.index] & m) == (v & m);
  };
  for (const Instruction &in : p.body) {
    const auto ops = in.operands();
    bool allConst = true;
    for (const Operand &o : ops)
      allConst = allConst && o.isConst();
    if (allConst)
      return false;
    const std::string name(opcodeName(in.op));
    const Operand &a = in.args[0], &b = in.args[1];
    const bool comm = name == "add" || name == "mul" || name == "and" ||
                      name == "or" || name == "xor" || name == "min" ||
                      name == "max" || name == "eq" || name == "neq";
    if (comm && rank(b) < rank(a))
      return false;
    if ((name == "add" || name == "xor" || name == "or") &&
        (constIs(a, 0) || constIs(b, 0)))
      return false;
    if (name == "sub" && constIs(b, 0))
      return false;
    if (name == "mul" && (constIs(a, 1) || constIs(b, 1)))
      return false;
    if (name == "div" && constIs(b, 1))
      return false;
    if ((name == "or" || name == "and") && a == b)
      return false;
    if (name == "and" && (constIs(a, m) || constIs(b, m)))
      return false;
    if (name == "ite" && a.isConst())
      return false;
  }
  return true;
}

} // namespace testing_helpers
