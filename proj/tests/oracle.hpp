// Reference semantics written independently of src/lang, used to check it.
// Everything goes through signed/unsigned __int128 arithmetic on explicit
// bit vectors rather than the library's mask helpers.
#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

namespace oracle {

using u64 = std::uint64_t;
using i128 = __int128;

inline u64 mask(unsigned w) {
  u64 m = 0;
  for (unsigned i = 0; i < w; ++i)
    m |= u64{1} << i;
  return m;
}

inline i128 sval(u64 v, unsigned w) {
  v &= mask(w);
  i128 x = static_cast<i128>(v);
  if (w > 0 && ((v >> (w - 1)) & 1))
    x -= static_cast<i128>(1) << w;
  return x;
}

inline u64 wrap(i128 v, unsigned w) {
  // Reduce modulo 2^w via repeated bit extraction.
  u64 out = 0;
  for (unsigned i = 0; i < w; ++i)
    if ((v >> i) & 1)
      out |= u64{1} << i;
  return out;
}

inline float asFloat(u64 v) {
  std::uint32_t b = static_cast<std::uint32_t>(v);
  float f;
  std::memcpy(&f, &b, 4);
  return f;
}

inline u64 fromFloat(float f) {
  std::uint32_t b;
  std::memcpy(&b, &f, 4);
  return b;
}

/// Evaluates opcode `name` at width `w`. Returns false for unknown names.
inline bool eval(const std::string &name, const std::vector<u64> &a,
                 unsigned w, u64 &out) {
  const u64 m = mask(w);
  auto A = [&](int i) { return a[i] & m; };
  auto S = [&](int i) { return sval(a[i], w); };
  if (name == "add")
    out = wrap(static_cast<i128>(A(0)) + A(1), w);
  else if (name == "sub")
    out = wrap(static_cast<i128>(A(0)) - A(1), w);
  else if (name == "mul")
    out = wrap(static_cast<i128>(A(0)) * static_cast<i128>(A(1)), w);
  else if (name == "div")
    out = S(1) == 0 ? m : wrap(S(0) / S(1), w);
  else if (name == "mod")
    out = S(1) == 0 ? A(0) : wrap(S(0) % S(1), w);
  else if (name == "neg")
    out = wrap(-S(0), w);
  else if (name == "min")
    out = S(0) <= S(1) ? A(0) : A(1);
  else if (name == "max")
    out = S(0) >= S(1) ? A(0) : A(1);
  else if (name == "and")
    out = A(0) & A(1);
  else if (name == "or")
    out = A(0) | A(1);
  else if (name == "xor")
    out = A(0) ^ A(1);
  else if (name == "not")
    out = m ^ A(0);
  else if (name == "lshr" || name == "ashr" || name == "shl") {
    unsigned s = static_cast<unsigned>(A(1) % w);
    u64 r = 0;
    for (unsigned i = 0; i < w; ++i) {
      int src = name == "shl" ? static_cast<int>(i) - static_cast<int>(s)
                              : static_cast<int>(i + s);
      u64 bit = 0;
      if (src >= 0 && src < static_cast<int>(w))
        bit = (A(0) >> src) & 1;
      else if (name == "ashr" && src >= static_cast<int>(w))
        bit = (A(0) >> (w - 1)) & 1;
      r |= bit << i;
    }
    out = r;
  } else if (name == "le")
    out = A(0) <= A(1);
  else if (name == "lt")
    out = A(0) < A(1);
  else if (name == "sle")
    out = S(0) <= S(1);
  else if (name == "slt")
    out = S(0) < S(1);
  else if (name == "eq")
    out = A(0) == A(1);
  else if (name == "neq")
    out = A(0) != A(1);
  else if (name == "implies")
    out = !(A(0) != 0 && A(1) == 0);
  else if (name == "ite")
    out = A(0) != 0 ? A(1) : A(2);
  else if (name == "fadd")
    out = fromFloat(asFloat(A(0)) + asFloat(A(1)));
  else if (name == "fsub")
    out = fromFloat(asFloat(A(0)) - asFloat(A(1)));
  else if (name == "fmul")
    out = fromFloat(asFloat(A(0)) * asFloat(A(1)));
  else if (name == "fdiv")
    out = fromFloat(asFloat(A(0)) / asFloat(A(1)));
  else
    return false;
  return true;
}

/// A tiny program form for the oracle: operands are strings like "x0",
/// "c1", "t2" (temps 1-based, as in the text format).
struct Step {
  std::string op;
  std::vector<std::string> args;
};

inline std::vector<u64> run(const std::vector<Step> &steps, unsigned outCount,
                            const std::vector<u64> &consts,
                            const std::vector<u64> &inputs, unsigned w) {
  std::vector<u64> temps;
  for (const Step &s : steps) {
    std::vector<u64> vals;
    for (const std::string &a : s.args) {
      const unsigned idx = static_cast<unsigned>(std::stoul(a.substr(1)));
      if (a[0] == 'x')
        vals.push_back(inputs.at(idx));
      else if (a[0] == 'c')
        vals.push_back(consts.at(idx));
      else
        vals.push_back(temps.at(idx - 1));
    }
    u64 r = 0;
    eval(s.op, vals, w, r);
    temps.push_back(r);
  }
  if (steps.empty())
    return consts;
  return {temps.end() - outCount, temps.end()};
}

} // namespace oracle
