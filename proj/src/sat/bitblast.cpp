#include "sosat/bitblast.hpp"

#include <algorithm>
#include <bit>

namespace sosat {

void CnfSink::addClause(std::span<const Lit> lits) {
  std::vector<int> c;
  c.reserve(lits.size());
  for (Lit l : lits)
    c.push_back(l.negated() ? -(l.var() + 1) : (l.var() + 1));
  f_.clauses.push_back(std::move(c));
}

BitBlaster::BitBlaster(ClauseSink &sink) : sink_(sink) {
  true_ = Lit::make(sink_.newVar());
  assertLit(true_);
}

Lit BitBlaster::mkAnd(Lit a, Lit b) {
  if (a == f() || b == f() || a == ~b)
    return f();
  if (a == t() || a == b)
    return b;
  if (b == t())
    return a;
  if (b < a)
    std::swap(a, b);
  const Key k{0, a.x, b.x, 0};
  if (auto it = cache_.find(k); it != cache_.end())
    return it->second;
  const Lit o = fresh();
  clause({~o, a});
  clause({~o, b});
  clause({o, ~a, ~b});
  ++gates_;
  cache_.emplace(k, o);
  return o;
}

Lit BitBlaster::mkXor(Lit a, Lit b) {
  if (auto ca = constValue(a))
    return *ca ? ~b : b;
  if (auto cb = constValue(b))
    return *cb ? ~a : a;
  if (a == b)
    return f();
  if (a == ~b)
    return t();
  const bool flip = a.negated() != b.negated();
  a = Lit::make(a.var());
  b = Lit::make(b.var());
  if (b < a)
    std::swap(a, b);
  const Key k{1, a.x, b.x, 0};
  Lit o;
  if (auto it = cache_.find(k); it != cache_.end()) {
    o = it->second;
  } else {
    o = fresh();
    clause({~o, a, b});
    clause({~o, ~a, ~b});
    clause({o, ~a, b});
    clause({o, a, ~b});
    ++gates_;
    cache_.emplace(k, o);
  }
  return o ^ flip;
}

Lit BitBlaster::mkIte(Lit c, Lit a, Lit b) {
  if (auto cc = constValue(c))
    return *cc ? a : b;
  if (a == b)
    return a;
  if (a == ~b)
    return ~mkXor(c, a);
  if (a == t() || a == c)
    return mkOr(c, b);
  if (a == f() || a == ~c)
    return mkAnd(~c, b);
  if (b == f() || b == c)
    return mkAnd(c, a);
  if (b == t() || b == ~c)
    return mkOr(~c, a);
  if (c.negated()) {
    c = ~c;
    std::swap(a, b);
  }
  bool flip = false;
  if (a.negated()) {
    a = ~a;
    b = ~b;
    flip = true;
  }
  const Key k{2, c.x, a.x, b.x};
  Lit o;
  if (auto it = cache_.find(k); it != cache_.end()) {
    o = it->second;
  } else {
    o = fresh();
    clause({~c, ~a, o});
    clause({~c, a, ~o});
    clause({c, ~b, o});
    clause({c, b, ~o});
    clause({~a, ~b, o});
    clause({a, b, ~o});
    ++gates_;
    cache_.emplace(k, o);
  }
  return o ^ flip;
}

Lit BitBlaster::mkAnd(std::span<const Lit> ls) {
  Lit r = t();
  for (Lit l : ls)
    r = mkAnd(r, l);
  return r;
}

Lit BitBlaster::mkOr(std::span<const Lit> ls) {
  Lit r = f();
  for (Lit l : ls)
    r = mkOr(r, l);
  return r;
}

Bits BitBlaster::constant(Word v, unsigned w) const {
  Bits b(w);
  for (unsigned i = 0; i < w; ++i)
    b[i] = ((v >> i) & 1) ? t() : f();
  return b;
}

Bits BitBlaster::freshBits(unsigned w) {
  Bits b(w);
  for (auto &l : b)
    l = fresh();
  return b;
}

std::optional<Word> BitBlaster::constWord(const Bits &b) const {
  Word v = 0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    auto c = constValue(b[i]);
    if (!c)
      return std::nullopt;
    if (*c)
      v |= Word{1} << i;
  }
  return v;
}

Bits BitBlaster::mux(Lit c, const Bits &a, const Bits &b) {
  Bits r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    r[i] = mkIte(c, a[i], b[i]);
  return r;
}

Lit BitBlaster::nonzero(const Bits &a) { return mkOr(a); }

Lit BitBlaster::equal(const Bits &a, const Bits &b) {
  Lit r = t();
  for (std::size_t i = 0; i < a.size(); ++i)
    r = mkAnd(r, ~mkXor(a[i], b[i]));
  return r;
}

Bits BitBlaster::add(const Bits &a, const Bits &b, Lit carry) {
  Bits r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Lit x = mkXor(a[i], b[i]);
    r[i] = mkXor(x, carry);
    if (i + 1 < a.size())
      carry = mkOr(mkAnd(a[i], b[i]), mkAnd(carry, x));
  }
  return r;
}

Bits BitBlaster::sub(const Bits &a, const Bits &b) {
  Bits nb(b.size());
  for (std::size_t i = 0; i < b.size(); ++i)
    nb[i] = ~b[i];
  return add(a, nb, t());
}

Bits BitBlaster::neg(const Bits &a) { return sub(constant(0, static_cast<unsigned>(a.size())), a); }

// a < b unsigned: no carry out of a + ~b + 1.
Lit BitBlaster::ult(const Bits &a, const Bits &b) {
  Lit carry = t();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Lit nb = ~b[i];
    const Lit x = mkXor(a[i], nb);
    carry = mkOr(mkAnd(a[i], nb), mkAnd(carry, x));
  }
  return ~carry;
}

Lit BitBlaster::slt(const Bits &a, const Bits &b) {
  Bits fa = a, fb = b;
  fa.back() = ~fa.back();
  fb.back() = ~fb.back();
  return ult(fa, fb);
}

Bits BitBlaster::mul(const Bits &x, const Bits &y) {
  const std::size_t w = x.size();
  // Rows come from the operand with more constant bits so zero rows vanish.
  auto constBits = [&](const Bits &b) {
    return std::count_if(b.begin(), b.end(),
                         [&](Lit l) { return constValue(l).has_value(); });
  };
  const bool swap = constBits(x) > constBits(y);
  const Bits &a = swap ? y : x;
  const Bits &b = swap ? x : y;
  Bits acc = constant(0, static_cast<unsigned>(w));
  for (std::size_t i = 0; i < w; ++i) {
    if (b[i] == f())
      continue;
    Bits row(w, f());
    for (std::size_t j = 0; j + i < w; ++j)
      row[i + j] = mkAnd(a[j], b[i]);
    acc = add(acc, row, f());
  }
  return acc;
}

std::pair<Bits, Bits> BitBlaster::udivrem(const Bits &a, const Bits &b) {
  const std::size_t w = a.size();
  Bits q(w, f());
  Bits r = constant(0, static_cast<unsigned>(w));
  Bits d(b);
  d.push_back(f());
  for (std::size_t k = w; k-- > 0;) {
    Bits shifted(w + 1);
    shifted[0] = a[k];
    for (std::size_t i = 0; i < w; ++i)
      shifted[i + 1] = r[i];
    const Lit geq = ~ult(shifted, d);
    const Bits diff = sub(shifted, d);
    q[k] = geq;
    for (std::size_t i = 0; i < w; ++i)
      r[i] = mkIte(geq, diff[i], shifted[i]);
  }
  return {q, r};
}

Bits BitBlaster::signedDivRem(const Bits &a, const Bits &b, bool wantRem) {
  const Lit sa = a.back(), sb = b.back();
  const Bits absA = mux(sa, neg(a), a);
  const Bits absB = mux(sb, neg(b), b);
  auto [q, r] = udivrem(absA, absB);
  const Lit bZero = ~nonzero(b);
  if (wantRem)
    return mux(bZero, a, mux(sa, neg(r), r));
  const Bits sq = mux(mkXor(sa, sb), neg(q), q);
  return mux(bZero, constant(widthMask(static_cast<unsigned>(a.size())),
                             static_cast<unsigned>(a.size())),
             sq);
}

Bits BitBlaster::shift(Opcode op, const Bits &a, const Bits &amount) {
  const auto w = static_cast<unsigned>(a.size());
  Bits s;
  if ((w & (w - 1)) == 0) {
    s.assign(amount.begin(), amount.begin() + std::countr_zero(w));
  } else {
    s = udivrem(amount, constant(w, w)).second;
  }
  Bits cur = a;
  const Lit sign = a.back();
  for (std::size_t k = 0; k < s.size(); ++k) {
    const std::size_t step = std::size_t{1} << k;
    if (step >= w)
      break; // amounts are < w, so higher bits of s are zero
    Bits next(w);
    for (std::size_t i = 0; i < w; ++i) {
      Lit moved;
      if (op == Opcode::Shl)
        moved = i >= step ? cur[i - step] : f();
      else if (i + step < w)
        moved = cur[i + step];
      else
        moved = op == Opcode::Ashr ? sign : f();
      next[i] = mkIte(s[k], moved, cur[i]);
    }
    cur = std::move(next);
  }
  return cur;
}

Bits BitBlaster::op(Opcode op, std::span<const Bits> args) {
  const auto w = static_cast<unsigned>(args[0].size());
  auto boolBits = [&](Lit l) {
    Bits r(w, f());
    r[0] = l;
    return r;
  };
  const Bits &a = args[0];
  switch (op) {
  case Opcode::Add:
    return add(a, args[1], f());
  case Opcode::Sub:
    return sub(a, args[1]);
  case Opcode::Mul:
    return mul(a, args[1]);
  case Opcode::Div:
    return signedDivRem(a, args[1], false);
  case Opcode::Mod:
    return signedDivRem(a, args[1], true);
  case Opcode::Neg:
    return neg(a);
  case Opcode::Min:
    return mux(slt(args[1], a), args[1], a);
  case Opcode::Max:
    return mux(slt(a, args[1]), args[1], a);
  case Opcode::And:
  case Opcode::Or:
  case Opcode::Xor: {
    Bits r(w);
    for (unsigned i = 0; i < w; ++i)
      r[i] = op == Opcode::And  ? mkAnd(a[i], args[1][i])
             : op == Opcode::Or ? mkOr(a[i], args[1][i])
                                : mkXor(a[i], args[1][i]);
    return r;
  }
  case Opcode::Not: {
    Bits r(w);
    for (unsigned i = 0; i < w; ++i)
      r[i] = ~a[i];
    return r;
  }
  case Opcode::Lshr:
  case Opcode::Ashr:
  case Opcode::Shl:
    return shift(op, a, args[1]);
  case Opcode::Le:
    return boolBits(~ult(args[1], a));
  case Opcode::Lt:
    return boolBits(ult(a, args[1]));
  case Opcode::Sle:
    return boolBits(~slt(args[1], a));
  case Opcode::Slt:
    return boolBits(slt(a, args[1]));
  case Opcode::Eq:
    return boolBits(equal(a, args[1]));
  case Opcode::Neq:
    return boolBits(~equal(a, args[1]));
  case Opcode::Implies:
    return boolBits(~mkAnd(nonzero(a), ~nonzero(args[1])));
  case Opcode::Ite:
    return mux(nonzero(a), args[1], args[2]);
  case Opcode::Fadd:
  case Opcode::Fsub:
  case Opcode::Fmul:
  case Opcode::Fdiv:
    throw Unsupported("floating-point opcodes are not bit-blasted");
  }
  throw InternalError("unhandled opcode in bit-blaster");
}

} // namespace sosat
