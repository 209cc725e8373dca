#include "sosat/synth.hpp"

namespace sosat {

std::map<std::string, Program> witnessMap(const SynthesisInstance &inst,
                                          const Witnesses &w) {
  std::map<std::string, Program> m;
  for (std::size_t i = 0; i < inst.functions.size(); ++i)
    m.emplace(inst.functions[i].name, w[i]);
  return m;
}

std::size_t totalLength(const Witnesses &w) {
  std::size_t n = 0;
  for (const auto &p : w)
    n += p.length();
  return n;
}

unsigned minimumLength(const SynthesisInstance &inst) {
  unsigned n = 0;
  for (const auto &f : inst.functions)
    if (f.arity > 0)
      n += f.outCount;
  return n;
}

bool hasProgramFunctions(const SynthesisInstance &inst) {
  for (const auto &f : inst.functions)
    if (f.arity > 0)
      return true;
  return false;
}

std::vector<Shape> splits(const SynthesisInstance &inst, unsigned l,
                          unsigned c) {
  const auto &fs = inst.functions;
  Shape base;
  base.length.assign(fs.size(), 0);
  base.consts.assign(fs.size(), 0);
  std::vector<std::size_t> prog;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (fs[i].arity == 0)
      base.consts[i] = fs[i].outCount;
    else
      prog.push_back(i);
  }
  std::vector<Shape> out;
  if (prog.empty()) {
    if (c == 0)
      out.push_back(base);
    return out;
  }
  // Minimum length still owed to functions after position k.
  std::vector<unsigned> owed(prog.size() + 1, 0);
  for (std::size_t k = prog.size(); k-- > 0;)
    owed[k] = owed[k + 1] + fs[prog[k]].outCount;

  Shape cur = base;
  auto rec = [&](auto &&self, std::size_t k, unsigned lLeft,
                 unsigned cLeft) -> void {
    const std::size_t f = prog[k];
    const unsigned lo = fs[f].outCount;
    if (k + 1 == prog.size()) {
      if (lLeft < lo || cLeft > lLeft)
        return;
      cur.length[f] = lLeft;
      cur.consts[f] = cLeft;
      out.push_back(cur);
      return;
    }
    for (unsigned li = lo; li + owed[k + 1] <= lLeft; ++li)
      for (unsigned ci = 0; ci <= std::min(li, cLeft); ++ci) {
        cur.length[f] = li;
        cur.consts[f] = ci;
        self(self, k + 1, lLeft - li, cLeft - ci);
      }
  };
  if (l >= owed[0])
    rec(rec, 0, l, c);
  return out;
}

bool satisfiesAll(BodyEvaluator &ev, const Witnesses &programs,
                  std::span<const Assignment> inputs, unsigned width) {
  std::vector<const Program *> ptrs;
  ptrs.reserve(programs.size());
  for (const auto &p : programs)
    ptrs.push_back(&p);
  for (const auto &a : inputs)
    if (!ev.holds(a.values, ptrs, width))
      return false;
  return true;
}

} // namespace sosat
