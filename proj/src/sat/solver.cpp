#include "sosat/sat.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace sosat::sat {

namespace {

constexpr Lit kUndefLit{0xFFFFFFFFu};
constexpr std::uint8_t kTrue = 0, kFalse = 1, kUndef = 2;

// Luby sequence scaled by y: 1 1 2 1 1 2 4 ...
double luby(double y, std::uint64_t x) {
  std::uint64_t size = 1;
  int seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  return std::pow(y, seq);
}

enum class Status { Sat, Unsat, Restart, Stop };

} // namespace

Solver::Solver() { arena_.reserve(1 << 16); }
Solver::~Solver() = default;

Var Solver::newVar() {
  const Var v = static_cast<Var>(assigns_.size());
  assigns_.push_back(kUndef);
  level_.push_back(0);
  reason_.push_back(kNoReason);
  polarity_.push_back(1);
  varAct_.push_back(0.0);
  seen_.push_back(0);
  heapIndex_.push_back(-1);
  lbdStamp_.push_back(0);
  watches_.emplace_back();
  watches_.emplace_back();
  heapInsert(v);
  return v;
}

Solver::CRef Solver::allocClause(std::span<const Lit> ls, bool isLearnt) {
  const CRef c = static_cast<CRef>(arena_.size());
  arena_.push_back(static_cast<std::uint32_t>(ls.size()));
  arena_.push_back(isLearnt ? 1u : 0u);
  arena_.push_back(0);
  for (Lit l : ls)
    arena_.push_back(l.x);
  return c;
}

void Solver::attach(CRef c) {
  const Lit *l = lits(c);
  watches_[(~l[0]).x].push_back({c, l[1]});
  watches_[(~l[1]).x].push_back({c, l[0]});
}

void Solver::detachAll() {
  for (auto &ws : watches_)
    ws.clear();
}

bool Solver::locked(CRef c) const {
  const Lit first = lits(c)[0];
  return reason_[static_cast<std::size_t>(first.var())] == c &&
         value(first) == kTrue;
}

void Solver::removeClause(CRef c) {
  markDeleted(c);
  wasted_ += 3 + csize(c);
}

bool Solver::addClause(std::span<const Lit> in) {
  if (!ok_)
    return false;
  cancelUntil(0);
  std::vector<Lit> ls(in.begin(), in.end());
  std::sort(ls.begin(), ls.end());
  std::size_t j = 0;
  Lit prev = kUndefLit;
  for (std::size_t i = 0; i < ls.size(); ++i) {
    const Lit l = ls[i];
    if (value(l) == kTrue || l == ~prev)
      return true;
    if (value(l) != kFalse && l != prev)
      ls[j++] = prev = l;
  }
  ls.resize(j);
  if (ls.empty()) {
    ok_ = false;
    return false;
  }
  if (ls.size() == 1) {
    enqueue(ls[0], kNoReason);
    ok_ = propagate() == kNoReason;
    return ok_;
  }
  const CRef c = allocClause(ls, false);
  clauses_.push_back(c);
  attach(c);
  return true;
}

void Solver::enqueue(Lit l, CRef reason) {
  const auto v = static_cast<std::size_t>(l.var());
  assigns_[v] = l.negated() ? kFalse : kTrue;
  level_[v] = decisionLevel();
  reason_[v] = reason;
  trail_.push_back(l);
}

Solver::CRef Solver::propagate() {
  CRef confl = kNoReason;
  while (qhead_ < trail_.size()) {
    const Lit p = trail_[qhead_++];
    auto &ws = watches_[p.x];
    ++stats_.propagations;
    std::size_t i = 0, j = 0;
    const std::size_t n = ws.size();
    while (i < n) {
      const Lit blocker = ws[i].blocker;
      if (value(blocker) == kTrue) {
        ws[j++] = ws[i++];
        continue;
      }
      const CRef cr = ws[i].cref;
      Lit *c = lits(cr);
      const Lit falseLit = ~p;
      if (c[0] == falseLit)
        std::swap(c[0], c[1]);
      ++i;
      const Lit first = c[0];
      const Watcher w{cr, first};
      if (first != blocker && value(first) == kTrue) {
        ws[j++] = w;
        continue;
      }
      const std::uint32_t size = csize(cr);
      bool moved = false;
      for (std::uint32_t k = 2; k < size; ++k) {
        if (value(c[k]) != kFalse) {
          c[1] = c[k];
          c[k] = falseLit;
          watches_[(~c[1]).x].push_back(w);
          moved = true;
          break;
        }
      }
      if (moved)
        continue;
      ws[j++] = w;
      if (value(first) == kFalse) {
        confl = cr;
        qhead_ = trail_.size();
        while (i < n)
          ws[j++] = ws[i++];
      } else {
        enqueue(first, cr);
      }
    }
    ws.resize(j);
    if (confl != kNoReason)
      break;
  }
  return confl;
}

bool Solver::litRedundant(Lit p, std::uint32_t abstractLevels) {
  analyzeStack_.clear();
  analyzeStack_.push_back(p);
  const std::size_t top = analyzeToClear_.size();
  while (!analyzeStack_.empty()) {
    const CRef c = reason_[static_cast<std::size_t>(analyzeStack_.back().var())];
    analyzeStack_.pop_back();
    const Lit *cl = lits(c);
    const std::uint32_t size = csize(c);
    for (std::uint32_t i = 1; i < size; ++i) {
      const Lit q = cl[i];
      const auto v = static_cast<std::size_t>(q.var());
      if (seen_[v] || level(q.var()) == 0)
        continue;
      if (reason_[v] != kNoReason && (abstractLevel(q.var()) & abstractLevels)) {
        seen_[v] = 1;
        analyzeStack_.push_back(q);
        analyzeToClear_.push_back(q);
      } else {
        for (std::size_t k = top; k < analyzeToClear_.size(); ++k)
          seen_[static_cast<std::size_t>(analyzeToClear_[k].var())] = 0;
        analyzeToClear_.resize(top);
        return false;
      }
    }
  }
  return true;
}

void Solver::analyze(CRef confl, std::vector<Lit> &out, int &btLevel,
                     std::uint32_t &lbdOut) {
  int pathC = 0;
  Lit p = kUndefLit;
  out.clear();
  out.push_back(kUndefLit);
  std::size_t index = trail_.size();
  do {
    if (learnt(confl))
      bumpClause(confl);
    const Lit *c = lits(confl);
    const std::uint32_t size = csize(confl);
    for (std::uint32_t j = (p == kUndefLit) ? 0 : 1; j < size; ++j) {
      const Lit q = c[j];
      const auto v = static_cast<std::size_t>(q.var());
      if (!seen_[v] && level(q.var()) > 0) {
        bumpVar(q.var());
        seen_[v] = 1;
        if (level(q.var()) >= decisionLevel())
          ++pathC;
        else
          out.push_back(q);
      }
    }
    do
      --index;
    while (!seen_[static_cast<std::size_t>(trail_[index].var())]);
    p = trail_[index];
    confl = reason_[static_cast<std::size_t>(p.var())];
    seen_[static_cast<std::size_t>(p.var())] = 0;
    --pathC;
  } while (pathC > 0);
  out[0] = ~p;

  // Recursive minimisation.
  analyzeToClear_.assign(out.begin(), out.end());
  std::uint32_t abstractLevels = 0;
  for (std::size_t i = 1; i < out.size(); ++i)
    abstractLevels |= abstractLevel(out[i].var());
  std::size_t j = 1;
  for (std::size_t i = 1; i < out.size(); ++i) {
    const auto v = static_cast<std::size_t>(out[i].var());
    if (reason_[v] == kNoReason || !litRedundant(out[i], abstractLevels))
      out[j++] = out[i];
  }
  out.resize(j);
  for (Lit l : analyzeToClear_)
    seen_[static_cast<std::size_t>(l.var())] = 0;

  if (out.size() == 1) {
    btLevel = 0;
  } else {
    std::size_t maxI = 1;
    for (std::size_t i = 2; i < out.size(); ++i)
      if (level(out[i].var()) > level(out[maxI].var()))
        maxI = i;
    std::swap(out[1], out[maxI]);
    btLevel = level(out[1].var());
  }

  ++lbdCounter_;
  lbdOut = 0;
  for (Lit l : out) {
    const auto lv = static_cast<std::size_t>(level(l.var()));
    if (lv >= lbdStamp_.size())
      lbdStamp_.resize(lv + 1, 0);
    if (lbdStamp_[lv] != lbdCounter_) {
      lbdStamp_[lv] = lbdCounter_;
      ++lbdOut;
    }
  }
}

void Solver::cancelUntil(int lvl) {
  if (decisionLevel() <= lvl)
    return;
  const std::size_t stop = static_cast<std::size_t>(trailLim_[static_cast<std::size_t>(lvl)]);
  for (std::size_t c = trail_.size(); c-- > stop;) {
    const auto v = static_cast<std::size_t>(trail_[c].var());
    assigns_[v] = kUndef;
    reason_[v] = kNoReason;
    polarity_[v] = trail_[c].negated() ? 1 : 0;
    if (!heapContains(static_cast<Var>(v)))
      heapInsert(static_cast<Var>(v));
  }
  qhead_ = stop;
  trail_.resize(stop);
  trailLim_.resize(static_cast<std::size_t>(lvl));
}

Lit Solver::pickBranch() {
  while (!heap_.empty()) {
    const Var v = heapPop();
    if (assigns_[static_cast<std::size_t>(v)] == kUndef)
      return Lit::make(v, polarity_[static_cast<std::size_t>(v)] != 0);
  }
  return kUndefLit;
}

// --- heap ------------------------------------------------------------------

void Solver::heapInsert(Var v) {
  heapIndex_[static_cast<std::size_t>(v)] = static_cast<int>(heap_.size());
  heap_.push_back(v);
  heapUp(heap_.size() - 1);
}

void Solver::heapUp(std::size_t i) {
  const Var v = heap_[i];
  const double a = varAct_[static_cast<std::size_t>(v)];
  while (i > 0) {
    const std::size_t parent = (i - 1) >> 1;
    if (varAct_[static_cast<std::size_t>(heap_[parent])] >= a)
      break;
    heap_[i] = heap_[parent];
    heapIndex_[static_cast<std::size_t>(heap_[i])] = static_cast<int>(i);
    i = parent;
  }
  heap_[i] = v;
  heapIndex_[static_cast<std::size_t>(v)] = static_cast<int>(i);
}

void Solver::heapDown(std::size_t i) {
  const Var v = heap_[i];
  const double a = varAct_[static_cast<std::size_t>(v)];
  const std::size_t n = heap_.size();
  for (;;) {
    std::size_t child = 2 * i + 1;
    if (child >= n)
      break;
    if (child + 1 < n && varAct_[static_cast<std::size_t>(heap_[child + 1])] >
                             varAct_[static_cast<std::size_t>(heap_[child])])
      ++child;
    if (varAct_[static_cast<std::size_t>(heap_[child])] <= a)
      break;
    heap_[i] = heap_[child];
    heapIndex_[static_cast<std::size_t>(heap_[i])] = static_cast<int>(i);
    i = child;
  }
  heap_[i] = v;
  heapIndex_[static_cast<std::size_t>(v)] = static_cast<int>(i);
}

Var Solver::heapPop() {
  const Var top = heap_.front();
  heapIndex_[static_cast<std::size_t>(top)] = -1;
  const Var last = heap_.back();
  heap_.pop_back();
  if (!heap_.empty()) {
    heap_[0] = last;
    heapIndex_[static_cast<std::size_t>(last)] = 0;
    heapDown(0);
  }
  return top;
}

void Solver::bumpVar(Var v) {
  auto &a = varAct_[static_cast<std::size_t>(v)];
  a += varInc_;
  if (a > 1e100) {
    for (double &x : varAct_)
      x *= 1e-100;
    varInc_ *= 1e-100;
  }
  if (heapContains(v))
    heapUp(static_cast<std::size_t>(heapIndex_[static_cast<std::size_t>(v)]));
}

void Solver::bumpClause(CRef c) {
  float &a = activity(c);
  a += clauseInc_;
  if (a > 1e20f) {
    for (CRef l : learnts_)
      activity(l) *= 1e-20f;
    clauseInc_ *= 1e-20f;
  }
}

// --- database management ---------------------------------------------------

void Solver::reduceDb() {
  std::vector<CRef> sorted = learnts_;
  std::sort(sorted.begin(), sorted.end(), [&](CRef a, CRef b) {
    if (lbd(a) != lbd(b))
      return lbd(a) > lbd(b);
    return activity(a) < activity(b);
  });
  const std::size_t half = sorted.size() / 2;
  std::size_t removed = 0;
  for (std::size_t i = 0; i < sorted.size() && removed < half; ++i) {
    const CRef c = sorted[i];
    if (lbd(c) <= 2 || csize(c) <= 2 || locked(c))
      continue;
    removeClause(c);
    ++removed;
  }
  if (removed == 0)
    return;
  learnts_.erase(std::remove_if(learnts_.begin(), learnts_.end(),
                                [&](CRef c) { return deleted(c); }),
                 learnts_.end());
  for (auto &ws : watches_)
    ws.erase(std::remove_if(ws.begin(), ws.end(),
                            [&](const Watcher &w) { return deleted(w.cref); }),
             ws.end());
  if (wasted_ * 2 > arena_.size())
    garbageCollect();
}

void Solver::simplifyDb() {
  auto satisfied = [&](CRef c) {
    const Lit *l = lits(c);
    for (std::uint32_t i = 0; i < csize(c); ++i)
      if (value(l[i]) == kTrue)
        return true;
    return false;
  };
  bool any = false;
  for (auto *list : {&clauses_, &learnts_}) {
    for (CRef c : *list)
      if (satisfied(c)) {
        removeClause(c);
        any = true;
      }
    list->erase(std::remove_if(list->begin(), list->end(),
                               [&](CRef c) { return deleted(c); }),
                list->end());
  }
  simpTrail_ = static_cast<int>(trail_.size());
  if (!any)
    return;
  // Level-0 reasons are never inspected; drop them so GC need not keep them.
  for (Lit l : trail_)
    reason_[static_cast<std::size_t>(l.var())] = kNoReason;
  for (auto &ws : watches_)
    ws.erase(std::remove_if(ws.begin(), ws.end(),
                            [&](const Watcher &w) { return deleted(w.cref); }),
             ws.end());
  if (wasted_ * 2 > arena_.size())
    garbageCollect();
}

void Solver::garbageCollect() {
  std::vector<std::uint32_t> fresh;
  fresh.reserve(arena_.size() - wasted_);
  auto relocate = [&](CRef c) {
    const CRef n = static_cast<CRef>(fresh.size());
    fresh.insert(fresh.end(), arena_.begin() + c,
                 arena_.begin() + c + 3 + csize(c));
    arena_[c + 2] = n; // forwarding pointer
    return n;
  };
  for (CRef &c : clauses_)
    c = relocate(c);
  for (CRef &c : learnts_)
    c = relocate(c);
  for (Lit l : trail_) {
    auto &r = reason_[static_cast<std::size_t>(l.var())];
    if (r != kNoReason)
      r = deleted(r) ? kNoReason : arena_[r + 2];
  }
  arena_.swap(fresh);
  wasted_ = 0;
  detachAll();
  for (CRef c : clauses_)
    attach(c);
  for (CRef c : learnts_)
    attach(c);
}

// --- search ----------------------------------------------------------------

Result Solver::search(std::int64_t maxConflicts, const Limits &limits,
                      std::int64_t &budgetLeft) {
  std::int64_t conflictC = 0;
  std::vector<Lit> learntClause;
  std::uint64_t decisionTick = 0;
  auto stopRequested = [&] {
    if (limits.cancel && limits.cancel->load(std::memory_order_relaxed))
      return true;
    return limits.deadline != Clock::time_point::max() &&
           Clock::now() >= limits.deadline;
  };
  for (;;) {
    const CRef confl = propagate();
    if (confl != kNoReason) {
      ++stats_.conflicts;
      ++conflictC;
      --budgetLeft;
      if (decisionLevel() == 0) {
        ok_ = false;
        return Result::Unsat;
      }
      int bt = 0;
      std::uint32_t lbdValue = 0;
      analyze(confl, learntClause, bt, lbdValue);
      cancelUntil(bt);
      if (learntClause.size() == 1) {
        enqueue(learntClause[0], kNoReason);
      } else {
        const CRef c = allocClause(learntClause, true);
        setLbd(c, lbdValue);
        learnts_.push_back(c);
        attach(c);
        bumpClause(c);
        enqueue(learntClause[0], c);
      }
      varInc_ /= varDecay_;
      clauseInc_ /= clauseDecay_;
      if ((stats_.conflicts & 255) == 0 && stopRequested())
        return Result::Unknown;
      continue;
    }

    if ((maxConflicts >= 0 && conflictC >= maxConflicts) ||
        (limits.conflicts >= 0 && budgetLeft <= 0)) {
      cancelUntil(0);
      return Result::Unknown; // restart or budget; caller decides
    }
    if (decisionLevel() == 0 && static_cast<int>(trail_.size()) > simpTrail_)
      simplifyDb();
    if (stats_.conflicts >= nextReduce_) {
      nextReduce_ = stats_.conflicts + 2000 + 300 * (stats_.restarts / 4);
      reduceDb();
    }

    Lit next = kUndefLit;
    while (decisionLevel() < static_cast<int>(assumptions_.size())) {
      const Lit a = assumptions_[static_cast<std::size_t>(decisionLevel())];
      if (value(a) == kTrue) {
        trailLim_.push_back(static_cast<int>(trail_.size()));
      } else if (value(a) == kFalse) {
        return Result::Unsat;
      } else {
        next = a;
        break;
      }
    }
    if (next == kUndefLit) {
      ++stats_.decisions;
      if ((++decisionTick & 1023) == 0 && stopRequested())
        return Result::Unknown;
      next = pickBranch();
      if (next == kUndefLit)
        return Result::Sat;
    }
    trailLim_.push_back(static_cast<int>(trail_.size()));
    enqueue(next, kNoReason);
  }
}

Result Solver::solve(std::span<const Lit> assumptions, const Limits &limits) {
  model_.clear();
  if (!ok_)
    return Result::Unsat;
  assumptions_.assign(assumptions.begin(), assumptions.end());
  std::int64_t budgetLeft =
      limits.conflicts >= 0 ? limits.conflicts : std::int64_t{1} << 62;
  Result r = Result::Unknown;
  for (;;) {
    const auto restartLen = static_cast<std::int64_t>(
        luby(2.0, stats_.restarts) * 100.0);
    const std::uint64_t before = stats_.conflicts;
    r = search(restartLen, limits, budgetLeft);
    if (r != Result::Unknown)
      break;
    ++stats_.restarts;
    if (limits.conflicts >= 0 && budgetLeft <= 0)
      break;
    if (limits.cancel && limits.cancel->load(std::memory_order_relaxed))
      break;
    if (limits.deadline != Clock::time_point::max() &&
        Clock::now() >= limits.deadline)
      break;
    (void)before;
  }
  if (r == Result::Sat) {
    model_.resize(assigns_.size());
    for (std::size_t v = 0; v < assigns_.size(); ++v)
      model_[v] = assigns_[v] == kTrue;
  }
  cancelUntil(0);
  return r;
}

} // namespace sosat::sat
