#include "sosat/explicit.hpp"

#include <algorithm>

namespace sosat {

std::uint64_t valueCount(unsigned width) {
  return width >= 63 ? (std::uint64_t{1} << 63) : (std::uint64_t{1} << width);
}

Word constantAtRank(std::uint64_t rank, unsigned width) {
  const Word m = widthMask(width);
  std::vector<Word> front;
  for (Word v : {Word{0}, Word{1}, m, signBit(width)})
    if (std::find(front.begin(), front.end(), v & m) == front.end())
      front.push_back(v & m);
  if (rank < front.size())
    return front[rank];
  Word v = rank - front.size();
  std::sort(front.begin(), front.end());
  for (Word f : front)
    if (f <= v)
      ++v;
  return v & m;
}

ProgramEnumerator::ProgramEnumerator(unsigned arity, unsigned outCount,
                                     unsigned length, unsigned consts,
                                     unsigned width, std::vector<Opcode> opcodes)
    : ops_(std::move(opcodes)) {
  proto_.arity = arity;
  proto_.outCount = outCount;
  proto_.width = width;
  if (arity == 0) {
    done_ = length != 0;
    ranks_.assign(outCount, 0);
    proto_.constants.assign(outCount, 0);
    return;
  }
  if (length == 0 || length < outCount || consts > valueCount(width)) {
    done_ = true;
    return;
  }
  proto_.body.resize(length);
  proto_.constants.resize(consts);
  for (unsigned k = 0; k < consts; ++k)
    ranks_.push_back(k);
}

bool ProgramEnumerator::buildChoices() {
  const unsigned c = static_cast<unsigned>(proto_.constants.size());
  const unsigned k = proto_.arity;
  for (unsigned i = 0; i < c; ++i)
    proto_.constants[i] = constantAtRank(ranks_[i], proto_.width);
  choices_.assign(proto_.body.size(), {});
  pos_.assign(proto_.body.size(), 0);
  auto operand = [&](unsigned idx) {
    if (idx < c)
      return Operand::constant(idx);
    if (idx < c + k)
      return Operand::input(idx - c);
    return Operand::temp(idx - c - k);
  };
  for (std::size_t j = 0; j < proto_.body.size(); ++j) {
    const unsigned domain = c + k + static_cast<unsigned>(j);
    auto &list = choices_[j];
    for (Opcode op : ops_) {
      const unsigned a = opcodeArity(op);
      std::array<unsigned, 3> idx{};
      for (;;) {
        Instruction inst;
        inst.op = op;
        for (unsigned t = 0; t < a; ++t)
          inst.args[t] = operand(idx[t]);
        if (isCanonicalInstruction(inst, proto_.constants, proto_.width))
          list.push_back(inst);
        unsigned t = a;
        while (t > 0 && ++idx[t - 1] == domain)
          idx[--t] = 0;
        if (t == 0)
          break;
      }
    }
    if (list.empty())
      return false;
  }
  return true;
}

// Moves to the next table of pairwise distinct constant ranks with at least
// one canonical choice per slot.
bool ProgramEnumerator::advanceTable() {
  const std::uint64_t n = valueCount(proto_.width);
  for (;;) {
    std::size_t i = ranks_.size();
    for (;;) {
      if (i == 0)
        return false;
      --i;
      if (++ranks_[i] < n)
        break;
      ranks_[i] = 0;
    }
    bool distinct = true;
    for (std::size_t a = 0; a < ranks_.size() && distinct; ++a)
      for (std::size_t b = a + 1; b < ranks_.size(); ++b)
        if (ranks_[a] == ranks_[b]) {
          distinct = false;
          break;
        }
    if (distinct && buildChoices())
      return true;
  }
}

bool ProgramEnumerator::next(Program &out) {
  if (done_)
    return false;
  if (proto_.arity == 0) {
    if (started_) {
      const std::uint64_t n = valueCount(proto_.width);
      std::size_t i = ranks_.size();
      for (;;) {
        if (i == 0) {
          done_ = true;
          return false;
        }
        --i;
        if (++ranks_[i] < n)
          break;
        ranks_[i] = 0;
      }
    }
    started_ = true;
    for (std::size_t i = 0; i < ranks_.size(); ++i)
      proto_.constants[i] = constantAtRank(ranks_[i], proto_.width);
    changed_ = 0;
    ++produced_;
    out = proto_;
    return true;
  }

  std::size_t from = 0;
  if (!started_) {
    started_ = true;
    if (!buildChoices() && !advanceTable()) {
      done_ = true;
      return false;
    }
  } else {
    std::size_t i = pos_.size();
    for (;;) {
      if (i == 0) {
        if (!advanceTable()) {
          done_ = true;
          return false;
        }
        from = 0;
        break;
      }
      --i;
      if (++pos_[i] < choices_[i].size()) {
        from = i;
        break;
      }
      pos_[i] = 0;
    }
  }
  for (std::size_t j = from; j < pos_.size(); ++j)
    proto_.body[j] = choices_[j][pos_[j]];
  changed_ = from;
  ++produced_;
  if (out.body.size() != proto_.body.size() || from == 0 ||
      out.constants != proto_.constants || out.arity != proto_.arity) {
    out = proto_;
  } else {
    for (std::size_t j = from; j < pos_.size(); ++j)
      out.body[j] = proto_.body[j];
  }
  return true;
}

// ---------------------------------------------------------------------------

namespace {

/// Odometer over one enumerator per function.
class TupleCursor {
public:
  TupleCursor(const SynthesisInstance &inst, const Shape &shape, unsigned w,
              std::span<const Opcode> ops)
      : inst_(inst), shape_(shape), w_(w), ops_(ops.begin(), ops.end()) {
    programs_.resize(inst.functions.size());
    for (std::size_t i = 0; i < inst.functions.size(); ++i)
      enums_.push_back(make(i));
  }

  bool next() {
    if (!started_) {
      started_ = true;
      for (std::size_t i = 0; i < enums_.size(); ++i)
        if (!enums_[i].next(programs_[i]))
          return false;
      return true;
    }
    std::size_t i = enums_.size();
    while (i > 0) {
      --i;
      if (enums_[i].next(programs_[i])) {
        for (std::size_t k = i + 1; k < enums_.size(); ++k) {
          enums_[k] = make(k);
          if (!enums_[k].next(programs_[k]))
            return false;
        }
        return true;
      }
    }
    return false;
  }

  const Witnesses &programs() const { return programs_; }

private:
  ProgramEnumerator make(std::size_t i) const {
    const auto &f = inst_.functions[i];
    return ProgramEnumerator(f.arity, f.outCount, shape_.length[i],
                             shape_.consts[i], w_, ops_);
  }

  const SynthesisInstance &inst_;
  Shape shape_;
  unsigned w_;
  std::vector<Opcode> ops_;
  std::vector<ProgramEnumerator> enums_;
  Witnesses programs_;
  bool started_ = false;
};

} // namespace

std::optional<Witnesses> filterOnInputs(const SynthesisInstance &inst,
                                        const CompiledBody &body,
                                        const Shape &shape, unsigned width,
                                        std::span<const Opcode> opcodes,
                                        std::span<const Assignment> inputs) {
  TupleCursor cur(inst, shape, width, opcodes);
  BodyEvaluator ev(body);
  while (cur.next())
    if (satisfiesAll(ev, cur.programs(), inputs, width))
      return cur.programs();
  return std::nullopt;
}

struct ExplicitStrategy::State {
  std::uint64_t epoch = ~std::uint64_t{0};
  const CompiledBody *body = nullptr;
  std::unique_ptr<BodyEvaluator> ev;
  std::vector<Shape> shapes;
  std::size_t shapeIdx = 0;
  std::unique_ptr<TupleCursor> cursor;
  bool recheck = false;
  std::size_t lastFail = 0;
  std::vector<const Program *> ptrs;
};

ExplicitStrategy::ExplicitStrategy() : s_(std::make_unique<State>()) {}
ExplicitStrategy::~ExplicitStrategy() = default;

StepStatus ExplicitStrategy::step(const SynthContext &ctx,
                                  std::uint64_t budget, Candidate &out) {
  State &s = *s_;
  if (s.epoch != ctx.epoch || s.body != ctx.body) {
    s.epoch = ctx.epoch;
    s.body = ctx.body;
    s.ev = std::make_unique<BodyEvaluator>(*ctx.body);
    s.shapes = splits(*ctx.instance, ctx.params.l, ctx.params.c);
    s.shapeIdx = 0;
    s.cursor.reset();
    s.recheck = false;
    s.lastFail = 0;
  }
  const unsigned w = ctx.params.w;
  const auto inputs = ctx.inputs;

  auto passes = [&](const Witnesses &progs) {
    s.ptrs.clear();
    for (const auto &p : progs)
      s.ptrs.push_back(&p);
    if (inputs.empty())
      return true;
    if (s.lastFail >= inputs.size())
      s.lastFail = inputs.size() - 1;
    // The input that refuted the previous candidate usually refutes this one.
    if (!s.ev->holds(inputs[s.lastFail].values, s.ptrs, w))
      return false;
    for (std::size_t i = inputs.size(); i-- > 0;) {
      if (i == s.lastFail)
        continue;
      if (!s.ev->holds(inputs[i].values, s.ptrs, w)) {
        s.lastFail = i;
        return false;
      }
    }
    return true;
  };

  for (std::uint64_t n = 0; n < budget; ++n) {
    if ((n & 1023) == 1023 && ctx.stopRequested())
      return StepStatus::Continue;
    if (!s.recheck) {
      for (;;) {
        if (!s.cursor) {
          if (s.shapeIdx >= s.shapes.size())
            return StepStatus::Exhausted;
          s.cursor = std::make_unique<TupleCursor>(
              *ctx.instance, s.shapes[s.shapeIdx], w, ctx.opcodes);
        }
        if (s.cursor->next())
          break;
        s.cursor.reset();
        ++s.shapeIdx;
      }
    }
    s.recheck = false;
    if (passes(s.cursor->programs())) {
      // Stay on this tuple: it is rechecked against the next input set.
      s.recheck = true;
      out.programs = s.cursor->programs();
      out.origin = name();
      out.params = ctx.params;
      return StepStatus::Found;
    }
  }
  return StepStatus::Continue;
}

} // namespace sosat
