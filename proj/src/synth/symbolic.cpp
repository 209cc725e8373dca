#include "sosat/symbolic.hpp"

#include <algorithm>
#include <bit>

namespace sosat {

namespace {

Bits boolBits(BitBlaster &bb, Lit l, unsigned w) {
  Bits r(w, bb.f());
  r[0] = l;
  return r;
}

unsigned selectorBits(unsigned domain) {
  return domain <= 1 ? 0 : static_cast<unsigned>(std::bit_width(domain - 1));
}

// Picks values[index(sel)] with a binary mux tree; indices past the end are
// excluded by range clauses, so those leaves are pruned.
Bits selectOperand(BitBlaster &bb, const Bits &sel,
                   const std::vector<const Bits *> &values) {
  auto rec = [&](auto &&self, int bit, std::size_t offset) -> Bits {
    if (bit < 0)
      return *values[std::min(offset, values.size() - 1)];
    const std::size_t half = std::size_t{1} << bit;
    Bits lo = self(self, bit - 1, offset);
    if (offset + half >= values.size())
      return lo;
    Bits hi = self(self, bit - 1, offset + half);
    return bb.mux(sel[static_cast<std::size_t>(bit)], hi, lo);
  };
  return rec(rec, static_cast<int>(sel.size()) - 1, 0);
}

} // namespace

Lit blastBody(BitBlaster &bb, const CompiledBody &body, unsigned width,
              std::span<const Bits> vars, const AppBlaster &app) {
  const auto nodes = body.nodes();
  std::vector<Bits> val(nodes.size());
  const Word m = widthMask(width);
  std::vector<Bits> args;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto &n = nodes[i];
    const auto kids = body.children(n);
    switch (n.kind) {
    case ExprKind::Literal:
      val[i] = bb.constant(n.value & m, width);
      break;
    case ExprKind::WidthAtom:
      val[i] = bb.constant(n.atom == WidthAtom::Width  ? Word{width} & m
                           : n.atom == WidthAtom::Ones ? m
                                                       : signBit(width),
                           width);
      break;
    case ExprKind::Var:
      val[i] = vars[n.index];
      break;
    case ExprKind::Op: {
      args.clear();
      for (auto k : kids)
        args.push_back(val[k]);
      val[i] = bb.op(n.op, args);
      break;
    }
    case ExprKind::Bool: {
      Lit r;
      switch (n.boolOp) {
      case BoolOp::And:
        r = bb.t();
        for (auto k : kids)
          r = bb.mkAnd(r, bb.nonzero(val[k]));
        break;
      case BoolOp::Or:
        r = bb.f();
        for (auto k : kids)
          r = bb.mkOr(r, bb.nonzero(val[k]));
        break;
      case BoolOp::Not:
        r = ~bb.nonzero(val[kids[0]]);
        break;
      case BoolOp::Implies:
        r = bb.mkOr(~bb.nonzero(val[kids[0]]), bb.nonzero(val[kids[1]]));
        break;
      case BoolOp::Iff:
        r = ~bb.mkXor(bb.nonzero(val[kids[0]]), bb.nonzero(val[kids[1]]));
        break;
      }
      val[i] = boolBits(bb, r, width);
      break;
    }
    case ExprKind::App: {
      args.clear();
      for (auto k : kids)
        args.push_back(val[k]);
      val[i] = app(n.index, args, n.projection);
      break;
    }
    }
  }
  return bb.nonzero(val.back());
}

std::vector<Bits> blastProgram(BitBlaster &bb, const Program &p,
                               std::span<const Bits> args) {
  const unsigned w = p.width;
  if (p.isDegenerate()) {
    std::vector<Bits> outs;
    for (Word c : p.constants)
      outs.push_back(bb.constant(c, w));
    return outs;
  }
  std::vector<Bits> consts, temps;
  for (Word c : p.constants)
    consts.push_back(bb.constant(c, w));
  std::vector<Bits> ops;
  for (const Instruction &inst : p.body) {
    ops.clear();
    for (const Operand &o : inst.operands())
      ops.push_back(o.isConst()   ? consts[o.index]
                    : o.isInput() ? args[o.index]
                                  : temps[o.index]);
    temps.push_back(bb.op(inst.op, ops));
  }
  return {temps.end() - p.outCount, temps.end()};
}

// ---------------------------------------------------------------------------

void SynthEncoder::CountingSink::addClause(std::span<const Lit> lits) {
  if (++count > ceiling)
    throw CapacityError("synthesis encoding exceeds " +
                        std::to_string(ceiling) + " clauses");
  inner->addClause(lits);
}

SynthEncoder::SynthEncoder(const SynthesisInstance &inst,
                           const CompiledBody &body, const Shape &shape,
                           unsigned width, std::span<const Opcode> opcodes,
                           ClauseSink &sink, std::size_t clauseCeiling)
    : body_(body), width_(width),
      sink_([&] {
        CountingSink s;
        s.inner = &sink;
        s.ceiling = clauseCeiling;
        return s;
      }()),
      bb_(sink_) {
  sk_.width = width;
  sk_.opcodes.assign(opcodes.begin(), opcodes.end());
  for (std::size_t i = 0; i < inst.functions.size(); ++i) {
    FunctionSkeleton f;
    f.arity = inst.functions[i].arity;
    f.outCount = inst.functions[i].outCount;
    sk_.functions.push_back(std::move(f));
  }
  memo_.resize(sk_.functions.size());
  buildSkeleton(shape);
}

void SynthEncoder::buildSkeleton(const Shape &shape) {
  unsigned maxArity = 0;
  for (Opcode op : sk_.opcodes)
    maxArity = std::max(maxArity, opcodeArity(op));
  for (std::size_t i = 0; i < sk_.functions.size(); ++i) {
    FunctionSkeleton &f = sk_.functions[i];
    for (unsigned k = 0; k < shape.consts[i]; ++k)
      f.constants.push_back(bb_.freshBits(width_));
    const unsigned c = shape.consts[i];
    for (unsigned j = 0; j < shape.length[i]; ++j) {
      SlotSelectors s;
      for (std::size_t o = 0; o < sk_.opcodes.size(); ++o)
        s.opcode.push_back(bb_.fresh());
      const unsigned nb = selectorBits(c + f.arity + j);
      for (unsigned k = 0; k < maxArity; ++k)
        s.operand[k] = bb_.freshBits(nb);
      f.slots.push_back(std::move(s));
    }
    wellFormed(f);
  }
}

void SynthEncoder::wellFormed(const FunctionSkeleton &f) {
  BitBlaster &bb = bb_;
  const unsigned c = static_cast<unsigned>(f.constants.size());
  const Word m = widthMask(width_);
  unsigned maxArity = 0;
  for (Opcode op : sk_.opcodes)
    maxArity = std::max(maxArity, opcodeArity(op));

  for (std::size_t a = 0; a < f.constants.size(); ++a)
    for (std::size_t b = a + 1; b < f.constants.size(); ++b)
      bb.assertLit(~bb.equal(f.constants[a], f.constants[b]));

  // c_j holds the value v.
  std::map<Word, std::vector<Lit>> constIs;
  auto constIsValue = [&](Word v) -> const std::vector<Lit> & {
    auto it = constIs.find(v);
    if (it == constIs.end()) {
      std::vector<Lit> ls;
      for (const Bits &cb : f.constants)
        ls.push_back(bb.equal(cb, bb.constant(v, width_)));
      it = constIs.emplace(v, std::move(ls)).first;
    }
    return it->second;
  };

  for (std::size_t j = 0; j < f.slots.size(); ++j) {
    const SlotSelectors &s = f.slots[j];
    const unsigned domain = c + f.arity + static_cast<unsigned>(j);
    bb.addClause(s.opcode);
    for (std::size_t a = 0; a < s.opcode.size(); ++a)
      for (std::size_t b = a + 1; b < s.opcode.size(); ++b)
        bb.addClause(std::vector<Lit>{~s.opcode[a], ~s.opcode[b]});

    const unsigned nb = selectorBits(domain);
    std::array<Lit, 3> isConst{};
    for (unsigned k = 0; k < maxArity; ++k) {
      const Bits &sel = s.operand[k];
      if (nb > 0 && (domain & (domain - 1)) != 0)
        bb.assertLit(bb.ult(sel, bb.constant(domain, nb)));
      isConst[k] = c == 0 ? bb.f()
                   : nb == 0 ? bb.t()
                             : bb.ult(sel, bb.constant(c, nb));
    }
    auto selEq = [&](unsigned k, Word idx) {
      return bb.equal(s.operand[k], bb.constant(idx, nb));
    };
    // The operand at position k is a constant whose value is v.
    auto operandIs = [&](unsigned k, Word v) {
      const auto &ci = constIsValue(v & m);
      Lit r = bb.f();
      for (unsigned t = 0; t < c; ++t)
        r = bb.mkOr(r, bb.mkAnd(selEq(k, t), ci[t]));
      return r;
    };
    auto sameOperand = [&]() { return bb.equal(s.operand[0], s.operand[1]); };

    for (std::size_t o = 0; o < sk_.opcodes.size(); ++o) {
      const Opcode op = sk_.opcodes[o];
      const Lit on = s.opcode[o];
      const unsigned ar = opcodeArity(op);
      auto forbid = [&](Lit bad) {
        if (bad != bb.f())
          bb.addClause(std::vector<Lit>{~on, ~bad});
      };
      for (unsigned k = ar; k < 3; ++k)
        for (Lit bit : s.operand[k])
          bb.addClause(std::vector<Lit>{~on, ~bit});
      Lit allConst = bb.t();
      for (unsigned k = 0; k < ar; ++k)
        allConst = bb.mkAnd(allConst, isConst[k]);
      forbid(allConst);
      if (isCommutative(op) && nb > 0)
        forbid(bb.ult(s.operand[1], s.operand[0]));
      switch (op) {
      case Opcode::Add:
      case Opcode::Xor:
        forbid(operandIs(0, 0));
        forbid(operandIs(1, 0));
        break;
      case Opcode::Or:
        forbid(operandIs(0, 0));
        forbid(operandIs(1, 0));
        forbid(sameOperand());
        break;
      case Opcode::Sub:
        forbid(operandIs(1, 0));
        break;
      case Opcode::Mul:
        forbid(operandIs(0, 1));
        forbid(operandIs(1, 1));
        break;
      case Opcode::Div:
        forbid(operandIs(1, 1));
        break;
      case Opcode::And:
        forbid(operandIs(0, m));
        forbid(operandIs(1, m));
        forbid(sameOperand());
        break;
      case Opcode::Ite:
        forbid(isConst[0]);
        break;
      default:
        break;
      }
    }
  }
}

std::vector<Bits> SynthEncoder::instantiate(std::uint32_t fn,
                                            std::span<const Bits> args) {
  std::vector<std::uint32_t> key;
  for (const Bits &a : args)
    for (Lit l : a)
      key.push_back(l.x);
  auto &memo = memo_[fn];
  if (auto it = memo.find(key); it != memo.end())
    return it->second;

  BitBlaster &bb = bb_;
  const FunctionSkeleton &f = sk_.functions[fn];
  std::vector<Bits> outs;
  if (f.arity == 0) {
    outs = f.constants;
  } else {
    std::vector<const Bits *> domain;
    for (const Bits &cb : f.constants)
      domain.push_back(&cb);
    for (const Bits &a : args)
      domain.push_back(&a);
    std::vector<Bits> temps;
    temps.reserve(f.slots.size());
    std::vector<Bits> ops;
    for (const SlotSelectors &s : f.slots) {
      std::array<Bits, 3> operand;
      for (unsigned k = 0; k < 3; ++k)
        if (!s.operand[k].empty() || domain.size() == 1)
          operand[k] = selectOperand(bb, s.operand[k], domain);
      // Exactly one selector holds, so each one pins the result to its
      // operation's output.
      Bits result = bb.freshBits(width_);
      for (std::size_t o = 0; o < sk_.opcodes.size(); ++o) {
        const Opcode op = sk_.opcodes[o];
        ops.assign(operand.begin(), operand.begin() + opcodeArity(op));
        for (auto &b : ops)
          if (b.empty())
            b = operand[0];
        const Bits r = bb.op(op, ops);
        for (unsigned i = 0; i < width_; ++i) {
          bb.addClause(std::vector<Lit>{~s.opcode[o], ~r[i], result[i]});
          bb.addClause(std::vector<Lit>{~s.opcode[o], r[i], ~result[i]});
        }
      }
      temps.push_back(std::move(result));
      domain.push_back(&temps.back());
    }
    outs.assign(temps.end() - f.outCount, temps.end());
  }
  memo.emplace(std::move(key), outs);
  return outs;
}

void SynthEncoder::addInput(const Assignment &a) {
  const auto vars = body_.vars();
  std::vector<Bits> bits;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const unsigned ew = vars[i].widthAt(width_);
    bits.push_back(bb_.constant(a.values[i] & widthMask(ew), width_));
  }
  const Lit root = blastBody(
      bb_, body_, width_, bits,
      [&](std::uint32_t fn, std::span<const Bits> args, std::uint32_t proj) {
        return instantiate(fn, args)[proj];
      });
  bb_.assertLit(root);
}

SynthEncoding encodeSynth(const SynthesisInstance &inst,
                          const CompiledBody &body, const Shape &shape,
                          unsigned width, std::span<const Opcode> opcodes,
                          std::span<const Assignment> inputs,
                          std::size_t clauseCeiling) {
  SynthEncoding out;
  CnfSink sink(out.cnf);
  SynthEncoder enc(inst, body, shape, width, opcodes, sink, clauseCeiling);
  for (const auto &a : inputs)
    enc.addInput(a);
  out.skeleton = enc.skeleton();
  return out;
}

Witnesses decodeModel(const std::vector<bool> &model,
                      const ProgramSkeletonVars &sk) {
  auto value = [&](Lit l) {
    return model[static_cast<std::size_t>(l.var())] != l.negated();
  };
  auto word = [&](const Bits &b) {
    Word v = 0;
    for (std::size_t i = 0; i < b.size(); ++i)
      if (value(b[i]))
        v |= Word{1} << i;
    return v;
  };
  Witnesses out;
  for (const FunctionSkeleton &f : sk.functions) {
    Program p;
    p.arity = f.arity;
    p.outCount = f.outCount;
    p.width = sk.width;
    for (const Bits &c : f.constants)
      p.constants.push_back(word(c));
    const unsigned c = static_cast<unsigned>(f.constants.size());
    for (const SlotSelectors &s : f.slots) {
      Instruction inst;
      std::size_t chosen = s.opcode.size();
      for (std::size_t o = 0; o < s.opcode.size(); ++o)
        if (value(s.opcode[o])) {
          chosen = o;
          break;
        }
      if (chosen == s.opcode.size())
        throw DecodeMismatch("model selects no opcode");
      inst.op = sk.opcodes[chosen];
      for (unsigned k = 0; k < opcodeArity(inst.op); ++k) {
        const auto idx = static_cast<std::uint32_t>(word(s.operand[k]));
        inst.args[k] = idx < c              ? Operand::constant(idx)
                       : idx < c + f.arity ? Operand::input(idx - c)
                                            : Operand::temp(idx - c - f.arity);
      }
      p.body.push_back(inst);
    }
    out.push_back(std::move(p));
  }
  return out;
}

void checkDecoded(const SynthesisInstance &inst, const CompiledBody &body,
                  const Witnesses &programs, unsigned width,
                  std::span<const Assignment> inputs) {
  for (std::size_t i = 0; i < programs.size(); ++i) {
    if (auto v = validate(programs[i]); !v.empty())
      throw DecodeMismatch("decoded " + inst.functions[i].name +
                           " is malformed: " + v.front());
    if (!isCanonical(programs[i]))
      throw DecodeMismatch("decoded " + inst.functions[i].name +
                           " is not canonical");
  }
  BodyEvaluator ev(body);
  if (!satisfiesAll(ev, programs, inputs, width))
    throw DecodeMismatch("decoded programs fail a stored input");
}

// ---------------------------------------------------------------------------

struct SymbolicStrategy::State {
  std::uint64_t epoch = ~std::uint64_t{0};
  std::vector<Shape> shapes;
  std::size_t shapeIdx = 0;
  std::vector<Opcode> ops;
  bool reduced = false;
  std::unique_ptr<sat::IncrementalSolver> solver;
  std::unique_ptr<SolverSink> solverSink;
  std::unique_ptr<sat::CnfFormula> cnf;
  std::unique_ptr<CnfSink> cnfSink;
  std::unique_ptr<SynthEncoder> enc;
  std::size_t added = 0;
  bool gaveUp = false;

  void drop() {
    enc.reset();
    solverSink.reset();
    solver.reset();
    cnfSink.reset();
    cnf.reset();
    added = 0;
  }
};

SymbolicStrategy::SymbolicStrategy(SymbolicConfig cfg)
    : cfg_(cfg), s_(std::make_unique<State>()) {}
SymbolicStrategy::~SymbolicStrategy() = default;

StepStatus SymbolicStrategy::step(const SynthContext &ctx,
                                  std::uint64_t budget, Candidate &out) {
  State &s = *s_;
  const unsigned w = ctx.params.w;
  if (s.epoch != ctx.epoch) {
    s.epoch = ctx.epoch;
    s.drop();
    s.shapes = splits(*ctx.instance, ctx.params.l, ctx.params.c);
    s.shapeIdx = 0;
    s.gaveUp = ctx.body->usesFloat();
    s.ops.assign(ctx.opcodes.begin(), ctx.opcodes.end());
    s.reduced = false;
    if (cfg_.divWidthLimit != 0 && w > cfg_.divWidthLimit) {
      std::erase_if(s.ops, [](Opcode op) {
        return op == Opcode::Div || op == Opcode::Mod;
      });
      s.reduced = s.ops.size() != ctx.opcodes.size();
    }
  }
  if (s.gaveUp)
    return StepStatus::GaveUp;

  std::uint64_t spent = 0;
  for (;;) {
    if (s.shapeIdx >= s.shapes.size())
      return s.reduced ? StepStatus::GaveUp : StepStatus::Exhausted;
    if (spent >= budget || ctx.stopRequested())
      return StepStatus::Continue;
    try {
      if (!s.enc) {
        if (cfg_.backend) {
          s.cnf = std::make_unique<sat::CnfFormula>();
          s.cnfSink = std::make_unique<CnfSink>(*s.cnf);
          s.enc = std::make_unique<SynthEncoder>(
              *ctx.instance, *ctx.body, s.shapes[s.shapeIdx], w, s.ops,
              *s.cnfSink, cfg_.clauseCeiling);
        } else {
          s.solver = sat::makeSolver(cfg_.engine);
          s.solverSink = std::make_unique<SolverSink>(*s.solver);
          s.enc = std::make_unique<SynthEncoder>(
              *ctx.instance, *ctx.body, s.shapes[s.shapeIdx], w, s.ops,
              *s.solverSink, cfg_.clauseCeiling);
        }
      }
      while (s.added < ctx.inputs.size())
        s.enc->addInput(ctx.inputs[s.added++]);
    } catch (const CapacityError &) {
      s.drop();
      s.gaveUp = true;
      return StepStatus::GaveUp;
    }

    std::optional<std::vector<bool>> model;
    bool unsat = false;
    if (cfg_.backend) {
      try {
        model = cfg_.backend->solve(*s.cnf, ctx.deadline);
      } catch (const BackendTimeout &) {
        return StepStatus::Continue;
      }
      unsat = !model;
      spent = budget;
    } else {
      sat::Limits lim;
      lim.conflicts = budget == ~std::uint64_t{0}
                          ? -1
                          : static_cast<std::int64_t>(budget - spent);
      lim.cancel = ctx.cancel;
      lim.deadline = ctx.deadline;
      const auto before = s.solver->conflicts();
      const sat::Result r = s.solver->solve({}, lim);
      spent += s.solver->conflicts() - before;
      if (r == sat::Result::Unknown)
        return StepStatus::Continue;
      unsat = r == sat::Result::Unsat;
      if (!unsat) {
        model.emplace(s.solver->numVars());
        for (std::size_t v = 0; v < model->size(); ++v)
          (*model)[v] = s.solver->modelValue(static_cast<sat::Var>(v));
      }
    }
    if (unsat) {
      s.drop();
      ++s.shapeIdx;
      continue;
    }
    Witnesses progs = decodeModel(*model, s.enc->skeleton());
    checkDecoded(*ctx.instance, *ctx.body, progs, w,
                 ctx.inputs.first(s.added));
    out.programs = std::move(progs);
    out.origin = name();
    out.params = ctx.params;
    return StepStatus::Found;
  }
}

} // namespace sosat
