#include "sosat/lang.hpp"

#include <algorithm>
#include <set>

namespace sosat {

void execUnchecked(const Program &program, std::span<const Word> inputs,
                   std::span<Word> temps, std::span<Word> outputs) {
  const auto &consts = program.constants;
  if (program.body.empty()) {
    for (unsigned o = 0; o < program.outCount; ++o)
      outputs[o] = consts[o];
    return;
  }
  std::array<Word, 3> args{};
  for (std::size_t i = 0; i < program.body.size(); ++i) {
    const Instruction &inst = program.body[i];
    const unsigned n = inst.arity();
    for (unsigned k = 0; k < n; ++k) {
      const Operand &o = inst.args[k];
      switch (o.kind) {
      case Operand::Kind::Const:
        args[k] = consts[o.index];
        break;
      case Operand::Kind::Input:
        args[k] = inputs[o.index];
        break;
      case Operand::Kind::Temp:
        args[k] = temps[o.index];
        break;
      }
    }
    temps[i] = evalInstruction(inst.op, {args.data(), n}, program.width);
  }
  const std::size_t first = program.body.size() - program.outCount;
  for (unsigned o = 0; o < program.outCount; ++o)
    outputs[o] = temps[first + o];
}

std::vector<Word> exec(const Program &program, std::span<const Word> inputs) {
  auto violations = validate(program);
  if (!violations.empty())
    throw MalformedProgram("malformed program: " + violations.front());
  if (inputs.size() != program.arity)
    throw MalformedProgram("expected " + std::to_string(program.arity) +
                           " inputs, got " + std::to_string(inputs.size()));
  const Word m = widthMask(program.width);
  std::vector<Word> masked(inputs.begin(), inputs.end());
  for (Word &w : masked) {
    if (w & ~m)
      throw MalformedProgram("input does not fit in " +
                             std::to_string(program.width) + " bits");
  }
  std::vector<Word> temps(program.body.size());
  std::vector<Word> outs(program.outCount);
  execUnchecked(program, masked, temps, outs);
  return outs;
}

std::vector<std::string> validate(const Program &p) {
  std::vector<std::string> out;
  if (p.width < 1 || p.width > kMaxWidth)
    out.push_back("width " + std::to_string(p.width) + " outside [1, 64]");
  if (p.outCount < 1)
    out.push_back("program must have at least one output");
  if (p.body.empty()) {
    if (p.constants.size() != p.outCount)
      out.push_back("degenerate program needs exactly one constant per output");
  } else if (p.body.size() < p.outCount) {
    out.push_back("program shorter than its output count");
  }
  const Word m = widthMask(p.width);
  for (std::size_t k = 0; k < p.constants.size(); ++k)
    if (p.constants[k] & ~m)
      out.push_back("constant c" + std::to_string(k) + " does not fit in " +
                    std::to_string(p.width) + " bits");
  for (std::size_t i = 0; i < p.body.size(); ++i) {
    const Instruction &inst = p.body[i];
    const std::string where = "instruction " + std::to_string(i) + ": ";
    if (static_cast<std::size_t>(inst.op) >= kNumOpcodes) {
      out.push_back(where + "unknown opcode");
      continue;
    }
    if (isFloatOpcode(inst.op) && p.width != 32)
      out.push_back(where + "floating-point opcode at width " +
                    std::to_string(p.width));
    for (const Operand &o : inst.operands()) {
      switch (o.kind) {
      case Operand::Kind::Const:
        if (o.index >= p.constants.size())
          out.push_back(where + "constant index out of range");
        break;
      case Operand::Kind::Input:
        if (o.index >= p.arity)
          out.push_back(where + "input index out of range");
        break;
      case Operand::Kind::Temp:
        if (o.index >= i)
          out.push_back(where + "forward/self reference");
        break;
      }
    }
  }
  return out;
}

std::optional<Operand> nopForward(const Instruction &inst,
                                  std::span<const Word> constants,
                                  unsigned width) {
  const Word m = widthMask(width);
  auto value = [&](const Operand &o) -> std::optional<Word> {
    if (o.isConst() && o.index < constants.size())
      return constants[o.index] & m;
    return std::nullopt;
  };
  const Operand &a = inst.args[0];
  const Operand &b = inst.args[1];
  auto is = [&](const Operand &o, Word v) { return value(o) == v; };
  switch (inst.op) {
  case Opcode::Add:
  case Opcode::Xor:
    if (is(b, 0))
      return a;
    if (is(a, 0))
      return b;
    break;
  case Opcode::Or:
    if (a == b || is(b, 0))
      return a;
    if (is(a, 0))
      return b;
    break;
  case Opcode::Sub:
    if (is(b, 0))
      return a;
    break;
  case Opcode::Mul:
    if (is(b, 1))
      return a;
    if (is(a, 1))
      return b;
    break;
  case Opcode::Div:
    if (is(b, 1))
      return a;
    break;
  case Opcode::And:
    if (a == b || is(b, m))
      return a;
    if (is(a, m))
      return b;
    break;
  case Opcode::Ite:
    if (auto cond = value(a))
      return *cond != 0 ? inst.args[1] : inst.args[2];
    break;
  default:
    break;
  }
  return std::nullopt;
}

bool isCanonicalInstruction(const Instruction &inst,
                            std::span<const Word> constants, unsigned width) {
  auto ops = inst.operands();
  if (std::all_of(ops.begin(), ops.end(),
                  [](const Operand &o) { return o.isConst(); }))
    return false;
  if (isCommutative(inst.op) && inst.args[1] < inst.args[0])
    return false;
  return !nopForward(inst, constants, width).has_value();
}

bool isCanonical(const Program &p) {
  // The degenerate form lists its outputs, which may coincide.
  if (p.body.empty())
    return true;
  std::set<Word> seen;
  for (Word c : p.constants)
    if (!seen.insert(c).second)
      return false;
  for (const Instruction &inst : p.body)
    if (!isCanonicalInstruction(inst, p.constants, p.width))
      return false;
  return true;
}

namespace {

// Replaces every use of Temp(victim) by `with`, deletes the instruction and
// shifts later temp indices down by one.
void eraseInstruction(std::vector<Instruction> &body, std::size_t victim,
                      Operand with) {
  for (std::size_t i = victim + 1; i < body.size(); ++i) {
    for (Operand &o : body[i].args) {
      if (!o.isTemp())
        continue;
      if (o.index == victim)
        o = with;
      else if (o.index > victim)
        --o.index;
    }
  }
  body.erase(body.begin() + static_cast<std::ptrdiff_t>(victim));
  // `with` may itself be a temp below the victim; nothing to shift there.
}

void normaliseUnused(Instruction &inst) {
  for (unsigned k = inst.arity(); k < 3; ++k)
    inst.args[k] = Operand::constant(0);
}

} // namespace

Program canonicalize(const Program &program) {
  if (!validate(program).empty())
    throw MalformedProgram("cannot canonicalize a malformed program");
  if (program.body.empty())
    return program;
  if (program.arity == 0) {
    Program out = program;
    out.body.clear();
    out.constants = exec(program, {});
    return out;
  }

  Program p = program;
  const unsigned M = p.outCount;
  const Word m = widthMask(p.width);
  auto addConst = [&](Word v) -> std::uint32_t {
    v &= m;
    for (std::size_t k = 0; k < p.constants.size(); ++k)
      if (p.constants[k] == v)
        return static_cast<std::uint32_t>(k);
    p.constants.push_back(v);
    return static_cast<std::uint32_t>(p.constants.size() - 1);
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < p.body.size() && !changed; ++i) {
      Instruction &inst = p.body[i];
      normaliseUnused(inst);
      const bool isOutput = i + M >= p.body.size();
      auto ops = inst.operands();
      const bool allConst = std::all_of(
          ops.begin(), ops.end(), [](const Operand &o) { return o.isConst(); });
      std::optional<Operand> forward;
      if (allConst) {
        std::array<Word, 3> args{};
        for (unsigned k = 0; k < inst.arity(); ++k)
          args[k] = p.constants[inst.args[k].index];
        forward = Operand::constant(
            addConst(evalInstruction(inst.op, {args.data(), inst.arity()}, p.width)));
      } else {
        forward = nopForward(inst, p.constants, p.width);
      }
      if (forward) {
        if (!isOutput) {
          eraseInstruction(p.body, i, *forward);
          changed = true;
          break;
        }
        Instruction repl =
            forward->isConst()
                ? Instruction(Opcode::Ite, {Operand::input(0), *forward, *forward})
                : Instruction(Opcode::Min, {*forward, *forward});
        if (!(repl == inst)) {
          inst = repl;
          changed = true;
        }
        continue;
      }
      if (isCommutative(inst.op) && inst.args[1] < inst.args[0]) {
        std::swap(inst.args[0], inst.args[1]);
        changed = true;
      }
    }
    if (changed)
      continue;

    // Dead code.
    std::vector<bool> live(p.body.size(), false);
    for (std::size_t i = p.body.size(); i-- > 0;) {
      if (i + M >= p.body.size())
        live[i] = true;
      if (!live[i])
        continue;
      for (const Operand &o : p.body[i].operands())
        if (o.isTemp())
          live[o.index] = true;
    }
    for (std::size_t i = p.body.size(); i-- > 0;) {
      if (!live[i]) {
        eraseInstruction(p.body, i, Operand::constant(0));
        changed = true;
      }
    }

    // Unused and duplicate constants.
    std::vector<Word> kept;
    std::vector<std::uint32_t> remap(p.constants.size(), 0);
    std::vector<bool> used(p.constants.size(), false);
    for (const Instruction &inst : p.body)
      for (const Operand &o : inst.operands())
        if (o.isConst())
          used[o.index] = true;
    for (std::size_t k = 0; k < p.constants.size(); ++k) {
      if (!used[k])
        continue;
      auto it = std::find(kept.begin(), kept.end(), p.constants[k]);
      if (it == kept.end()) {
        remap[k] = static_cast<std::uint32_t>(kept.size());
        kept.push_back(p.constants[k]);
      } else {
        remap[k] = static_cast<std::uint32_t>(it - kept.begin());
      }
    }
    if (kept != p.constants) {
      for (Instruction &inst : p.body)
        for (unsigned k = 0; k < inst.arity(); ++k)
          if (inst.args[k].isConst())
            inst.args[k].index = remap[inst.args[k].index];
      p.constants = std::move(kept);
      changed = true;
    }
  }
  return p;
}

} // namespace sosat
