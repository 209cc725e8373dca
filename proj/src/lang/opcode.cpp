#include "sosat/lang.hpp"

#include <algorithm>
#include <bit>
#include <cstring>

namespace sosat {

namespace {

struct OpcodeInfo {
  Opcode op;
  std::string_view name;
  unsigned arity;
  bool commutative;
  bool boolean;
};

constexpr std::array<OpcodeInfo, kNumOpcodes> kInfo = {{
    {Opcode::Add, "add", 2, true, false},
    {Opcode::Sub, "sub", 2, false, false},
    {Opcode::Mul, "mul", 2, true, false},
    {Opcode::Div, "div", 2, false, false},
    {Opcode::Neg, "neg", 1, false, false},
    {Opcode::Mod, "mod", 2, false, false},
    {Opcode::Min, "min", 2, true, false},
    {Opcode::Max, "max", 2, true, false},
    {Opcode::And, "and", 2, true, false},
    {Opcode::Or, "or", 2, true, false},
    {Opcode::Xor, "xor", 2, true, false},
    {Opcode::Lshr, "lshr", 2, false, false},
    {Opcode::Ashr, "ashr", 2, false, false},
    {Opcode::Not, "not", 1, false, false},
    {Opcode::Le, "le", 2, false, true},
    {Opcode::Lt, "lt", 2, false, true},
    {Opcode::Sle, "sle", 2, false, true},
    {Opcode::Slt, "slt", 2, false, true},
    {Opcode::Eq, "eq", 2, true, true},
    {Opcode::Neq, "neq", 2, true, true},
    {Opcode::Implies, "implies", 2, false, true},
    {Opcode::Ite, "ite", 3, false, false},
    {Opcode::Fadd, "fadd", 2, true, false},
    {Opcode::Fsub, "fsub", 2, false, false},
    {Opcode::Fmul, "fmul", 2, true, false},
    {Opcode::Fdiv, "fdiv", 2, false, false},
    {Opcode::Shl, "shl", 2, false, false},
}};

constexpr std::array<Opcode, kNumOpcodes> kAll = [] {
  std::array<Opcode, kNumOpcodes> out{};
  for (std::size_t i = 0; i < kNumOpcodes; ++i)
    out[i] = kInfo[i].op;
  return out;
}();

const OpcodeInfo &info(Opcode op) { return kInfo[static_cast<std::size_t>(op)]; }

float asFloat(Word w) { return std::bit_cast<float>(static_cast<std::uint32_t>(w)); }
Word fromFloat(float f) { return std::bit_cast<std::uint32_t>(f); }

} // namespace

unsigned opcodeArity(Opcode op) { return info(op).arity; }
bool isCommutative(Opcode op) { return info(op).commutative; }
bool isBooleanProducing(Opcode op) { return info(op).boolean; }

bool isFloatOpcode(Opcode op) {
  return op == Opcode::Fadd || op == Opcode::Fsub || op == Opcode::Fmul ||
         op == Opcode::Fdiv;
}

std::string_view opcodeName(Opcode op) { return info(op).name; }

std::optional<Opcode> opcodeFromName(std::string_view name) {
  for (const auto &i : kInfo)
    if (i.name == name)
      return i.op;
  return std::nullopt;
}

std::span<const Opcode> allOpcodes() { return kAll; }

std::vector<Opcode> synthesisOpcodes(bool enableShl) {
  std::vector<Opcode> ops;
  for (Opcode op : kAll) {
    if (isFloatOpcode(op))
      continue;
    if (op == Opcode::Shl && !enableShl)
      continue;
    ops.push_back(op);
  }
  return ops;
}

Instruction::Instruction(Opcode op, std::initializer_list<Operand> operands)
    : op(op) {
  std::size_t i = 0;
  for (const Operand &o : operands) {
    if (i == args.size())
      break;
    args[i++] = o;
  }
}

Word evalInstruction(Opcode op, std::span<const Word> args, unsigned width) {
  const Word m = widthMask(width);
  const Word a = args.size() > 0 ? args[0] & m : 0;
  const Word b = args.size() > 1 ? args[1] & m : 0;
  switch (op) {
  case Opcode::Add:
    return (a + b) & m;
  case Opcode::Sub:
    return (a - b) & m;
  case Opcode::Mul:
    return (a * b) & m;
  case Opcode::Div: {
    if (b == 0)
      return m;
    __int128 q = static_cast<__int128>(toSigned(a, width)) / toSigned(b, width);
    return static_cast<Word>(q) & m;
  }
  case Opcode::Mod: {
    if (b == 0)
      return a;
    __int128 r = static_cast<__int128>(toSigned(a, width)) % toSigned(b, width);
    return static_cast<Word>(r) & m;
  }
  case Opcode::Neg:
    return (Word{0} - a) & m;
  case Opcode::Min:
    return toSigned(a, width) <= toSigned(b, width) ? a : b;
  case Opcode::Max:
    return toSigned(a, width) >= toSigned(b, width) ? a : b;
  case Opcode::And:
    return a & b;
  case Opcode::Or:
    return a | b;
  case Opcode::Xor:
    return a ^ b;
  case Opcode::Lshr:
    return a >> (b % width);
  case Opcode::Ashr:
    return static_cast<Word>(toSigned(a, width) >> (b % width)) & m;
  case Opcode::Shl:
    return (a << (b % width)) & m;
  case Opcode::Not:
    return ~a & m;
  case Opcode::Le:
    return a <= b;
  case Opcode::Lt:
    return a < b;
  case Opcode::Sle:
    return toSigned(a, width) <= toSigned(b, width);
  case Opcode::Slt:
    return toSigned(a, width) < toSigned(b, width);
  case Opcode::Eq:
    return a == b;
  case Opcode::Neq:
    return a != b;
  case Opcode::Implies:
    return (a != 0 && b == 0) ? 0 : 1;
  case Opcode::Ite:
    return a != 0 ? b : (args[2] & m);
  case Opcode::Fadd:
  case Opcode::Fsub:
  case Opcode::Fmul:
  case Opcode::Fdiv: {
    if (width != 32)
      throw UnsupportedWidth(std::string(opcodeName(op)) +
                             " is only defined at width 32, not " +
                             std::to_string(width));
    float x = asFloat(a), y = asFloat(b);
    float r = op == Opcode::Fadd   ? x + y
              : op == Opcode::Fsub ? x - y
              : op == Opcode::Fmul ? x * y
                                   : x / y;
    return fromFloat(r);
  }
  }
  return 0;
}

} // namespace sosat
