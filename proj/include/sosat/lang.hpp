//===- lang.hpp - The loop-free instruction language ---------------------===//
//
// Programs are SSA lists of instructions over a word-width-parameterised
// machine. Words are stored in the low `width` bits of a uint64_t; every
// value handed out by this module is already masked.
//
//===----------------------------------------------------------------------===//
#pragma once

#include "sosat/error.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sosat {

using Word = std::uint64_t;

inline constexpr unsigned kMaxWidth = 64;

constexpr Word widthMask(unsigned width) {
  return width >= 64 ? ~Word{0} : (Word{1} << width) - 1;
}

constexpr Word signBit(unsigned width) { return Word{1} << (width - 1); }

constexpr std::int64_t toSigned(Word value, unsigned width) {
  if (width >= 64)
    return static_cast<std::int64_t>(value);
  if (value & signBit(width))
    return static_cast<std::int64_t>(value | ~widthMask(width));
  return static_cast<std::int64_t>(value);
}

enum class Opcode : std::uint8_t {
  Add,
  Sub,
  Mul,
  Div,
  Neg,
  Mod,
  Min,
  Max,
  And,
  Or,
  Xor,
  Lshr,
  Ashr,
  Not,
  Le,
  Lt,
  Sle,
  Slt,
  Eq,
  Neq,
  Implies,
  Ite,
  Fadd,
  Fsub,
  Fmul,
  Fdiv,
  // Extension opcode, not part of the core language.
  Shl,
};

inline constexpr std::size_t kNumOpcodes = 27;

unsigned opcodeArity(Opcode op);
bool isCommutative(Opcode op);
bool isBooleanProducing(Opcode op);
bool isFloatOpcode(Opcode op);
std::string_view opcodeName(Opcode op);
std::optional<Opcode> opcodeFromName(std::string_view name);

/// All opcodes in declaration order.
std::span<const Opcode> allOpcodes();

/// The integer opcodes used by the synthesisers by default: everything except
/// floating point, plus shl when `enableShl` is set.
std::vector<Opcode> synthesisOpcodes(bool enableShl = false);

struct Operand {
  // Declaration order is the canonical total order: Const < Input < Temp.
  enum class Kind : std::uint8_t { Const, Input, Temp };

  Kind kind = Kind::Const;
  std::uint32_t index = 0;

  static constexpr Operand constant(std::uint32_t k) { return {Kind::Const, k}; }
  static constexpr Operand input(std::uint32_t i) { return {Kind::Input, i}; }
  static constexpr Operand temp(std::uint32_t j) { return {Kind::Temp, j}; }

  bool isConst() const { return kind == Kind::Const; }
  bool isInput() const { return kind == Kind::Input; }
  bool isTemp() const { return kind == Kind::Temp; }

  auto operator<=>(const Operand &) const = default;
};

/// Operands beyond the opcode's arity are kept at Const(0) so that equal
/// instructions compare equal.
struct Instruction {
  Opcode op = Opcode::Add;
  std::array<Operand, 3> args{};

  Instruction() = default;
  Instruction(Opcode op, std::initializer_list<Operand> operands);

  unsigned arity() const { return opcodeArity(op); }
  std::span<const Operand> operands() const { return {args.data(), arity()}; }

  bool operator==(const Instruction &) const = default;
};

/// A straight-line program of type Word^arity -> Word^outCount. The outputs
/// are the results of the last `outCount` instructions. A program with an
/// empty body is the degenerate constant form: its outputs are the constant
/// table, one entry per output.
struct Program {
  unsigned arity = 0;
  unsigned outCount = 1;
  unsigned width = 32;
  std::vector<Word> constants;
  std::vector<Instruction> body;

  std::size_t length() const { return body.size(); }
  bool isDegenerate() const { return body.empty(); }

  bool operator==(const Program &) const = default;
};

Word evalInstruction(Opcode op, std::span<const Word> args, unsigned width);

/// Runs `program` on `inputs`. Throws MalformedProgram if the program does not
/// validate or the inputs do not match its arity.
std::vector<Word> exec(const Program &program, std::span<const Word> inputs);

/// Unchecked fast path used by the search loops. `temps` must hold at least
/// program.length() words; `outputs` at least program.outCount.
void execUnchecked(const Program &program, std::span<const Word> inputs,
                   std::span<Word> temps, std::span<Word> outputs);

/// Every violated program invariant, empty when the program is well formed.
std::vector<std::string> validate(const Program &program);

/// If `inst` is on the fixed nop list, the operand it forwards.
/// For `ite` with a constant condition the selected branch is returned.
std::optional<Operand> nopForward(const Instruction &inst,
                                  std::span<const Word> constants,
                                  unsigned width);

bool isCanonicalInstruction(const Instruction &inst,
                            std::span<const Word> constants, unsigned width);

/// Precondition: validate(program) is empty.
bool isCanonical(const Program &program);

/// Returns a canonical program computing the same function whose length is
/// never greater than the input's.
Program canonicalize(const Program &program);

std::string formatWord(Word value);
std::string prettyPrint(const Program &program);
Program parseProgram(std::string_view text);

} // namespace sosat
