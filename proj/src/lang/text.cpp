#include "sosat/lang.hpp"

#include <charconv>
#include <sstream>

namespace sosat {

std::string formatWord(Word value) { return std::to_string(value); }

namespace {

std::string operandText(const Operand &o) {
  switch (o.kind) {
  case Operand::Kind::Const:
    return "c" + std::to_string(o.index);
  case Operand::Kind::Input:
    return "x" + std::to_string(o.index);
  case Operand::Kind::Temp:
    return "t" + std::to_string(o.index + 1);
  }
  return "?";
}

struct Token {
  std::string_view text;
  unsigned line;
  unsigned column;
};

// Splits the text into statements (newline or ';'), each a token list.
std::vector<std::vector<Token>> tokenize(std::string_view text) {
  std::vector<std::vector<Token>> stmts(1);
  unsigned line = 1, col = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    char ch = text[i];
    if (ch == '#') {
      while (i < text.size() && text[i] != '\n')
        ++i;
      continue;
    }
    if (ch == '\n' || ch == ';') {
      if (!stmts.back().empty())
        stmts.emplace_back();
      if (ch == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
      continue;
    }
    if (ch == ' ' || ch == '\t' || ch == '\r') {
      ++i;
      ++col;
      continue;
    }
    std::size_t start = i;
    unsigned startCol = col;
    while (i < text.size() && text[i] != ' ' && text[i] != '\t' &&
           text[i] != '\r' && text[i] != '\n' && text[i] != ';' &&
           text[i] != '#') {
      ++i;
      ++col;
    }
    stmts.back().push_back({text.substr(start, i - start), line, startCol});
  }
  if (stmts.back().empty())
    stmts.pop_back();
  return stmts;
}

[[noreturn]] void fail(const Token &t, const std::string &msg) {
  throw SyntaxError(msg, t.line, t.column);
}

std::uint64_t parseNumber(const Token &t, std::string_view digits, int base) {
  std::uint64_t v = 0;
  auto [ptr, ec] =
      std::from_chars(digits.data(), digits.data() + digits.size(), v, base);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty())
    fail(t, "invalid number '" + std::string(t.text) + "'");
  return v;
}

Word parseWordToken(const Token &t) {
  std::string_view s = t.text;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X'))
    return parseNumber(t, s.substr(2), 16);
  return parseNumber(t, s, 10);
}

unsigned parseIndex(const Token &t, std::size_t skip) {
  return static_cast<unsigned>(parseNumber(t, t.text.substr(skip), 10));
}

} // namespace

std::string prettyPrint(const Program &p) {
  std::ostringstream os;
  os << "prog " << p.arity << ' ' << p.outCount << ' ' << p.width << " consts";
  for (Word c : p.constants)
    os << ' ' << formatWord(c);
  os << '\n';
  for (std::size_t i = 0; i < p.body.size(); ++i) {
    const Instruction &inst = p.body[i];
    os << 't' << i + 1 << " = " << opcodeName(inst.op);
    for (const Operand &o : inst.operands())
      os << ' ' << operandText(o);
    os << '\n';
  }
  return os.str();
}

Program parseProgram(std::string_view text) {
  auto stmts = tokenize(text);
  if (stmts.empty())
    throw SyntaxError("empty program text", 1, 1);
  const auto &hdr = stmts.front();
  if (hdr[0].text != "prog")
    fail(hdr[0], "expected 'prog' header");
  if (hdr.size() < 5 || hdr[4].text != "consts")
    fail(hdr.back(), "header must be 'prog N M w consts word*'");

  Program p;
  p.arity = parseIndex(hdr[1], 0);
  p.outCount = parseIndex(hdr[2], 0);
  p.width = parseIndex(hdr[3], 0);
  if (p.width < 1 || p.width > kMaxWidth)
    fail(hdr[3], "width must be in [1, 64]");
  if (p.outCount < 1)
    fail(hdr[2], "output count must be at least 1");
  for (std::size_t k = 5; k < hdr.size(); ++k) {
    Word v = parseWordToken(hdr[k]);
    if (v & ~widthMask(p.width))
      fail(hdr[k], "constant does not fit in " + std::to_string(p.width) + " bits");
    p.constants.push_back(v);
  }

  for (std::size_t s = 1; s < stmts.size(); ++s) {
    const auto &toks = stmts[s];
    const std::size_t index = s - 1;
    const std::string expected = "t" + std::to_string(index + 1);
    if (toks[0].text != expected)
      fail(toks[0], "expected '" + expected + "'");
    if (toks.size() < 3 || toks[1].text != "=")
      fail(toks.size() > 1 ? toks[1] : toks[0], "expected '='");
    auto op = opcodeFromName(toks[2].text);
    if (!op)
      fail(toks[2], "unknown opcode '" + std::string(toks[2].text) + "'");
    const unsigned arity = opcodeArity(*op);
    if (toks.size() - 3 != arity)
      fail(toks[2], std::string(opcodeName(*op)) + " expects " +
                        std::to_string(arity) + " operand(s), got " +
                        std::to_string(toks.size() - 3));
    Instruction inst;
    inst.op = *op;
    for (unsigned k = 0; k < arity; ++k) {
      const Token &t = toks[3 + k];
      if (t.text.size() < 2)
        fail(t, "invalid operand '" + std::string(t.text) + "'");
      const unsigned idx = parseIndex(t, 1);
      switch (t.text[0]) {
      case 'x':
        if (idx >= p.arity)
          fail(t, "input index out of range");
        inst.args[k] = Operand::input(idx);
        break;
      case 'c':
        if (idx >= p.constants.size())
          fail(t, "constant index out of range");
        inst.args[k] = Operand::constant(idx);
        break;
      case 't':
        if (idx == 0 || idx > index)
          fail(t, "forward/self reference");
        inst.args[k] = Operand::temp(idx - 1);
        break;
      default:
        fail(t, "invalid operand '" + std::string(t.text) + "'");
      }
    }
    p.body.push_back(inst);
  }

  auto violations = validate(p);
  if (!violations.empty())
    throw SyntaxError(violations.front(), stmts.back().front().line, 1);
  return p;
}

} // namespace sosat
