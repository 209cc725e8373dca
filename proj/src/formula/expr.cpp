#include "sosat/formula.hpp"

#include <cctype>
#include <charconv>
#include <sstream>

namespace sosat {

namespace ex {

namespace {
std::shared_ptr<Expr> make(ExprKind kind) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  return e;
}
} // namespace

ExprPtr lit(Word value) {
  auto e = make(ExprKind::Literal);
  e->value = value;
  return e;
}

ExprPtr atom(WidthAtom a) {
  auto e = make(ExprKind::WidthAtom);
  e->atom = a;
  return e;
}

ExprPtr var(std::string name) {
  auto e = make(ExprKind::Var);
  e->name = std::move(name);
  return e;
}

ExprPtr op(Opcode op, std::vector<ExprPtr> args) {
  auto e = make(ExprKind::Op);
  e->op = op;
  e->children = std::move(args);
  return e;
}

namespace {
ExprPtr boolean(BoolOp b, std::vector<ExprPtr> args) {
  auto e = make(ExprKind::Bool);
  e->boolOp = b;
  e->children = std::move(args);
  return e;
}
} // namespace

ExprPtr band(std::vector<ExprPtr> args) {
  return boolean(BoolOp::And, std::move(args));
}
ExprPtr bor(std::vector<ExprPtr> args) {
  return boolean(BoolOp::Or, std::move(args));
}
ExprPtr bnot(ExprPtr e) { return boolean(BoolOp::Not, {std::move(e)}); }
ExprPtr bimplies(ExprPtr a, ExprPtr b) {
  return boolean(BoolOp::Implies, {std::move(a), std::move(b)});
}
ExprPtr biff(ExprPtr a, ExprPtr b) {
  return boolean(BoolOp::Iff, {std::move(a), std::move(b)});
}

ExprPtr app(std::string fn, std::vector<ExprPtr> args, unsigned projection) {
  auto e = make(ExprKind::App);
  e->name = std::move(fn);
  e->children = std::move(args);
  e->projection = projection;
  return e;
}

} // namespace ex

bool structurallyEqual(const ExprPtr &a, const ExprPtr &b) {
  if (a == b)
    return true;
  if (!a || !b || a->kind != b->kind ||
      a->children.size() != b->children.size())
    return false;
  switch (a->kind) {
  case ExprKind::Literal:
    if (a->value != b->value)
      return false;
    break;
  case ExprKind::WidthAtom:
    if (a->atom != b->atom)
      return false;
    break;
  case ExprKind::Var:
    if (a->name != b->name)
      return false;
    break;
  case ExprKind::Op:
    if (a->op != b->op)
      return false;
    break;
  case ExprKind::Bool:
    if (a->boolOp != b->boolOp)
      return false;
    break;
  case ExprKind::App:
    if (a->name != b->name || a->projection != b->projection)
      return false;
    break;
  }
  for (std::size_t i = 0; i < a->children.size(); ++i)
    if (!structurallyEqual(a->children[i], b->children[i]))
      return false;
  return true;
}

namespace {

std::string_view boolName(BoolOp b) {
  switch (b) {
  case BoolOp::And:
    return "band";
  case BoolOp::Or:
    return "bor";
  case BoolOp::Not:
    return "bnot";
  case BoolOp::Implies:
    return "bimplies";
  case BoolOp::Iff:
    return "biff";
  }
  return "?";
}

std::string_view atomName(WidthAtom a) {
  switch (a) {
  case WidthAtom::Width:
    return "#width";
  case WidthAtom::Ones:
    return "#ones";
  case WidthAtom::SignBit:
    return "#signbit";
  }
  return "?";
}

void print(std::ostream &os, const Expr &e) {
  switch (e.kind) {
  case ExprKind::Literal:
    os << e.value;
    return;
  case ExprKind::WidthAtom:
    os << atomName(e.atom);
    return;
  case ExprKind::Var:
    os << e.name;
    return;
  case ExprKind::Op:
    os << '(' << opcodeName(e.op);
    break;
  case ExprKind::Bool:
    os << '(' << boolName(e.boolOp);
    break;
  case ExprKind::App:
    if (e.projection == 0)
      os << "(app " << e.name;
    else
      os << "(app (" << e.name << ' ' << e.projection << ')';
    break;
  }
  for (const auto &c : e.children) {
    os << ' ';
    print(os, *c);
  }
  os << ')';
}

} // namespace

std::string toString(const ExprPtr &e) {
  std::ostringstream os;
  print(os, *e);
  return os.str();
}

ExprPtr substitute(const ExprPtr &e,
                   const std::map<std::string, ExprPtr> &vars) {
  if (e->kind == ExprKind::Var) {
    auto it = vars.find(e->name);
    return it == vars.end() ? e : it->second;
  }
  if (e->children.empty())
    return e;
  std::vector<ExprPtr> kids;
  kids.reserve(e->children.size());
  bool changed = false;
  for (const auto &c : e->children) {
    kids.push_back(substitute(c, vars));
    changed |= kids.back() != c;
  }
  if (!changed)
    return e;
  auto copy = std::make_shared<Expr>(*e);
  copy->children = std::move(kids);
  return copy;
}

namespace {

std::optional<Word> parseWord(std::string_view s) {
  int base = 10;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    s.remove_prefix(2);
    base = 16;
  }
  Word v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    return std::nullopt;
  return v;
}

std::optional<BoolOp> boolFromName(std::string_view s) {
  for (BoolOp b : {BoolOp::And, BoolOp::Or, BoolOp::Not, BoolOp::Implies,
                   BoolOp::Iff})
    if (boolName(b) == s)
      return b;
  return std::nullopt;
}

} // namespace

ExprPtr parseExpr(const SExpr &s) {
  if (s.isAtom()) {
    if (s.atom == "true")
      return ex::lit(1);
    if (s.atom == "false")
      return ex::lit(0);
    for (WidthAtom a : {WidthAtom::Width, WidthAtom::Ones, WidthAtom::SignBit})
      if (atomName(a) == s.atom)
        return ex::atom(a);
    if (!s.atom.empty() && std::isdigit(static_cast<unsigned char>(s.atom[0]))) {
      auto v = parseWord(s.atom);
      if (!v)
        s.fail("invalid number '" + s.atom + "'");
      return ex::lit(*v);
    }
    return ex::var(s.atom);
  }
  if (s.items.empty() || !s.items[0].isAtom())
    s.fail("expected an operator");
  const std::string &head = s.items[0].atom;
  std::vector<ExprPtr> args;

  if (head == "app") {
    if (s.items.size() < 2)
      s.fail("app needs a function symbol");
    const SExpr &fn = s.items[1];
    std::string name;
    unsigned proj = 0;
    if (fn.isAtom()) {
      name = fn.atom;
    } else {
      if (fn.items.size() != 2 || !fn.items[0].isAtom() || !fn.items[1].isAtom())
        fn.fail("expected (SYMBOL PROJECTION)");
      name = fn.items[0].atom;
      auto p = parseWord(fn.items[1].atom);
      if (!p)
        fn.items[1].fail("invalid projection index");
      proj = static_cast<unsigned>(*p);
    }
    for (std::size_t i = 2; i < s.items.size(); ++i)
      args.push_back(parseExpr(s.items[i]));
    return ex::app(name, std::move(args), proj);
  }

  for (std::size_t i = 1; i < s.items.size(); ++i)
    args.push_back(parseExpr(s.items[i]));
  const std::size_t n = args.size();

  if (auto b = boolFromName(head)) {
    switch (*b) {
    case BoolOp::And:
    case BoolOp::Or:
      if (n == 0)
        throw ArityMismatch(head + " needs at least one operand");
      return *b == BoolOp::And ? ex::band(std::move(args))
                               : ex::bor(std::move(args));
    case BoolOp::Not:
      if (n != 1)
        throw ArityMismatch("bnot expects 1 operand, got " + std::to_string(n));
      return ex::bnot(args[0]);
    case BoolOp::Implies:
    case BoolOp::Iff:
      if (n != 2)
        throw ArityMismatch(head + " expects 2 operands, got " +
                            std::to_string(n));
      return *b == BoolOp::Implies ? ex::bimplies(args[0], args[1])
                                   : ex::biff(args[0], args[1]);
    }
  }
  auto op = opcodeFromName(head);
  if (!op)
    throw UnknownSymbol("unknown operator '" + head + "' at " +
                        std::to_string(s.line) + ":" + std::to_string(s.column));
  if (n != opcodeArity(*op))
    throw ArityMismatch(head + " expects " + std::to_string(opcodeArity(*op)) +
                        " operand(s), got " + std::to_string(n));
  return ex::op(*op, std::move(args));
}

} // namespace sosat
