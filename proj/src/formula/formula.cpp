#include "sosat/formula.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace sosat {

unsigned SynthesisInstance::inputBits() const {
  unsigned n = 0;
  for (const auto &v : universals)
    n += v.widthAt(width);
  return n;
}

std::optional<std::size_t>
SynthesisInstance::functionIndex(std::string_view name) const {
  for (std::size_t i = 0; i < functions.size(); ++i)
    if (functions[i].name == name)
      return i;
  return std::nullopt;
}

unsigned inputBitCount(const SynthesisInstance &inst) {
  return inst.inputBits();
}

namespace {

void checkExpr(const Expr &e, const std::set<std::string> &vars,
               const std::vector<FunctionSignature> &fns) {
  switch (e.kind) {
  case ExprKind::Var:
    if (!vars.count(e.name))
      throw UnknownSymbol("undeclared variable '" + e.name + "'");
    break;
  case ExprKind::App: {
    const FunctionSignature *sig = nullptr;
    for (const auto &f : fns)
      if (f.name == e.name)
        sig = &f;
    if (!sig)
      throw UnknownSymbol("undeclared function symbol '" + e.name + "'");
    if (e.children.size() != sig->arity)
      throw ArityMismatch(e.name + " expects " + std::to_string(sig->arity) +
                          " argument(s), got " +
                          std::to_string(e.children.size()));
    if (e.projection >= sig->outCount)
      throw ArityMismatch("projection " + std::to_string(e.projection) +
                          " out of range for " + e.name);
    break;
  }
  case ExprKind::Op:
    if (e.children.size() != opcodeArity(e.op))
      throw ArityMismatch(std::string(opcodeName(e.op)) + " arity mismatch");
    break;
  default:
    break;
  }
  for (const auto &c : e.children)
    checkExpr(*c, vars, fns);
}

void checkSignatures(const std::vector<FunctionSignature> &fns) {
  std::set<std::string> names;
  for (const auto &f : fns) {
    if (!names.insert(f.name).second)
      throw ArityMismatch("function symbol '" + f.name + "' declared twice");
    if (f.outCount < 1)
      throw ArityMismatch(f.name + ": out must be at least 1");
    if (f.predicate && f.outCount != 1)
      throw ArityMismatch(f.name + ": a predicate has exactly one output");
  }
}

} // namespace

void checkFormula(const SOSFormula &f) {
  if (f.width < 1 || f.width > kMaxWidth)
    throw UnsupportedWidth("formula width must be in [1, 64]");
  checkSignatures(f.functions);
  std::set<std::string> vars;
  for (const auto &q : f.prefix) {
    if (!vars.insert(q.var.name).second)
      throw ArityMismatch("variable '" + q.var.name + "' declared twice");
    if (q.var.width && (*q.var.width < 1 || *q.var.width > f.width))
      throw UnsupportedWidth("variable '" + q.var.name +
                             "' width outside [1, formula width]");
  }
  if (!f.body)
    throw Error("formula has no body");
  checkExpr(*f.body, vars, f.functions);
}

namespace {

unsigned atomNumber(const SExpr &s, const char *what) {
  if (!s.isAtom() || s.atom.empty() ||
      !std::all_of(s.atom.begin(), s.atom.end(),
                   [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    s.fail(std::string("expected a number for ") + what);
  return static_cast<unsigned>(std::stoul(s.atom));
}

const std::string &symbolName(const SExpr &s) {
  if (!s.isAtom() || s.atom.empty() ||
      std::isdigit(static_cast<unsigned char>(s.atom[0])) || s.atom[0] == '#')
    s.fail("expected a symbol name");
  return s.atom;
}

FunctionSignature parseSignature(const SExpr &s) {
  if (s.items.size() < 2)
    s.fail("exists-fun needs a name");
  FunctionSignature sig;
  sig.name = symbolName(s.items[1]);
  for (std::size_t i = 2; i < s.items.size(); ++i) {
    const SExpr &opt = s.items[i];
    if (opt.isForm("arity") && opt.items.size() == 2)
      sig.arity = atomNumber(opt.items[1], "arity");
    else if (opt.isForm("out") && opt.items.size() == 2)
      sig.outCount = atomNumber(opt.items[1], "out");
    else if (opt.isForm("predicate") && opt.items.size() == 1)
      sig.predicate = true;
    else if (opt.isForm("function") && opt.items.size() == 1)
      sig.predicate = false;
    else
      opt.fail("unknown exists-fun option");
  }
  return sig;
}

} // namespace

SOSFormula formulaFromForms(std::span<const SExpr> forms,
                            std::vector<const SExpr *> *extra) {
  SOSFormula f;
  bool sawWidth = false;
  std::vector<ExprPtr> asserts;
  for (const SExpr &s : forms) {
    if (s.isForm("width")) {
      if (sawWidth)
        s.fail("duplicate width declaration");
      if (s.items.size() != 2)
        s.fail("expected (width N)");
      f.width = atomNumber(s.items[1], "width");
      sawWidth = true;
    } else if (s.isForm("exists-fun")) {
      f.functions.push_back(parseSignature(s));
    } else if (s.isForm("forall") || s.isForm("exists")) {
      const Quantifier q =
          s.isForm("forall") ? Quantifier::Forall : Quantifier::Exists;
      for (std::size_t i = 1; i < s.items.size(); ++i) {
        const SExpr &v = s.items[i];
        QuantifiedVar qv{q, {}};
        if (v.isAtom()) {
          qv.var.name = symbolName(v);
        } else {
          if (v.items.size() != 2)
            v.fail("expected NAME or (NAME WIDTH)");
          qv.var.name = symbolName(v.items[0]);
          qv.var.width = atomNumber(v.items[1], "variable width");
        }
        f.prefix.push_back(std::move(qv));
      }
    } else if (s.isForm("assert")) {
      if (s.items.size() != 2)
        s.fail("expected (assert EXPR)");
      asserts.push_back(parseExpr(s.items[1]));
    } else if (extra) {
      extra->push_back(&s);
    } else {
      s.fail("unknown top-level form");
    }
  }
  if (asserts.empty())
    f.body = ex::lit(1);
  else if (asserts.size() == 1)
    f.body = asserts.front();
  else
    f.body = ex::band(std::move(asserts));
  checkFormula(f);
  return f;
}

SOSFormula parseFormula(std::string_view text) {
  auto forms = parseSExprs(text);
  return formulaFromForms(forms);
}

std::string printFormula(const SOSFormula &f) {
  std::ostringstream os;
  os << "(width " << f.width << ")\n";
  for (const auto &fn : f.functions) {
    os << "(exists-fun " << fn.name << " (arity " << fn.arity << ") (out "
       << fn.outCount << ")";
    if (fn.predicate)
      os << " (predicate)";
    os << ")\n";
  }
  for (std::size_t i = 0; i < f.prefix.size();) {
    const Quantifier q = f.prefix[i].quantifier;
    os << (q == Quantifier::Forall ? "(forall" : "(exists");
    for (; i < f.prefix.size() && f.prefix[i].quantifier == q; ++i) {
      const VarDecl &v = f.prefix[i].var;
      if (v.width)
        os << " (" << v.name << ' ' << *v.width << ')';
      else
        os << ' ' << v.name;
    }
    os << ")\n";
  }
  os << "(assert " << toString(f.body) << ")\n";
  return os.str();
}

SynthesisInstance skolemize(const SOSFormula &f) {
  SynthesisInstance inst;
  inst.width = f.width;
  inst.functions = f.functions;

  std::set<std::string> taken;
  for (const auto &fn : f.functions)
    taken.insert(fn.name);
  for (const auto &q : f.prefix)
    taken.insert(q.var.name);

  std::map<std::string, ExprPtr> replace;
  std::vector<ExprPtr> universalRefs;
  for (const auto &q : f.prefix) {
    if (q.quantifier == Quantifier::Forall) {
      inst.universals.push_back(q.var);
      universalRefs.push_back(ex::var(q.var.name));
      continue;
    }
    std::string name = "F_" + q.var.name;
    for (unsigned k = 1; taken.count(name); ++k)
      name = "F_" + q.var.name + "_" + std::to_string(k);
    taken.insert(name);
    FunctionSignature sig;
    sig.name = name;
    sig.arity = static_cast<unsigned>(universalRefs.size());
    inst.functions.push_back(sig);
    ExprPtr term = ex::app(name, universalRefs);
    // A narrow existential only ranges over its own width.
    if (q.var.width && *q.var.width < f.width)
      term = ex::op(Opcode::And, {term, ex::lit(widthMask(*q.var.width))});
    replace[q.var.name] = term;
  }
  inst.body = replace.empty() ? f.body : substitute(f.body, replace);
  return inst;
}

SOSFormula toFormula(const SynthesisInstance &inst) {
  SOSFormula f;
  f.width = inst.width;
  f.functions = inst.functions;
  for (const auto &v : inst.universals)
    f.prefix.push_back({Quantifier::Forall, v});
  f.body = inst.body;
  return f;
}

// ---------------------------------------------------------------------------

CompiledBody::CompiledBody(const ExprPtr &body, std::span<const VarDecl> vars,
                           std::span<const FunctionSignature> functions)
    : vars_(vars.begin(), vars.end()),
      functions_(functions.begin(), functions.end()) {
  std::map<const Expr *, std::uint32_t> memo;
  compile(body, memo);
}

std::uint32_t
CompiledBody::compile(const ExprPtr &e,
                      std::map<const Expr *, std::uint32_t> &memo) {
  if (auto it = memo.find(e.get()); it != memo.end())
    return it->second;
  std::vector<std::uint32_t> kids;
  kids.reserve(e->children.size());
  for (const auto &c : e->children)
    kids.push_back(compile(c, memo));

  Node n{};
  n.kind = e->kind;
  n.op = e->op;
  n.boolOp = e->boolOp;
  n.atom = e->atom;
  n.value = e->value;
  n.projection = e->projection;
  n.firstChild = static_cast<std::uint32_t>(childIdx_.size());
  n.numChildren = static_cast<std::uint32_t>(kids.size());
  childIdx_.insert(childIdx_.end(), kids.begin(), kids.end());
  if (e->kind == ExprKind::Var) {
    bool found = false;
    for (std::size_t i = 0; i < vars_.size(); ++i)
      if (vars_[i].name == e->name) {
        n.index = static_cast<std::uint32_t>(i);
        found = true;
      }
    if (!found)
      throw UnknownSymbol("undeclared variable '" + e->name + "'");
  } else if (e->kind == ExprKind::App) {
    bool found = false;
    for (std::size_t i = 0; i < functions_.size(); ++i)
      if (functions_[i].name == e->name) {
        n.index = static_cast<std::uint32_t>(i);
        found = true;
      }
    if (!found)
      throw UnknownSymbol("undeclared function symbol '" + e->name + "'");
  } else if (e->kind == ExprKind::Op && isFloatOpcode(e->op)) {
    usesFloat_ = true;
  }
  nodes_.push_back(n);
  const auto id = static_cast<std::uint32_t>(nodes_.size() - 1);
  memo.emplace(e.get(), id);
  return id;
}

Word BodyEvaluator::literal(const CompiledBody::Node &n, unsigned width) const {
  const Word m = widthMask(width);
  if (n.kind == ExprKind::Literal)
    return n.value & m;
  switch (n.atom) {
  case WidthAtom::Width:
    return Word{width} & m;
  case WidthAtom::Ones:
    return m;
  case WidthAtom::SignBit:
    return signBit(width);
  }
  return 0;
}

bool BodyEvaluator::holds(std::span<const Word> vars,
                          std::span<const Program *const> programs,
                          unsigned width) {
  return holdsWith(vars, width,
                   [&](std::uint32_t fn, std::span<const Word> args,
                       std::uint32_t proj) -> Word {
                     const Program &p = *programs[fn];
                     temps_.resize(std::max<std::size_t>(p.length(), 1));
                     outs_.resize(p.outCount);
                     execUnchecked(p, args, temps_, outs_);
                     return outs_[proj];
                   });
}

void checkWitness(const FunctionSignature &sig, const Program &p,
                  unsigned width) {
  if (p.arity != sig.arity || p.outCount != sig.outCount)
    throw ArityMismatch("witness for " + sig.name + " has type " +
                        std::to_string(p.arity) + "->" +
                        std::to_string(p.outCount) + ", expected " +
                        std::to_string(sig.arity) + "->" +
                        std::to_string(sig.outCount));
  if (p.width != width)
    throw UnsupportedWidth("witness for " + sig.name + " has width " +
                           std::to_string(p.width) + ", expected " +
                           std::to_string(width));
  auto violations = validate(p);
  if (!violations.empty())
    throw MalformedProgram("witness for " + sig.name + ": " + violations.front());
}

bool evaluateBody(const SynthesisInstance &inst, const Assignment &assignment,
                  const std::map<std::string, Program> &witnesses,
                  unsigned width) {
  if (assignment.values.size() != inst.universals.size())
    throw ArityMismatch("assignment does not cover the universals");
  std::vector<const Program *> programs;
  for (const auto &sig : inst.functions) {
    auto it = witnesses.find(sig.name);
    if (it == witnesses.end())
      throw UnknownSymbol("no witness for " + sig.name);
    checkWitness(sig, it->second, width);
    programs.push_back(&it->second);
  }
  CompiledBody body(inst);
  BodyEvaluator ev(body);
  return ev.holds(assignment.values, programs, width);
}

} // namespace sosat
