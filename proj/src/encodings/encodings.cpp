#include "sosat/encodings.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace sosat {

namespace {

using namespace ex;

void collectVars(const ExprPtr &e, std::set<std::string> &out) {
  if (e->kind == ExprKind::Var)
    out.insert(e->name);
  for (const auto &c : e->children)
    collectVars(c, out);
}

void requireVars(const ExprPtr &e, const std::set<std::string> &allowed,
                 const char *what) {
  if (!e)
    return;
  std::set<std::string> used;
  collectVars(e, used);
  for (const auto &v : used)
    if (!allowed.count(v))
      throw UnknownSymbol(std::string(what) + " mentions unknown variable " + v);
}

std::vector<ExprPtr> stateVars(const LoopSystem &loop) {
  std::vector<ExprPtr> out;
  for (const auto &v : loop.vars)
    out.push_back(var(v.name));
  return out;
}

std::vector<ExprPtr> primedVars(const LoopSystem &loop) {
  std::vector<ExprPtr> out;
  for (const auto &v : loop.vars)
    out.push_back(var(primed(v.name)));
  return out;
}

ExprPtr orTrue(const ExprPtr &e) { return e ? e : lit(1); }

FunctionSignature predicate(std::string name, unsigned arity) {
  return {std::move(name), arity, 1, true};
}

void bindStates(SOSFormula &f, const LoopSystem &loop, bool withPrimed) {
  for (const auto &v : loop.vars)
    f.prefix.push_back({Quantifier::Forall, v});
  if (withPrimed)
    for (const auto &v : loop.vars)
      f.prefix.push_back(
          {Quantifier::Forall, VarDecl{primed(v.name), v.width}});
}

unsigned atomNumber(const SExpr &s) {
  if (!s.isAtom() || s.atom.empty() ||
      s.atom.find_first_not_of("0123456789") != std::string::npos)
    s.fail("expected a number");
  return static_cast<unsigned>(std::stoul(s.atom));
}

} // namespace

std::string primed(std::string_view name) { return std::string(name) + "'"; }

void checkLoop(const LoopSystem &loop) {
  if (loop.vars.empty())
    throw ArityMismatch("a loop needs at least one state variable");
  if (!loop.init || !loop.guard || !loop.body)
    throw SyntaxError("a loop needs init, guard and body", 0, 0);
  std::set<std::string> x, both;
  for (const auto &v : loop.vars) {
    if (!x.insert(v.name).second)
      throw ArityMismatch("duplicate state variable " + v.name);
    both.insert(v.name);
    both.insert(primed(v.name));
  }
  requireVars(loop.init, x, "init");
  requireVars(loop.guard, x, "guard");
  requireVars(loop.assertion, x, "assertion");
  requireVars(loop.body, both, "body");
}

LoopSystem parseLoop(std::string_view text) {
  LoopSystem loop;
  bool sawLoop = false;
  for (const SExpr &s : parseSExprs(text)) {
    if (s.isForm("width") && s.items.size() == 2) {
      loop.width = atomNumber(s.items[1]);
      continue;
    }
    if (!s.isForm("loop"))
      s.fail("expected (width N) or (loop ...)");
    sawLoop = true;
    for (std::size_t i = 1; i < s.items.size(); ++i) {
      const SExpr &part = s.items[i];
      if (part.isForm("vars")) {
        for (std::size_t k = 1; k < part.items.size(); ++k) {
          const SExpr &v = part.items[k];
          if (v.isAtom())
            loop.vars.push_back({v.atom, std::nullopt});
          else if (v.items.size() == 2 && v.items[0].isAtom())
            loop.vars.push_back({v.items[0].atom, atomNumber(v.items[1])});
          else
            v.fail("expected NAME or (NAME WIDTH)");
        }
        continue;
      }
      if (part.items.size() != 2)
        part.fail("expected (init|guard|body|assert EXPR)");
      ExprPtr e = parseExpr(part.items[1]);
      if (part.isForm("init"))
        loop.init = e;
      else if (part.isForm("guard"))
        loop.guard = e;
      else if (part.isForm("body"))
        loop.body = e;
      else if (part.isForm("assert"))
        loop.assertion = e;
      else
        part.fail("unknown loop part");
    }
  }
  if (!sawLoop)
    throw SyntaxError("no (loop ...) form", 1, 1);
  if (loop.width < 1 || loop.width > kMaxWidth)
    throw UnsupportedWidth("loop width outside [1, 64]");
  checkLoop(loop);
  return loop;
}

SOSFormula encodeSafety(const LoopSystem &loop, const ExprPtr &assertion) {
  checkLoop(loop);
  const unsigned n = static_cast<unsigned>(loop.vars.size());
  SOSFormula f;
  f.width = loop.width;
  f.functions.push_back(predicate("S", n));
  bindStates(f, loop, true);
  const auto x = stateVars(loop);
  const ExprPtr Sx = app("S", x);
  const ExprPtr Sxp = app("S", primedVars(loop));
  f.body = band({bimplies(loop.init, Sx),
                 bimplies(band({Sx, loop.guard, loop.body}), Sxp),
                 bimplies(band({Sx, bnot(loop.guard)}), orTrue(assertion))});
  checkFormula(f);
  return f;
}

SOSFormula encodeTermination(const LoopSystem &loop) {
  checkLoop(loop);
  const unsigned n = static_cast<unsigned>(loop.vars.size());
  SOSFormula f;
  f.width = loop.width;
  f.functions.push_back({"R", n, 1, false});
  f.functions.push_back(predicate("W", n));
  bindStates(f, loop, true);
  const auto x = stateVars(loop);
  const auto xp = primedVars(loop);
  const ExprPtr Wx = app("W", x);
  const ExprPtr Rx = app("R", x);
  f.body = band(
      {bimplies(band({loop.init, loop.guard}), Wx),
       bimplies(band({loop.guard, Wx, loop.body}),
                band({app("W", xp), op(Opcode::Lt, {lit(0), Rx}),
                      op(Opcode::Lt, {app("R", xp), Rx})}))});
  checkFormula(f);
  return f;
}

SOSFormula encodeNontermination(const LoopSystem &loop) {
  checkLoop(loop);
  const unsigned n = static_cast<unsigned>(loop.vars.size());
  SOSFormula f;
  f.width = loop.width;
  f.functions.push_back(predicate("N", n));
  f.functions.push_back({"C", n, n, false});
  std::vector<ExprPtr> start;
  for (const auto &v : loop.vars) {
    f.functions.push_back({"x0_" + v.name, 0, 1, false});
    start.push_back(app("x0_" + v.name, {}));
  }
  bindStates(f, loop, false);
  const auto x = stateVars(loop);
  std::vector<ExprPtr> next;
  std::map<std::string, ExprPtr> succ;
  for (unsigned j = 0; j < n; ++j) {
    next.push_back(app("C", x, j));
    succ[primed(loop.vars[j].name)] = next.back();
  }
  const ExprPtr Nx = app("N", x);
  f.body = band({app("N", start), bimplies(Nx, loop.guard),
                 bimplies(Nx, band({substitute(loop.body, succ),
                                    app("N", next)}))});
  checkFormula(f);
  return f;
}

SOSFormula encodeQbf(const QbfFormula &q) {
  SOSFormula f;
  f.width = 1;
  for (const auto &[quant, name] : q.prefix)
    f.prefix.push_back({quant, VarDecl{name, std::nullopt}});
  f.body = q.matrix;
  checkFormula(f);
  return f;
}

QbfFormula negateQbf(const QbfFormula &q) {
  QbfFormula out;
  for (const auto &[quant, name] : q.prefix)
    out.prefix.push_back({quant == Quantifier::Forall ? Quantifier::Exists
                                                      : Quantifier::Forall,
                          name});
  // Double negation is removed so that negation is an involution.
  if (q.matrix->kind == ExprKind::Bool && q.matrix->boolOp == BoolOp::Not)
    out.matrix = q.matrix->children[0];
  else
    out.matrix = bnot(q.matrix);
  return out;
}

QbfFormula parseQdimacs(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  long vars = -1, clauses = -1;
  QbfFormula q;
  std::set<long> bound;
  std::vector<ExprPtr> matrix;
  std::vector<ExprPtr> current;
  auto name = [](long v) { return "v" + std::to_string(v); };
  unsigned lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head) || head == "c")
      continue;
    if (head == "p") {
      std::string fmt;
      if (!(ls >> fmt >> vars >> clauses) || fmt != "cnf" || vars < 0 ||
          clauses < 0)
        throw SyntaxError("bad problem line", lineNo, 1);
      continue;
    }
    if (vars < 0)
      throw SyntaxError("missing problem line", lineNo, 1);
    if (head == "a" || head == "e") {
      if (!matrix.empty() || !current.empty())
        throw SyntaxError("quantifier line after clauses", lineNo, 1);
      const Quantifier quant =
          head == "a" ? Quantifier::Forall : Quantifier::Exists;
      long v;
      while (ls >> v && v != 0) {
        if (v < 0 || v > vars || !bound.insert(v).second)
          throw SyntaxError("bad quantified variable", lineNo, 1);
        q.prefix.push_back({quant, name(v)});
      }
      continue;
    }
    std::istringstream cs(line);
    long lit;
    while (cs >> lit) {
      if (lit == 0) {
        matrix.push_back(current.empty() ? ex::lit(0) : bor(current));
        current.clear();
        continue;
      }
      if (std::labs(lit) > vars)
        throw SyntaxError("literal out of range", lineNo, 1);
      const ExprPtr v = var(name(std::labs(lit)));
      current.push_back(lit > 0 ? v : bnot(v));
    }
  }
  if (vars < 0)
    throw SyntaxError("missing problem line", lineNo, 1);
  if (!current.empty())
    matrix.push_back(bor(current));
  // Free variables are existential at the outermost level.
  std::set<long> used;
  for (long v = 1; v <= vars; ++v)
    if (!bound.count(v))
      used.insert(v);
  std::vector<std::pair<Quantifier, std::string>> outer;
  for (long v : used)
    outer.push_back({Quantifier::Exists, name(v)});
  q.prefix.insert(q.prefix.begin(), outer.begin(), outer.end());
  q.matrix = matrix.empty() ? ex::lit(1) : band(matrix);
  return q;
}

std::vector<ExprPtr> programExprs(const Program &p) {
  std::vector<ExprPtr> temps;
  auto operand = [&](const Operand &o) -> ExprPtr {
    switch (o.kind) {
    case Operand::Kind::Const:
      return lit(p.constants[o.index]);
    case Operand::Kind::Input:
      return var("x" + std::to_string(o.index));
    case Operand::Kind::Temp:
      return temps[o.index];
    }
    return nullptr;
  };
  for (const Instruction &in : p.body) {
    std::vector<ExprPtr> args;
    for (const Operand &o : in.operands())
      args.push_back(operand(o));
    temps.push_back(op(in.op, std::move(args)));
  }
  std::vector<ExprPtr> out;
  if (p.isDegenerate()) {
    for (unsigned j = 0; j < p.outCount; ++j)
      out.push_back(lit(p.constants.at(j)));
    return out;
  }
  for (unsigned j = 0; j < p.outCount; ++j)
    out.push_back(temps[p.body.size() - p.outCount + j]);
  return out;
}

SOSFormula encodeSuperopt(const std::vector<ExprPtr> &reference,
                          const std::vector<VarDecl> &inputs, unsigned width) {
  SOSFormula f;
  f.width = width;
  const auto outs = static_cast<unsigned>(reference.size());
  f.functions.push_back(
      {"P", static_cast<unsigned>(inputs.size()), outs, false});
  std::vector<ExprPtr> args;
  for (const auto &v : inputs) {
    f.prefix.push_back({Quantifier::Forall, v});
    args.push_back(var(v.name));
  }
  std::vector<ExprPtr> eqs;
  for (unsigned j = 0; j < outs; ++j)
    eqs.push_back(op(Opcode::Eq, {app("P", args, j), reference[j]}));
  f.body = eqs.size() == 1 ? eqs.front() : band(eqs);
  checkFormula(f);
  return f;
}

SOSFormula encodeSuperopt(const Program &reference) {
  if (auto errs = validate(reference); !errs.empty())
    throw MalformedProgram(errs.front());
  std::vector<VarDecl> inputs;
  for (unsigned i = 0; i < reference.arity; ++i)
    inputs.push_back({"x" + std::to_string(i), std::nullopt});
  return encodeSuperopt(programExprs(reference), inputs, reference.width);
}

std::vector<BenchmarkCase> loadCorpus(const std::filesystem::path &dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in)
    throw Error("cannot read " + (dir / "manifest.json").string());
  const auto manifest = nlohmann::json::parse(in);
  std::vector<BenchmarkCase> out;
  for (const auto &j : manifest.at("cases")) {
    BenchmarkCase c;
    c.id = j.at("id");
    c.title = j.value("title", "");
    c.status = j.value("status", "solved") == "known-hard"
                   ? CaseStatus::KnownHard
                   : CaseStatus::Solved;
    c.enableShl = j.value("enable_shl", false);
    if (j.contains("reference")) {
      c.reference = parseProgram(j.at("reference").get<std::string>());
      c.referenceLength = static_cast<unsigned>(c.reference->length());
    }
    if (j.contains("file")) {
      c.file = dir / j.at("file").get<std::string>();
      std::ifstream f(c.file);
      if (!f)
        throw Error("cannot read " + c.file.string());
      std::stringstream ss;
      ss << f.rdbuf();
      c.formula = parseFormula(ss.str());
    }
    out.push_back(std::move(c));
  }
  return out;
}

} // namespace sosat
