// Acceptance run: one PASS/FAIL line per criterion. Witnesses are re-checked
// with the reference semantics in oracle.hpp, not with the library's
// evaluator.
#include "oracle.hpp"
#include "qbf_oracle.hpp"
#include "sosat/bitblast.hpp"
#include "sosat/driver.hpp"

#include <json.hpp>

#include <chrono>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

using namespace sosat;
using nlohmann::json;
using u64 = std::uint64_t;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// Independent re-checking

/// A program read back from its printed text.
struct TextProgram {
  unsigned outCount = 1;
  std::vector<u64> consts;
  std::vector<oracle::Step> steps;
};

TextProgram readText(const std::string &text) {
  std::istringstream in(text);
  std::string line, tok;
  TextProgram p;
  std::getline(in, line);
  std::istringstream hdr(line);
  unsigned arity = 0, width = 0;
  hdr >> tok >> arity >> p.outCount >> width >> tok;
  while (hdr >> tok)
    p.consts.push_back(std::stoull(tok));
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    oracle::Step s;
    ls >> tok >> tok >> s.op;
    while (ls >> tok)
      s.args.push_back(tok);
    p.steps.push_back(std::move(s));
  }
  return p;
}

using TextWitnesses = std::map<std::string, TextProgram>;

TextWitnesses readWitnesses(const std::map<std::string, Program> &ws) {
  TextWitnesses out;
  for (const auto &[name, p] : ws)
    out[name] = readText(prettyPrint(p));
  return out;
}

using AppFn =
    std::function<u64(const std::string &, unsigned, const std::vector<u64> &)>;

u64 evalExpr(const ExprPtr &e, const std::map<std::string, u64> &env,
             unsigned w, const AppFn &app) {
  const u64 m = oracle::mask(w);
  std::vector<u64> kids;
  for (const auto &c : e->children)
    kids.push_back(evalExpr(c, env, w, app));
  switch (e->kind) {
  case ExprKind::Literal:
    return e->value & m;
  case ExprKind::WidthAtom:
    switch (e->atom) {
    case WidthAtom::Width:
      return u64{w} & m;
    case WidthAtom::Ones:
      return m;
    case WidthAtom::SignBit:
      return u64{1} << (w - 1);
    }
    break;
  case ExprKind::Var:
    return env.at(e->name);
  case ExprKind::Op: {
    u64 r = 0;
    if (!oracle::eval(std::string(opcodeName(e->op)), kids, w, r))
      throw std::logic_error("oracle lacks opcode");
    return r & m;
  }
  case ExprKind::Bool:
    switch (e->boolOp) {
    case BoolOp::And:
      return std::all_of(kids.begin(), kids.end(), [](u64 v) { return v; });
    case BoolOp::Or:
      return std::any_of(kids.begin(), kids.end(), [](u64 v) { return v; });
    case BoolOp::Not:
      return kids[0] == 0;
    case BoolOp::Implies:
      return kids[0] == 0 || kids[1] != 0;
    case BoolOp::Iff:
      return (kids[0] != 0) == (kids[1] != 0);
    }
    break;
  case ExprKind::App:
    return app(e->name, e->projection, kids) & m;
  }
  throw std::logic_error("bad expression");
}

AppFn programApp(const TextWitnesses &ws, unsigned w) {
  return [&ws, w](const std::string &fn, unsigned proj,
                  const std::vector<u64> &args) {
    const auto &p = ws.at(fn);
    std::vector<u64> consts;
    for (u64 c : p.consts)
      consts.push_back(c & oracle::mask(w));
    return oracle::run(p.steps, p.outCount, consts, args, w).at(proj);
  };
}

unsigned bitsAt(const std::vector<VarDecl> &vars, unsigned w) {
  unsigned n = 0;
  for (const auto &v : vars)
    n += v.widthAt(w);
  return n;
}

std::map<std::string, u64> pointEnv(const std::vector<VarDecl> &vars,
                                    unsigned w, u64 k) {
  std::map<std::string, u64> env;
  for (const auto &v : vars) {
    const unsigned vw = v.widthAt(w);
    env[v.name] = k & oracle::mask(vw);
    k >>= vw;
  }
  return env;
}

/// Exhaustive check at width w; returns the number of failing points.
u64 countFailures(const SynthesisInstance &inst, const TextWitnesses &ws,
                  unsigned w) {
  const AppFn app = programApp(ws, w);
  const unsigned bits = bitsAt(inst.universals, w);
  u64 bad = 0;
  for (u64 k = 0; k < (u64{1} << bits); ++k)
    bad += evalExpr(inst.body, pointEnv(inst.universals, w, k), w, app) == 0;
  return bad;
}

/// Random points plus the corners, for widths too large to enumerate.
u64 sampleFailures(const SynthesisInstance &inst, const TextWitnesses &ws,
                   unsigned w, unsigned samples, std::mt19937_64 &rng) {
  const AppFn app = programApp(ws, w);
  u64 bad = 0;
  for (unsigned s = 0; s < samples; ++s) {
    std::map<std::string, u64> env;
    for (const auto &v : inst.universals) {
      const u64 m = oracle::mask(v.widthAt(w));
      const u64 corners[] = {0, 1, m, m >> 1, (m >> 1) + 1};
      env[v.name] = s < 25 ? corners[(s / (v.name.size() + 1)) % 5] & m
                           : rng() & m;
    }
    bad += evalExpr(inst.body, env, w, app) == 0;
  }
  return bad;
}

// ---------------------------------------------------------------------------
// Run bookkeeping shared by the soundness, length and accounting checks

struct Run {
  std::string name;
  SynthesisInstance inst;
  SolverResult result;
  std::string log;
  unsigned verifyWidth = 0;
};

std::vector<Run> g_runs;

SolverConfig baseConfig(double timeout) {
  SolverConfig c;
  c.timeoutSeconds = timeout;
  return c;
}

const Run &record(const std::string &name, const SynthesisInstance &inst,
                  SolverConfig cfg) {
  std::ostringstream log;
  cfg.log = &log;
  Run r;
  r.name = name;
  r.inst = inst;
  r.verifyWidth = cfg.targetWidth.value_or(inst.width);
  r.result = solve(inst, cfg);
  r.log = log.str();
  g_runs.push_back(std::move(r));
  return g_runs.back();
}

std::string readFile(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kData = SOSAT_TEST_DATA;

// ctest hides the output of passing tests, so the lines are also kept here.
std::ofstream g_report("acceptance_report.txt");

bool report(int n, bool ok, const std::string &detail) {
  std::ostringstream line;
  line << "AC" << n << " " << (ok ? "PASS" : "FAIL") << ": " << detail << "\n";
  std::cout << line.str() << std::flush;
  g_report << line.str() << std::flush;
  return ok;
}

std::string fmt(double v, int prec = 2) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(prec) << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// AC1: superoptimisation corpus at width 32

bool ac1(const std::vector<BenchmarkCase> &corpus) {
  static const std::set<std::string> shortCases = {
      "P1",  "P2",  "P3",  "P4",  "P5",  "P6",  "P7",  "P8",  "P9",  "P10",
      "P11", "P12", "P13", "P14", "P15", "P16", "P17", "P18", "P27", "B28"};
  std::mt19937_64 rng(32);
  unsigned cases = 0, solved = 0;
  double iters = 0, secs = 0;
  std::vector<std::string> longer, unsound, unsolved;
  for (const auto &c : corpus) {
    if (!shortCases.count(c.id))
      continue;
    ++cases;
    SolverConfig cfg = baseConfig(60);
    cfg.initialWidth = 4;
    cfg.enableShl = c.enableShl;
    const auto t0 = Clock::now();
    const auto inst = skolemize(*c.formula);
    const Run &r = record("corpus " + c.id, inst, cfg);
    const double s = since(t0);
    std::cerr << "  " << c.id << " " << verdictName(r.result.verdict) << " "
              << fmt(s) << "s\n";
    if (r.result.verdict != Verdict::Sat) {
      unsolved.push_back(c.id);
      continue;
    }
    if (sampleFailures(inst, readWitnesses(r.result.witnesses), 32, 20000,
                       rng)) {
      unsound.push_back(c.id);
      continue;
    }
    ++solved;
    iters += double(r.result.stats.iterations);
    secs += s;
    if (r.result.stats.minimalSolutionLength > c.referenceLength.value_or(0))
      longer.push_back(c.id);
  }
  auto join = [](const std::vector<std::string> &v) {
    std::string s;
    for (const auto &x : v)
      s += (s.empty() ? "" : ",") + x;
    return s.empty() ? std::string("none") : s;
  };
  const double meanIters = solved ? iters / solved : 0;
  const bool ok = cases == 20 && solved >= 15 && longer.empty() &&
                  unsound.empty() && meanIters <= 20;
  return report(1, ok,
                std::to_string(solved) + "/" + std::to_string(cases) +
                    " solved at W=32 (need 15), mean iterations " +
                    fmt(meanIters, 1) + " (limit 20), mean time " +
                    fmt(solved ? secs / solved : 0) + "s; unsolved: " +
                    join(unsolved) + "; longer than reference: " +
                    join(longer) + "; failed re-check: " + join(unsound));
}

// ---------------------------------------------------------------------------
// AC2: minimality against brute-force enumeration at width 4

/// Enumerates every program over the synthesis opcodes, with any operand
/// (input, earlier temp or any w-bit constant), up to `maxLen` instructions,
/// and returns the smallest length meeting `accept` on all points.
class Enumerator {
public:
  Enumerator(unsigned w, unsigned arity, unsigned outCount, bool shl,
             std::vector<std::vector<u64>> points,
             std::vector<std::set<std::vector<u64>>> accept)
      : w_(w), outCount_(outCount), points_(std::move(points)),
        accept_(std::move(accept)) {
    // Operation tables over all operand tuples; fine for w <= 4.
    for (Opcode op : synthesisOpcodes(shl)) {
      const unsigned n = opcodeArity(op);
      std::vector<u64> table(std::size_t{1} << (w * n));
      for (std::size_t key = 0; key < table.size(); ++key) {
        std::vector<u64> a(n);
        for (unsigned k = 0; k < n; ++k)
          a[k] = (key >> (w * k)) & oracle::mask(w);
        oracle::eval(std::string(opcodeName(op)), a, w, table[key]);
        table[key] &= oracle::mask(w);
      }
      tables_.push_back(std::move(table));
      arities_.push_back(n);
    }
    for (unsigned i = 0; i < arity; ++i) {
      std::vector<u64> col;
      for (const auto &p : points_)
        col.push_back(p[i]);
      base_.push_back(col);
    }
    for (u64 c = 0; c <= oracle::mask(w); ++c)
      base_.push_back(std::vector<u64>(points_.size(), c));
  }

  std::optional<unsigned> minimal(unsigned maxLen) {
    for (unsigned len = 1; len <= maxLen; ++len) {
      std::vector<std::vector<u64>> temps;
      if (search(len, temps))
        return len;
    }
    return std::nullopt;
  }

private:
  bool search(unsigned len, std::vector<std::vector<u64>> &temps) {
    std::vector<const std::vector<u64> *> srcs;
    for (const auto &b : base_)
      srcs.push_back(&b);
    for (const auto &t : temps)
      srcs.push_back(&t);
    const bool last = temps.size() + 1 == len;
    if (last && len < outCount_)
      return false;
    std::set<std::vector<u64>> seen;
    const std::size_t n = srcs.size();
    for (std::size_t op = 0; op < tables_.size(); ++op) {
      const unsigned arity = arities_[op];
      std::size_t idx[3] = {0, 0, 0};
      for (;;) {
        if (last) {
          if (matches(op, arity, srcs, idx, temps))
            return true;
        } else {
          std::vector<u64> v = apply(op, arity, srcs, idx);
          if (seen.insert(v).second) {
            temps.push_back(std::move(v));
            const bool found = search(len, temps);
            temps.pop_back();
            if (found)
              return true;
          }
        }
        unsigned k = 0;
        while (k < arity && ++idx[k] == n)
          idx[k++] = 0;
        if (k == arity)
          break;
      }
    }
    return false;
  }

  u64 at(std::size_t op, unsigned arity,
         const std::vector<const std::vector<u64> *> &srcs,
         const std::size_t *idx, std::size_t p) const {
    std::size_t key = 0;
    for (unsigned k = arity; k-- > 0;)
      key = (key << w_) | (*srcs[idx[k]])[p];
    return tables_[op][key];
  }

  std::vector<u64> apply(std::size_t op, unsigned arity,
                         const std::vector<const std::vector<u64> *> &srcs,
                         const std::size_t *idx) const {
    std::vector<u64> v(points_.size());
    for (std::size_t p = 0; p < points_.size(); ++p)
      v[p] = at(op, arity, srcs, idx, p);
    return v;
  }

  bool matches(std::size_t op, unsigned arity,
               const std::vector<const std::vector<u64> *> &srcs,
               const std::size_t *idx,
               const std::vector<std::vector<u64>> &temps) const {
    std::vector<u64> out(outCount_);
    for (std::size_t p = 0; p < points_.size(); ++p) {
      for (unsigned k = 0; k + 1 < outCount_; ++k)
        out[k] = temps[temps.size() - (outCount_ - 1) + k][p];
      out[outCount_ - 1] = at(op, arity, srcs, idx, p);
      if (!accept_[p].count(out))
        return false;
    }
    return true;
  }

  unsigned w_, outCount_;
  std::vector<std::vector<u64>> points_;
  std::vector<std::set<std::vector<u64>>> accept_;
  std::vector<std::vector<u64>> tables_;
  std::vector<unsigned> arities_;
  std::vector<std::vector<u64>> base_;
};

/// Minimal length at width w of the single function of `inst`, searching up
/// to `maxLen`. The function must only be applied to the universals in order.
std::optional<unsigned> bruteMinimal(const SynthesisInstance &inst, unsigned w,
                                     unsigned maxLen, bool shl) {
  const auto &fn = inst.functions.at(0);
  const unsigned bits = bitsAt(inst.universals, w);
  std::vector<std::vector<u64>> points;
  std::vector<std::set<std::vector<u64>>> accept;
  const u64 outs = u64{1} << (w * fn.outCount);
  for (u64 k = 0; k < (u64{1} << bits); ++k) {
    const auto env = pointEnv(inst.universals, w, k);
    std::vector<u64> pt;
    for (const auto &v : inst.universals)
      pt.push_back(env.at(v.name));
    std::set<std::vector<u64>> ok;
    for (u64 code = 0; code < outs; ++code) {
      std::vector<u64> tuple;
      for (unsigned j = 0; j < fn.outCount; ++j)
        tuple.push_back((code >> (j * w)) & oracle::mask(w));
      const AppFn app = [&](const std::string &, unsigned proj,
                            const std::vector<u64> &args) {
        if (args != pt)
          throw std::logic_error("function applied off the universals");
        return tuple[proj];
      };
      if (evalExpr(inst.body, env, w, app))
        ok.insert(tuple);
    }
    points.push_back(pt);
    accept.push_back(std::move(ok));
  }
  Enumerator e(w, fn.arity, fn.outCount, shl, points, accept);
  return e.minimal(maxLen);
}

bool ac2(const std::vector<BenchmarkCase> &corpus) {
  unsigned checked = 0;
  std::vector<std::string> bad;
  for (const auto &c : corpus) {
    if (!c.formula || !c.referenceLength || *c.referenceLength > 3)
      continue;
    ++checked;
    SynthesisInstance inst = skolemize(*c.formula);
    inst.width = 4;
    SolverConfig cfg = baseConfig(120);
    cfg.enableShl = c.enableShl;
    const Run &r = record("w4 " + c.id, inst, cfg);
    if (r.result.verdict != Verdict::Sat) {
      bad.push_back(c.id + ":" + std::string(verdictName(r.result.verdict)));
      continue;
    }
    const auto len = r.result.stats.minimalSolutionLength;
    // A program of the solver's length exists (its witness is re-checked
    // under AC3). Up to length 2 the enumerator must reach it on its own;
    // beyond that it only rules out shorter programs.
    if (len > 3) {
      bad.push_back(c.id + ":length " + std::to_string(len) +
                    " beyond the enumerated range");
      continue;
    }
    const unsigned upTo = len <= 2 ? unsigned(len) : unsigned(len) - 1;
    const auto found = bruteMinimal(inst, 4, upTo, c.enableShl);
    const std::optional<unsigned> expect =
        len <= 2 ? std::optional<unsigned>(unsigned(len)) : std::nullopt;
    std::cerr << "  " << c.id << " solver " << len << " enumerated "
              << (found ? std::to_string(*found) : "none") << " (up to "
              << upTo << ")\n";
    if (found != expect)
      bad.push_back(c.id + ":solver " + std::to_string(len) + " vs " +
                    (found ? std::to_string(*found) : "none up to " +
                                                          std::to_string(upTo)));
  }
  std::string detail = std::to_string(checked) +
                       " cases with reference length <= 3 at w=4; mismatches:";
  for (const auto &b : bad)
    detail += " " + b;
  if (bad.empty())
    detail += " none";
  return report(2, bad.empty() && checked > 0, detail);
}

// ---------------------------------------------------------------------------
// AC4: completeness on small unsatisfiable instances

SOSFormula fileFormula(const std::string &path, const std::string &property) {
  const auto text = readFile(path);
  if (path.ends_with(".loop")) {
    const auto loop = parseLoop(text);
    if (property == "safety")
      return encodeSafety(loop, loop.assertion);
    if (property == "termination")
      return encodeTermination(loop);
    return encodeNontermination(loop);
  }
  if (path.ends_with(".qdimacs"))
    return encodeQbf(parseQdimacs(text));
  return parseFormula(text);
}

bool ac4() {
  const std::pair<const char *, const char *> suite[] = {
      {"and_or.sos", ""},
      {"and_or_same_args.sos", ""},
      {"unread_inputs.sos", ""},
      {"partly_unread.sos", ""},
      {"two_outputs.sos", ""},
      {"swap_forever.loop", "termination"},
      {"exits_at_once.loop", "nontermination"},
      {"violated.loop", "safety"},
      {"exists_forall.qdimacs", ""},
      {"alternation.qdimacs", ""},
  };
  const auto t0 = Clock::now();
  unsigned unsat = 0, small = 0;
  std::string others;
  for (const auto &[file, prop] : suite) {
    const auto inst = skolemize(fileFormula(kData + "/unsat/" + file, prop));
    small += inst.width == 1 && inst.inputBits() <= 4;
    const auto t1 = Clock::now();
    const Run &r = record(std::string("unsat ") + file, inst, baseConfig(300));
    std::cerr << "  " << file << " " << verdictName(r.result.verdict) << " "
              << fmt(since(t1)) << "s\n";
    if (r.result.verdict == Verdict::Unsat)
      ++unsat;
    else
      others += std::string(" ") + file;
  }
  const double total = since(t0);
  return report(4, unsat == 10 && small == 10 && total <= 300,
                std::to_string(unsat) + "/10 UNSAT (" + std::to_string(small) +
                    " at w=1 with <= 4 input bits) in " + fmt(total) +
                    "s (limit 300s)" + (others.empty() ? "" : "; not UNSAT:" + others));
}

// ---------------------------------------------------------------------------
// AC5: termination and non-termination proofs

bool ac5() {
  std::string detail;
  bool ok = true;

  {
    const auto loop = parseLoop(readFile(kData + "/decrement.loop"));
    const auto inst = skolemize(encodeTermination(loop));
    const auto t0 = Clock::now();
    const Run &r = record("termination decrement", inst, baseConfig(60));
    const double s = since(t0);
    const unsigned w = loop.width;
    bool good = r.result.verdict == Verdict::Sat && s <= 60 && w <= 8;
    u64 bad = 0;
    if (r.result.verdict == Verdict::Sat) {
      const auto ws = readWitnesses(r.result.witnesses);
      const AppFn app = programApp(ws, w);
      auto R = [&](u64 x) { return app("R", 0, {x}); };
      auto W = [&](u64 x) { return app("W", 0, {x}) != 0; };
      for (u64 x = 0; x <= oracle::mask(w); ++x) {
        const std::map<std::string, u64> e0 = {{"x", x}};
        const bool I = evalExpr(loop.init, e0, w, app);
        const bool G = evalExpr(loop.guard, e0, w, app);
        if (I && G && !W(x))
          ++bad;
        for (u64 x2 = 0; x2 <= oracle::mask(w); ++x2) {
          const std::map<std::string, u64> e = {{"x", x}, {"x'", x2}};
          if (G && W(x) && evalExpr(loop.body, e, w, app) &&
              !(W(x2) && R(x) > 0 && R(x) > R(x2)))
            ++bad;
        }
      }
      good = good && bad == 0;
    }
    ok = ok && good;
    detail += "decrement loop " + std::string(verdictName(r.result.verdict)) +
              " at w=" + std::to_string(w) + " in " + fmt(s) + "s, " +
              std::to_string(bad) + " violated (R, W) implications; ";
  }
  {
    const auto loop = parseLoop(readFile(kData + "/stay.loop"));
    const auto inst = skolemize(encodeNontermination(loop));
    const auto t0 = Clock::now();
    const Run &r = record("nontermination identity", inst, baseConfig(60));
    const double s = since(t0);
    const unsigned w = loop.width;
    bool good = r.result.verdict == Verdict::Sat && s <= 60 && w <= 8;
    u64 bad = 0;
    if (r.result.verdict == Verdict::Sat) {
      const auto ws = readWitnesses(r.result.witnesses);
      const AppFn app = programApp(ws, w);
      auto N = [&](u64 x) { return app("N", 0, {x}) != 0; };
      auto C = [&](u64 x) { return app("C", 0, {x}); };
      const u64 x0 = app("x0_x", 0, {});
      bad += !N(x0);
      for (u64 x = 0; x <= oracle::mask(w); ++x) {
        if (!N(x))
          continue;
        const std::map<std::string, u64> e = {{"x", x}, {"x'", C(x)}};
        bad += !evalExpr(loop.guard, e, w, app);
        bad += !evalExpr(loop.body, e, w, app) || !N(C(x));
      }
      good = good && bad == 0;
    }
    ok = ok && good;
    detail += "identity loop " + std::string(verdictName(r.result.verdict)) +
              " at w=" + std::to_string(w) + " in " + fmt(s) + "s, " +
              std::to_string(bad) + " violated (N, C, x0) implications";
  }
  return report(5, ok, detail);
}

// ---------------------------------------------------------------------------
// AC6: QBF against game-tree evaluation

bool ac6() {
  unsigned total = 0, mismatches = 0, undecided = 0, dualUndecided = 0,
           dualMismatch = 0;
  auto check = [&](const QbfFormula &q, bool dual) {
    const bool truth = qbf_oracle::evaluate(q);
    ++total;
    const Run &r =
        record("qbf " + std::to_string(total), skolemize(encodeQbf(q)),
               baseConfig(30));
    if (r.result.verdict == Verdict::Unknown)
      ++undecided;
    else if ((r.result.verdict == Verdict::Sat) != truth)
      ++mismatches;
    if (dual) {
      const auto d = solveQbfDual(q, baseConfig(30), nullptr);
      if (d.verdict == Verdict::Unknown)
        ++dualUndecided;
      else if ((d.verdict == Verdict::Sat) != truth)
        ++dualMismatch;
    }
  };
  for (const auto &prefix : qbf_oracle::allPrefixes(2))
    for (u64 table = 0; table < 16; ++table)
      check({prefix, qbf_oracle::fromTable({"q0", "q1"}, table)}, false);
  const unsigned exhaustive = total;
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i)
    check(qbf_oracle::random(rng, 3), true);
  return report(6,
                mismatches == 0 && undecided == 0 && dualUndecided == 0 &&
                    dualMismatch == 0,
                std::to_string(exhaustive) + " two-variable and " +
                    std::to_string(total - exhaustive) +
                    " sampled three-variable QBFs: " +
                    std::to_string(mismatches) + " mismatches, " +
                    std::to_string(undecided) + " undecided; dual: " +
                    std::to_string(dualMismatch) + " mismatches, " +
                    std::to_string(dualUndecided) + " undecided");
}

// ---------------------------------------------------------------------------
// AC7: bit-blasting against the interpreter

bool ac7() {
  const unsigned w = 4;
  u64 cases = 0, mismatches = 0;
  unsigned opcodes = 0;
  for (Opcode op : synthesisOpcodes(true)) {
    ++opcodes;
    const unsigned n = opcodeArity(op);
    sat::Solver s;
    SolverSink sink(s);
    BitBlaster bb(sink);
    std::vector<Bits> in;
    for (unsigned k = 0; k < n; ++k)
      in.push_back(bb.freshBits(w));
    const Bits out = bb.op(op, in);
    for (u64 ci = 0; ci < (u64{1} << (w * n)); ++ci) {
      std::vector<Word> vals(n);
      std::vector<Lit> assume;
      for (unsigned k = 0; k < n; ++k) {
        vals[k] = (ci >> (w * k)) & 0xf;
        for (unsigned i = 0; i < w; ++i)
          assume.push_back(in[k][i] ^ !((vals[k] >> i) & 1));
      }
      ++cases;
      if (s.solve(assume) != sat::Result::Sat) {
        ++mismatches;
        continue;
      }
      Word got = 0;
      for (unsigned i = 0; i < w; ++i)
        if (s.modelValue(out[i]))
          got |= Word{1} << i;
      mismatches += got != evalInstruction(op, vals, w);
    }
  }
  return report(7, mismatches == 0,
                std::to_string(opcodes) + " opcodes, " + std::to_string(cases) +
                    " operand tuples at w=4, " + std::to_string(mismatches) +
                    " mismatches");
}

// ---------------------------------------------------------------------------
// AC3, AC8 and AC9 over every recorded run

std::vector<json> parseLog(const std::string &text) {
  std::vector<json> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);)
    if (!line.empty())
      out.push_back(json::parse(line));
  return out;
}

bool ac3() {
  unsigned sat = 0, checked = 0, failed = 0, skipped = 0;
  std::string which;
  for (const Run &r : g_runs) {
    if (r.result.verdict != Verdict::Sat)
      continue;
    ++sat;
    SynthesisInstance inst = r.inst;
    const unsigned w = r.verifyWidth;
    if (bitsAt(inst.universals, w) > 16) {
      ++skipped;
      continue;
    }
    ++checked;
    if (countFailures(inst, readWitnesses(r.result.witnesses), w)) {
      ++failed;
      which += " " + r.name;
    }
  }
  return report(3, failed == 0 && checked > 0,
                std::to_string(checked) + " SAT verdicts with <= 16 input bits "
                "re-verified exhaustively, " + std::to_string(failed) +
                    " failed" + which + " (" + std::to_string(skipped) +
                    " wider SAT runs sample-checked under AC1)");
}

bool ac8() {
  unsigned logs = 0, decreasing = 0, sat = 0, firstMismatch = 0;
  std::string which;
  for (const Run &r : g_runs) {
    ++logs;
    unsigned last = 0;
    bool mono = true;
    std::size_t candLen = 0;
    std::optional<std::size_t> first;
    unsigned candW = 0;
    for (const json &j : parseLog(r.log)) {
      const std::string ev = j["event"];
      if (ev == "synth-start") {
        const unsigned l = j["l"];
        mono = mono && l >= last;
        last = l;
      } else if (ev == "candidate") {
        candLen = j["length"];
        candW = j["w"];
      } else if (ev == "verif-valid" && candW == r.verifyWidth && !first) {
        first = candLen;
      } else if (ev == "generalize" && j["ok"] == true && !first) {
        first = candLen;
      } else if (ev == "verdict" && j["verdict"] == "SAT") {
        ++sat;
        if (!first ||
            *first != j["minimal_solution_length"].get<std::size_t>() ||
            *first != r.result.stats.minimalSolutionLength) {
          ++firstMismatch;
          which += " " + r.name;
        }
      }
    }
    if (!mono) {
      ++decreasing;
      which += " " + r.name;
    }
  }
  return report(8, decreasing == 0 && firstMismatch == 0,
                std::to_string(logs) + " run logs, " +
                    std::to_string(decreasing) + " with a decreasing l; " +
                    std::to_string(sat) + " SAT runs, " +
                    std::to_string(firstMismatch) +
                    " whose first witness length differs from "
                    "minimal_solution_length" + which);
}

bool ac9(const std::vector<BenchmarkCase> &corpus) {
  unsigned bad = 0;
  std::string which;
  for (const Run &r : g_runs) {
    u64 synthEvents = 0, verifEvents = 0;
    for (const json &j : parseLog(r.log)) {
      const std::string ev = j["event"];
      synthEvents += ev == "synth-fail" || ev == "candidate";
      verifEvents += ev == "cex" || ev == "verif-valid";
    }
    u64 sw = 0, vw = 0;
    for (const auto &[k, v] : r.result.stats.synthWins)
      sw += v;
    for (const auto &[k, v] : r.result.stats.verifWins)
      vw += v;
    if (sw != synthEvents || vw != verifEvents) {
      ++bad;
      which += " " + r.name;
    }
  }
  const std::size_t counted = g_runs.size();

  // Determinism: each instance twice with one seed.
  unsigned pairs = 0, differ = 0;
  auto twice = [&](const std::string &name, const SynthesisInstance &inst) {
    std::string logs[2];
    for (auto &text : logs) {
      SolverConfig cfg = baseConfig(120);
      cfg.deterministic = true;
      cfg.seed = 7;
      text = record(name, inst, cfg).log;
    }
    ++pairs;
    if (logs[0] != logs[1] || logs[0].empty()) {
      ++differ;
      which += " " + name;
    }
  };
  for (const auto &c : corpus) {
    if (c.id != "P1" && c.id != "P9" && c.id != "P16" && c.id != "B28")
      continue;
    auto inst = skolemize(*c.formula);
    inst.width = 8;
    twice("deterministic " + c.id, inst);
  }
  twice("deterministic decrement",
        skolemize(encodeTermination(
            parseLoop(readFile(kData + "/decrement.loop")))));

  return report(9, bad == 0 && differ == 0,
                std::to_string(counted) + " run logs, " + std::to_string(bad) +
                    " with win counters off the decided events; " +
                    std::to_string(pairs) + " deterministic pairs, " +
                    std::to_string(differ) + " differing" + which);
}

} // namespace

int main(int argc, char **argv) {
  // Optional: restrict to a comma-separated list of criteria, e.g. "4,6".
  std::set<int> only;
  if (argc > 1) {
    std::stringstream ss(argv[1]);
    for (std::string s; std::getline(ss, s, ',');)
      only.insert(std::stoi(s));
  }
  auto on = [&](int n) { return only.empty() || only.count(n); };

  const auto corpus = loadCorpus(SOSAT_CORPUS_DIR);
  bool ok = true;
  // Criteria that produce runs go first; AC3, AC8 and AC9 read them all.
  if (on(7))
    ok &= ac7();
  if (on(2))
    ok &= ac2(corpus);
  if (on(4))
    ok &= ac4();
  if (on(5))
    ok &= ac5();
  if (on(6))
    ok &= ac6();
  if (on(1))
    ok &= ac1(corpus);
  if (on(9))
    ok &= ac9(corpus);
  if (on(3))
    ok &= ac3();
  if (on(8))
    ok &= ac8();
  return ok ? 0 : 1;
}
