// Runs the sosat binary and checks exit codes and output streams.
#include <gtest/gtest.h>
#include <json.hpp>

#include <array>
#include <cstdio>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

/// stdout only; stderr goes to `errFile` when given, else is discarded.
Outcome run(const std::string &args, const std::string &errFile = "") {
  const std::string cmd = std::string(SOSAT_CLI) + " " + args + " 2>" +
                          (errFile.empty() ? "/dev/null" : errFile);
  Outcome o;
  FILE *p = popen(cmd.c_str(), "r");
  if (!p)
    return o;
  std::array<char, 4096> buf;
  while (std::size_t n = fread(buf.data(), 1, buf.size(), p))
    o.out.append(buf.data(), n);
  const int st = pclose(p);
  o.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return o;
}

std::string data(const std::string &name) {
  return std::string(SOSAT_TEST_DATA) + "/" + name;
}

nlohmann::json lastRecord(const std::string &out) {
  auto end = out.find_last_not_of('\n');
  auto start = out.rfind('\n', end);
  return nlohmann::json::parse(out.substr(start + 1, end - start));
}

std::string slurp(const std::string &path) {
  std::ifstream in(path);
  return {std::istreambuf_iterator<char>(in), {}};
}

} // namespace

TEST(Cli, SymmetricRelationIsSat) {
  const auto o = run("solve " + data("sym.sos"));
  EXPECT_EQ(o.code, 10);
  EXPECT_NE(o.out.find("S:\nprog 2 1 1"), std::string::npos) << o.out;
  const auto j = lastRecord(o.out);
  EXPECT_EQ(j["verdict"], "SAT");
  EXPECT_TRUE(j["witnesses"].contains("S"));
  EXPECT_TRUE(j["stats"].contains("synth_wins"));
  EXPECT_TRUE(j["stats"]["time"].contains("generalize"));
}

TEST(Cli, BoundedContradictionIsUnsat) {
  EXPECT_EQ(run("solve --max-length 4 " + data("contradiction.sos")).code, 20);
}

TEST(Cli, CapBelowBoundIsUnknown) {
  const auto o = run("solve --max-length 2 " + data("contradiction.sos"));
  EXPECT_EQ(o.code, 30);
  EXPECT_EQ(lastRecord(o.out)["reason"], "cap");
}

TEST(Cli, InputErrorsExitOne) {
  const std::string err = testing::TempDir() + "cli_err.txt";
  const auto o = run("solve " + data("no_such_file.sos"), err);
  EXPECT_EQ(o.code, 1);
  EXPECT_TRUE(o.out.empty());
  EXPECT_NE(slurp(err).find("no_such_file"), std::string::npos);
  EXPECT_EQ(run("solve").code, 1);
  EXPECT_EQ(run("frobnicate").code, 1);
  EXPECT_EQ(run("solve --strategies explicit,magic " + data("sym.sos")).code, 1);
  EXPECT_EQ(run("solve --dual " + data("sym.sos")).code, 1);
}

TEST(Cli, Loops) {
  EXPECT_EQ(run("solve " + data("decrement.loop")).code, 10);
  EXPECT_EQ(run("solve " + data("counter.loop")).code, 10);
  EXPECT_EQ(run("solve --property nontermination " + data("stay.loop")).code, 10);
  EXPECT_EQ(
      run("solve --property nontermination " + data("unsat/exits_at_once.loop"))
          .code,
      20);
}

TEST(Cli, Qbf) {
  EXPECT_EQ(run("solve " + data("forall_exists.qdimacs")).code, 10);
  EXPECT_EQ(run("solve " + data("exists_forall.qdimacs")).code, 20);
  auto d = run("solve --dual " + data("forall_exists.qdimacs"));
  EXPECT_EQ(d.code, 10);
  EXPECT_TRUE(lastRecord(d.out).contains("decided_by"));
  EXPECT_EQ(run("solve --dual " + data("exists_forall.qdimacs")).code, 20);
}

TEST(Cli, EncodeRoundTrips) {
  const std::string f = testing::TempDir() + "decrement.sos";
  const auto e = run("encode " + data("decrement.loop"));
  ASSERT_EQ(e.code, 0);
  std::ofstream(f) << e.out;
  EXPECT_EQ(run("solve " + f).code, 10);
}

TEST(Cli, RunLogWritten) {
  const std::string log = testing::TempDir() + "cli_run.log";
  ASSERT_EQ(run("solve --log " + log + " " + data("sym.sos")).code, 10);
  const auto text = slurp(log);
  EXPECT_NE(text.find("\"event\":\"verdict\""), std::string::npos);
}

TEST(Cli, EmptyBenchFilter) {
  const auto o = run("bench --filter '^nothing$'");
  EXPECT_EQ(o.code, 0);
  const auto j = lastRecord(o.out);
  EXPECT_TRUE(j["cases"].empty());
  EXPECT_EQ(j["summary"]["benchmarks"], 0);
}

TEST(Cli, DeterministicBenchIsByteIdentical) {
  const std::string args = "bench --filter '^P[1-4]$' --deterministic --seed 7";
  const auto a = run(args), b = run(args);
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(lastRecord(a.out)["summary"]["solved"], 4);
}

TEST(Cli, BuiltinBackend) {
  EXPECT_EQ(run("solve --sat-backend builtin --strategies symbolic " +
                data("sym.sos"))
                .code,
            10);
}

TEST(Cli, ExternalBackend) {
  const std::string b = std::string("--sat-backend ") + SOSAT_DIMACS +
                        " --strategies symbolic ";
  EXPECT_EQ(run("solve " + b + data("sym.sos")).code, 10);
  EXPECT_EQ(run("solve " + b + "--max-length 4 " + data("contradiction.sos")).code,
            20);
}

TEST(Cli, InterruptGivesPartialStats) {
  // The identity loop never terminates, so the termination query runs on.
  const std::string cmd = "timeout --preserve-status -s INT 1 " +
                          std::string(SOSAT_CLI) + " solve " +
                          data("stay.loop") + " 2>/dev/null";
  FILE *p = popen(cmd.c_str(), "r");
  ASSERT_NE(p, nullptr);
  std::string out;
  std::array<char, 4096> buf;
  while (std::size_t n = fread(buf.data(), 1, buf.size(), p))
    out.append(buf.data(), n);
  const int st = pclose(p);
  ASSERT_TRUE(WIFEXITED(st));
  EXPECT_EQ(WEXITSTATUS(st), 30);
  const auto j = lastRecord(out);
  EXPECT_EQ(j["reason"], "cancelled");
  EXPECT_GT(j["stats"]["synth_calls"].get<int>(), 0);
}
