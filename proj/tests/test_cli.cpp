// End-to-end tests that drive the installed CLI binary (path injected by the
// build as PERM_CLI_PATH) and check output schemas and exit codes.

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "permanent/exact.hpp"
#include "permanent/matrix.hpp"

namespace {

using nlohmann::json;

struct CliResult {
  int exit_code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  const std::string cmd =
      std::string(PERM_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  EXPECT_NE(pipe, nullptr);
  CliResult result;
  char buf[4096];
  while (std::size_t got = std::fread(buf, 1, sizeof(buf), pipe))
    result.out.append(buf, got);
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string write_temp(const std::string& name, const std::string& content) {
  const std::string path = testing::TempDir() + name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  return path;
}

std::set<std::string> keys_of(const json& j) {
  std::set<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.insert(it.key());
  return keys;
}

TEST(CliCompute, GlynnOnesFiveIsFactorial) {
  const CliResult r = run_cli("compute --method glynn --gen ones:5 --format json");
  ASSERT_EQ(r.exit_code, 0) << r.out;
  const json out = json::parse(r.out);
  EXPECT_EQ(out["method"], "glynn");
  EXPECT_EQ(out["n"], 5);
  EXPECT_NEAR(out["value"].get<double>(), 120.0, 1e-7);
  EXPECT_EQ(keys_of(out),
            (std::set<std::string>{"method", "value", "elapsed_ms", "n"}));
}

TEST(CliCompute, MacmahonFromCsvFile) {
  const std::string path = write_temp("m.csv", "1,2\n3,4");
  const CliResult r =
      run_cli("compute --method macmahon --input " + path + " --format json");
  ASSERT_EQ(r.exit_code, 0) << r.out;
  EXPECT_NEAR(json::parse(r.out)["value"].get<double>(), 10.0, 1e-10);
}

TEST(CliCompute, JsonInputByExtension) {
  const std::string path = write_temp("m.json", "[[1,2],[3,4]]");
  const CliResult r =
      run_cli("compute --method naive --input " + path + " --format json");
  ASSERT_EQ(r.exit_code, 0) << r.out;
  EXPECT_NEAR(json::parse(r.out)["value"].get<double>(), 10.0, 1e-12);
}

TEST(CliCompute, NaiveIdentityTable) {
  const CliResult r = run_cli("compute --method naive --gen identity:3");
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("method"), std::string::npos);
  EXPECT_NE(r.out.find("naive"), std::string::npos);
  EXPECT_NE(r.out.find("1"), std::string::npos);
}

TEST(CliCompute, AllMethodsAgreeOnSmallMatrix) {
  for (const char* method :
       {"naive", "glynn", "macmahon", "delta-oracle", "spin-fd"}) {
    const CliResult r = run_cli(std::string("compute --method ") + method +
                                " --gen uniform:4 --seed 5 --format json");
    ASSERT_EQ(r.exit_code, 0) << method;
    const double value = json::parse(r.out)["value"].get<double>();
    const double naive = permanent::perm_naive(
        permanent::generate({permanent::GeneratorKind::uniform_random, 4, 5}));
    const double tol = std::string(method) == "spin-fd"
                           ? 1e-2 * std::max(1.0, std::abs(naive))
                           : 1e-8 * std::max(1.0, std::abs(naive));
    EXPECT_NEAR(value, naive, tol) << method;
  }
}

TEST(CliEstimate, TwoSampleDegenerateCase) {
  const CliResult r = run_cli(
      "estimate --dist rademacher --samples 2 --seed 1 --gen identity:1 "
      "--format json");
  ASSERT_EQ(r.exit_code, 0);
  const json out = json::parse(r.out);
  EXPECT_EQ(out["estimate"].get<double>(), 1.0);
  EXPECT_EQ(out["stderr"].get<double>(), 0.0);
  EXPECT_EQ(out["samples"], 2);
  EXPECT_EQ(out["seed"], 1);
  EXPECT_EQ(keys_of(out),
            (std::set<std::string>{"method", "estimate", "stderr", "ci95_low",
                                   "ci95_high", "samples", "seed",
                                   "elapsed_ms", "n"}));
}

TEST(CliEstimate, DeterministicValueFields) {
  const std::string args =
      "estimate --dist gaussian --samples 20000 --seed 42 --gen ones:4 "
      "--format json";
  json a = json::parse(run_cli(args).out);
  json b = json::parse(run_cli(args).out);
  a.erase("elapsed_ms");
  b.erase("elapsed_ms");
  EXPECT_EQ(a.dump(), b.dump());
}

TEST(CliEstimate, CoversTruthAtFourSigma) {
  const CliResult r = run_cli(
      "estimate --dist sine --samples 200000 --seed 3 --gen ones:3 "
      "--format json");
  ASSERT_EQ(r.exit_code, 0);
  const json out = json::parse(r.out);
  EXPECT_LE(std::abs(out["estimate"].get<double>() - 6.0),
            4.0 * out["stderr"].get<double>());
}

TEST(CliVerify, AllIdentitiesPassOnExamples) {
  for (const char* args : {"verify --gen uniform:6 --seed 9 --samples 20000",
                           "verify --gen identity:4 --samples 20000",
                           "verify --gen ones:3 --samples 20000"}) {
    const CliResult r = run_cli(args);
    EXPECT_EQ(r.exit_code, 0) << args << "\n" << r.out;
    EXPECT_NE(r.out.find("PASS"), std::string::npos);
    EXPECT_EQ(r.out.find("FAIL"), std::string::npos) << r.out;
  }
}

TEST(CliVerify, JsonReportShape) {
  const CliResult r = run_cli(
      "verify --gen uniform:5 --seed 4 --samples 20000 --format json");
  ASSERT_EQ(r.exit_code, 0);
  const json out = json::parse(r.out);
  EXPECT_TRUE(out["all_pass"].get<bool>());
  EXPECT_GE(out["identities"].size(), 6u);
  for (const auto& identity : out["identities"]) {
    EXPECT_TRUE(identity["pass"].get<bool>());
    EXPECT_FALSE(identity["name"].get<std::string>().empty());
  }
}

TEST(CliVerify, HermeticReportText) {
  const std::string args = "verify --gen uniform:5 --seed 12 --samples 20000";
  EXPECT_EQ(run_cli(args).out, run_cli(args).out);
}

TEST(CliBench, SingleRowMatchesNaive) {
  const CliResult r = run_cli(
      "bench --method glynn --n-range 5:5 --seed 0 --format json");
  ASSERT_EQ(r.exit_code, 0);
  const json out = json::parse(r.out);
  ASSERT_EQ(out["rows"].size(), 1u);
  EXPECT_TRUE(out["ratios"].empty());
  const double naive = permanent::perm_naive(
      permanent::generate({permanent::GeneratorKind::uniform_random, 5, 0}));
  EXPECT_NEAR(out["rows"][0]["value"].get<double>(), naive, 1e-9);
}

TEST(CliBench, NaiveScalesFactorially) {
  // t(n+1)/t(n) tracks n+1 for the factorial algorithm; wide window so
  // scheduler noise on the sub-millisecond points cannot flake the test
  const CliResult r = run_cli(
      "bench --method naive --n-range 8:11 --seed 3 --format json");
  ASSERT_EQ(r.exit_code, 0);
  const json out = json::parse(r.out);
  ASSERT_EQ(out["ratios"].size(), 3u);
  for (const auto& ratio : out["ratios"]) {
    EXPECT_GE(ratio.get<double>(), 6.0);
    EXPECT_LE(ratio.get<double>(), 16.0);
  }
}

TEST(CliExitCodes, InputErrorsAreTwo) {
  EXPECT_EQ(run_cli("compute --gen ones:5 --input also.csv").exit_code, 2);
  EXPECT_EQ(run_cli("compute --method glynn").exit_code, 2);
  EXPECT_EQ(run_cli("compute --input /does/not/exist.csv").exit_code, 2);
  EXPECT_EQ(run_cli("compute --gen nope:4").exit_code, 2);
  EXPECT_EQ(run_cli("compute --gen ones").exit_code, 2);
  EXPECT_EQ(run_cli("compute --method wat --gen ones:3").exit_code, 2);
  EXPECT_EQ(run_cli("estimate --dist wat --gen ones:3").exit_code, 2);
  EXPECT_EQ(run_cli("estimate --samples 1 --gen ones:3").exit_code, 2);
  EXPECT_EQ(run_cli("bench --method glynn --n-range 5").exit_code, 2);
  const std::string ragged = write_temp("ragged.csv", "1,2\n3");
  EXPECT_EQ(run_cli("compute --input " + ragged).exit_code, 2);
}

TEST(CliExitCodes, NumericDomainErrorsAreThree) {
  // the spin identity inside verify overflows for a huge 1x1 coupling
  const std::string path = write_temp("big.csv", "2000");
  EXPECT_EQ(run_cli("verify --input " + path + " --samples 100").exit_code, 3);
}

TEST(CliExitCodes, GuardViolationsAreFour) {
  EXPECT_EQ(run_cli("compute --method naive --gen ones:13").exit_code, 4);
  EXPECT_EQ(run_cli("compute --method glynn --gen ones:31").exit_code, 4);
  EXPECT_EQ(run_cli("compute --method macmahon --gen ones:17").exit_code, 4);
  EXPECT_EQ(run_cli("verify --gen ones:11").exit_code, 4);
}

}  // namespace
