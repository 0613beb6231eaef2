// Copyright 2026 The OptiVote Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "optivote/cli.hpp"

namespace optivote {
namespace {

namespace fs = std::filesystem;

struct CliResult {
  int code;
  std::string out, err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "optivote");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           (std::string("optivote_cli_") + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string write_config(const std::string& text) {
    const fs::path p = dir_ / "c.json";
    std::ofstream(p) << text;
    return p.string();
  }
  fs::path dir_;
};

TEST_F(CliTest, TheoryErrorBound) {
  const CliResult r = cli({"theory", "--op", "error_bound", "--M", "10", "--xi", "1", "--q", "0.2"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out), nlohmann::json::parse(R"({"error_bound": 0.25})"));
}

TEST_F(CliTest, TheoryConvergenceAndUnknownOp) {
  const CliResult r = cli({"theory", "--op", "convergence_bound", "--N", "400", "--gamma", "4",
                           "--L1", "10", "--gap", "5", "--alpha-l1", "2", "--xi", "1", "--M", "20"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(nlohmann::json::parse(r.out).at("convergence_bound").get<double>(), 0.797300, 1e-6);
  EXPECT_EQ(cli({"theory", "--op", "nope"}).code, 1);
}

TEST_F(CliTest, SimulateWritesOutputs) {
  const auto cfg = write_config(R"({"run": {"scheme": "optivote", "seed": 2, "rounds": 5}})");
  const CliResult r = cli({"simulate", "--config", cfg, "--output.directory", dir_.string(),
                           "--output.dump_power", "true", "--output.dump_slots", "true"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"metrics.csv", "summary.json", "resolved_config.json", "power.csv", "slots.csv"})
    EXPECT_TRUE(fs::exists(dir_ / f)) << f;
  const auto resolved = nlohmann::json::parse(slurp(dir_ / "resolved_config.json"));
  EXPECT_EQ(resolved.at("run").at("seed"), 2);
  EXPECT_EQ(resolved.at("run").at("M"), 20);
  const auto summary = nlohmann::json::parse(slurp(dir_ / "summary.json"));
  EXPECT_EQ(summary.at("rounds").size(), 5u);
}

TEST_F(CliTest, ResolvedConfigReruns) {
  const auto cfg = write_config(R"({"run": {"rounds": 4, "seed": 5}})");
  ASSERT_EQ(cli({"simulate", "-c", cfg, "--output.directory", (dir_ / "a").string()}).code, 0);
  const auto resolved = (dir_ / "a" / "resolved_config.json").string();
  ASSERT_EQ(cli({"simulate", "-c", resolved, "--output.directory", (dir_ / "b").string()}).code, 0);
  EXPECT_EQ(slurp(dir_ / "a" / "metrics.csv"), slurp(dir_ / "b" / "metrics.csv"));
}

TEST_F(CliTest, ThreadCountDoesNotChangeMetrics) {
  const auto cfg = write_config(R"({"run": {"rounds": 30}})");
  ASSERT_EQ(cli({"--threads", "1", "simulate", "-c", cfg, "--output.directory", (dir_ / "t1").string()}).code, 0);
  ASSERT_EQ(cli({"simulate", "-c", cfg, "--threads", "4", "--output.directory", (dir_ / "t4").string()}).code, 0);
  EXPECT_EQ(slurp(dir_ / "t1" / "metrics.csv"), slurp(dir_ / "t4" / "metrics.csv"));
}

TEST_F(CliTest, SeedOverridesFlagAndEnvironment) {
  ASSERT_EQ(cli({"simulate", "--run.seed", "7", "--run.rounds=2", "--output.directory", dir_.string()}).code, 0);
  EXPECT_EQ(nlohmann::json::parse(slurp(dir_ / "summary.json")).at("seed"), 7);
  ::setenv("OPTIVOTE_SEED", "11", 1);
  const CliResult r = cli({"simulate", "--run.rounds", "2", "--output.directory", dir_.string()});
  ::unsetenv("OPTIVOTE_SEED");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(slurp(dir_ / "summary.json")).at("seed"), 11);
}

TEST_F(CliTest, ConfigErrorsExitOne) {
  const auto cfg = write_config(R"({"power": {"p_min": 3.0, "p_max": 2.0}})");
  const CliResult r = cli({"simulate", "-c", cfg});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("power.p_min"), std::string::npos);
  EXPECT_EQ(cli({"simulate", "-c", (dir_ / "missing.json").string()}).code, 1);
  EXPECT_EQ(cli({"simulate", "--run.bogus", "1"}).code, 1);
  EXPECT_EQ(cli({"frobnicate"}).code, 1);
  EXPECT_EQ(cli({}).code, 1);
}

TEST_F(CliTest, DivergenceExitsThree) {
  const CliResult r = cli({"simulate", "--run.scheme", "fedavg_air", "--run.eta", "1e305",
                           "--run.rounds", "5", "--output.directory", dir_.string()});
  EXPECT_EQ(r.code, 3) << r.err;
}

TEST_F(CliTest, VerifyWritesReport) {
  const auto report = (dir_ / "report.json").string();
  const CliResult r = cli({"verify", "--samples", "10000", "--out", report});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  const auto j = nlohmann::json::parse(slurp(report));
  EXPECT_TRUE(j.at("all_pass").get<bool>());
  EXPECT_GE(j.at("checks").size(), 86u);
}

TEST_F(CliTest, SweepEmitsOneRowPerPoint) {
  const CliResult r = cli({"sweep", "--key", "channel.sigma_n2", "--values", "0.01,1",
                           "--schemes", "optivote,ideal_mv", "--run.rounds", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 5);
  EXPECT_EQ(r.out.rfind("key,value,scheme,", 0), 0u);
}

TEST_F(CliTest, PartitionInspect) {
  const CliResult r = cli({"partition-inspect", "--learner.partition.mode", "noniid", "--run.M", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("node_id,samples,label_0", 0), 0u);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    int nonzero = 0;
    std::istringstream cells(line);
    std::string cell;
    for (int k = 0; std::getline(cells, cell, ','); ++k)
      if (k >= 2 && cell != "0") ++nonzero;
    EXPECT_LE(nonzero, 2);
  }
  EXPECT_EQ(rows, 10);
}

}  // namespace
}  // namespace optivote
