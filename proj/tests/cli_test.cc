// Copyright 2026 The SFM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Runs the sfm binary end to end.

#include <sys/wait.h>

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include <json.hpp>

#include "sfm/algorithms.h"
#include "sfm/instance_io.h"

namespace sfm {
namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string Slurp(const std::string& path) {
  std::ifstream in(path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

CliResult RunCli(const std::string& args) {
  const std::string dir = ::testing::TempDir();
  const std::string out = dir + "/sfm_cli_out.txt";
  const std::string err = dir + "/sfm_cli_err.txt";
  const std::string command = std::string(SFM_CLI_PATH) + " " + args + " >" +
                              out + " 2>" + err;
  const int status = std::system(command.c_str());
  CliResult result;
  result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = Slurp(out);
  result.err = Slurp(err);
  return result;
}

std::string Data(const std::string& name) {
  return std::string(SFM_TESTDATA_DIR) + "/" + name;
}

nlohmann::json WithoutElapsed(nlohmann::json j) {
  if (j.is_array()) {
    for (auto& item : j) item.erase("elapsed_ms");
  } else {
    j.erase("elapsed_ms");
  }
  return j;
}

TEST(CliTest, ExactJsonReport) {
  CliResult r = RunCli(
      "run --alg exact --gen cut:n=16,density=0.1,wmax=2 --M 4 --seed 1 "
      "--out json");
  ASSERT_EQ(r.code, 0) << r.err;
  nlohmann::json j = nlohmann::json::parse(r.out);
  for (const char* key :
       {"minimizer", "value", "eval_calls", "iterations", "seed",
        "elapsed_ms"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["seed"], 1);
  EXPECT_EQ(j["iterations"], 20 * 16 * 4 * 4);

  // Cross-check against an in-process run on the same generated instance.
  LoadedInstance loaded = GenerateInstance("cut:n=16,density=0.1,wmax=2", 1);
  RunReport direct = ExactSfm(*loaded.instance, 4.0);
  EXPECT_EQ(j["eval_calls"].get<std::uint64_t>(), direct.eval_calls);
  EXPECT_EQ(j["value"].get<double>(), direct.value);
  std::vector<int> one_based;
  for (Element e : direct.minimizer) one_based.push_back(e + 1);
  EXPECT_EQ(j["minimizer"].get<std::vector<int>>(), one_based);
}

TEST(CliTest, SameConfigSameOutput) {
  const std::string args =
      "run --alg approx --gen cut:n=12,density=0.3,wmax=3 --eps 0.5 "
      "--seed 5";
  CliResult a = RunCli(args);
  CliResult b = RunCli(args);
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(WithoutElapsed(nlohmann::json::parse(a.out)),
            WithoutElapsed(nlohmann::json::parse(b.out)));
}

TEST(CliTest, TrialsAreOrderedBySeed) {
  CliResult r = RunCli(
      "run --alg approx --instance " + Data("table4.txt") +
      " --eps 0.5 --seed 10 --trials 4");
  ASSERT_EQ(r.code, 0) << r.err;
  nlohmann::json j = nlohmann::json::parse(r.out);
  ASSERT_TRUE(j.is_array());
  ASSERT_EQ(j.size(), 4u);
  for (int k = 0; k < 4; ++k) EXPECT_EQ(j[k]["seed"], 10 + k);
}

TEST(CliTest, VerifyReportsSubmodularityAndMinimum) {
  CliResult r = RunCli("run --alg verify --instance " + Data("table4.txt"));
  ASSERT_EQ(r.code, 0) << r.err;
  nlohmann::json j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["submodular"], true);
  EXPECT_EQ(j["value"], -2.0);
  EXPECT_EQ(j["minimizer"], (std::vector<int>{1, 2, 4}));

  CliResult bad =
      RunCli("run --alg verify --instance " + Data("not_submodular.txt"));
  ASSERT_EQ(bad.code, 0) << bad.err;
  nlohmann::json k = nlohmann::json::parse(bad.out);
  EXPECT_EQ(k["submodular"], false);
  EXPECT_TRUE(k.contains("witness"));
}

TEST(CliTest, LowerBoundCsv) {
  CliResult r = RunCli(
      "run --alg lowerbound --gen lb:n=64 --trials 2000 --seed 3 --out csv");
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header.rfind("n,mean_queries,std", 0), 0u);
  int rows = 0;
  for (std::string line; std::getline(lines, line);) {
    EXPECT_EQ(line.rfind("64,", 0), 0u) << line;
    ++rows;
  }
  EXPECT_EQ(rows, 3);
}

TEST(CliTest, CsvReport) {
  CliResult r = RunCli("run --alg mincut --instance " + Data("cut5.txt") +
                       " --eps 0.2 --out csv");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("algorithm,minimizer,value", 0), 0u);
  EXPECT_NE(r.out.find("\nmincut,"), std::string::npos);
}

TEST(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(RunCli("run --alg exact --gen cut:n=5").code, 2);
  EXPECT_EQ(RunCli("run --alg approx --gen cut:n=5").code, 2);
  EXPECT_EQ(RunCli("run --alg sparse-exact --gen cut:n=5 --M 3").code, 2);
  EXPECT_EQ(RunCli("run --alg magic --gen cut:n=5").code, 2);
  EXPECT_EQ(RunCli("run --alg exact --M 3").code, 2);
  EXPECT_EQ(RunCli("run --alg exact --M 3 --gen cut:n=5,colour=red").code, 2);
  EXPECT_EQ(RunCli("run --alg approx --eps 2 --gen cut:n=5").code, 2);
  EXPECT_EQ(RunCli("run --alg exact --M 3 --gen cut:n=5 --out xml").code, 2);
  EXPECT_EQ(RunCli("").code, 2);
  EXPECT_EQ(RunCli("run --help").code, 0);
}

TEST(CliTest, ContractViolationsExitOne) {
  CliResult bad_file =
      RunCli("run --alg exact --M 3 --instance " + Data("bad_cut.txt"));
  EXPECT_EQ(bad_file.code, 1);
  EXPECT_NE(bad_file.err.find("bad_cut.txt:3:"), std::string::npos)
      << bad_file.err;
  EXPECT_EQ(RunCli("run --alg exact --M 3 --instance /nonexistent").code, 1);

  const std::string dir = ::testing::TempDir();
  std::ofstream(dir + "/half.txt") << "table 1\n0 0\n1 0.5\n";
  CliResult fractional =
      RunCli("run --alg exact --M 1 --instance " + dir + "/half.txt");
  EXPECT_EQ(fractional.code, 1);
  EXPECT_EQ(RunCli("run --alg mincut --eps 0.1 --instance " +
                   Data("table4.txt"))
                .code,
            1);
}

}  // namespace
}  // namespace sfm
