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

// Command-line harness: `sfm run --alg <name> ...`.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "sfm/algorithms.h"
#include "sfm/instance_io.h"
#include "sfm/lowerbound.h"
#include "sfm/oracle.h"
#include "sfm/report.h"
#include "sfm/types.h"
#include "sfm/verify.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitContract = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string algorithm;
  std::string instance_path;
  std::string generator;
  std::optional<double> eps;
  std::optional<std::int64_t> m;
  std::optional<int> s;
  double delta = 0.5;
  std::uint64_t seed = 0;
  std::int64_t trials = 1;
  std::string out = "json";
  std::string strategy = "all";
};

void ConfigureLogging() {
  auto logger = spdlog::stderr_logger_mt("sfm");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("SFM_LOG")) {
    spdlog::set_level(spdlog::level::from_str(level));
  }
}

sfm::LoadedInstance LoadInstance(const RunConfig& config) {
  if (!config.instance_path.empty()) {
    return sfm::LoadInstanceFile(config.instance_path);
  }
  try {
    return sfm::GenerateInstance(config.generator, config.seed);
  } catch (const sfm::ParseError& e) {
    throw UsageError(e.what());
  }
}

void Require(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

void ValidateConfig(const RunConfig& config) {
  const std::string& alg = config.algorithm;
  Require(config.instance_path.empty() != config.generator.empty(),
          "exactly one of --instance and --gen is required");
  Require(config.trials >= 1, "--trials must be >= 1");
  if (alg == "exact" || alg == "sparse-exact") {
    Require(config.m.has_value(), "--alg " + alg + " needs --M");
    Require(*config.m >= 0, "--M must be >= 0");
  }
  if (alg == "approx" || alg == "sparse-approx" || alg == "mincut") {
    Require(config.eps.has_value(), "--alg " + alg + " needs --eps");
  }
  if (alg == "approx" || alg == "sparse-approx") {
    Require(*config.eps > 0.0 && *config.eps <= 1.0,
            "--eps must lie in (0, 1]");
  }
  if (alg == "mincut") Require(*config.eps > 0.0, "--eps must be positive");
  if (alg == "sparse-exact" || alg == "sparse-approx") {
    Require(config.s.has_value(), "--alg " + alg + " needs --s");
    Require(*config.s >= 0, "--s must be >= 0");
  }
  if (alg == "mult") {
    Require(config.delta > 0.0 && config.delta < 1.0,
            "--delta must lie in (0, 1)");
  }
}

// The additive algorithms expect |f| <= 1; larger instances are run on
// f / M and the reported value is f itself.
std::shared_ptr<const sfm::SubmodularInstance> UnitScaled(
    const std::shared_ptr<const sfm::SubmodularInstance>& instance) {
  double bound = instance->bound();
  if (bound <= 1.0) return instance;
  spdlog::info("scaling instance by 1/{} for the additive algorithm", bound);
  return std::make_shared<sfm::ScaledInstance>(instance, 1.0 / bound);
}

sfm::RunReport RunOnce(const RunConfig& config,
                       const sfm::LoadedInstance& loaded, std::uint64_t seed) {
  const std::string& alg = config.algorithm;
  const sfm::SubmodularInstance& f = *loaded.instance;
  if (alg == "exact") return sfm::ExactSfm(f, static_cast<double>(*config.m));
  if (alg == "sparse-exact") {
    return sfm::SparseExactSfm(f, static_cast<double>(*config.m), *config.s);
  }
  if (alg == "mult") return sfm::MultiplicativeApprox(f, config.delta, seed);
  if (alg == "mincut") {
    if (!loaded.cut) {
      throw sfm::ContractViolation("--alg mincut needs a cut instance");
    }
    return sfm::MincutSgd(*loaded.cut, *config.eps, seed);
  }
  auto scaled = UnitScaled(loaded.instance);
  sfm::RunReport report =
      alg == "approx"
          ? sfm::ApproxSfm(*scaled, *config.eps, seed)
          : sfm::SparseApproxSfm(*scaled, *config.eps, *config.s, seed);
  if (scaled != loaded.instance) {
    sfm::CountingOracle original(f);
    report.value = original.EvaluateSet(report.minimizer);
  }
  return report;
}

int RunAlgorithm(const RunConfig& config, const sfm::LoadedInstance& loaded) {
  std::vector<sfm::RunReport> reports(config.trials);
  std::vector<std::exception_ptr> errors(config.trials);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t k = 0; k < config.trials; ++k) {
    try {
      reports[k] = RunOnce(config, loaded, config.seed + k);
      reports[k].seed = config.seed + k;
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }
  if (config.out == "csv") {
    std::cout << sfm::ReportCsvHeader() << '\n';
    for (const auto& report : reports) {
      std::cout << sfm::ReportCsvRow(report) << '\n';
    }
  } else if (config.trials == 1) {
    std::cout << sfm::ReportToJson(reports[0]).dump(2) << '\n';
  } else {
    auto out = nlohmann::ordered_json::array();
    for (const auto& report : reports) out.push_back(sfm::ReportToJson(report));
    std::cout << out.dump(2) << '\n';
  }
  return kExitOk;
}

std::vector<int> OneBased(const std::vector<sfm::Element>& members) {
  std::vector<int> out;
  for (sfm::Element e : members) out.push_back(e + 1);
  return out;
}

int RunVerify(const RunConfig& config, const sfm::LoadedInstance& loaded) {
  const sfm::SubmodularInstance& f = *loaded.instance;
  int n = f.ground_size();
  if (n > sfm::kMaxBruteForceSize) {
    throw sfm::ContractViolation("verify: n = " + std::to_string(n) +
                                 " exceeds the brute-force limit");
  }
  std::optional<sfm::SubmodularityReport> check;
  if (n <= sfm::kMaxSubmodularCheckSize) {
    check = sfm::CheckSubmodularParallel(f);
  } else {
    spdlog::warn("verify: n = {} too large for the submodularity check", n);
  }
  sfm::BruteForceResult best = sfm::BruteForceMinParallel(f);
  if (config.out == "csv") {
    std::string status = check ? (check->submodular ? "pass" : "fail")
                               : "skipped";
    std::string members;
    for (int e : OneBased(best.minimizer)) {
      if (!members.empty()) members += ' ';
      members += std::to_string(e);
    }
    std::cout << "n,submodular,minimizer,value\n"
              << n << ',' << status << ',' << members << ',' << best.value
              << '\n';
    return kExitOk;
  }
  nlohmann::ordered_json out;
  out["algorithm"] = "verify";
  out["n"] = n;
  if (check) {
    out["submodular"] = check->submodular;
    if (check->witness) {
      out["witness"] = {{"s", OneBased(check->witness->s)},
                        {"t", OneBased(check->witness->t)},
                        {"i", check->witness->i + 1}};
    }
  } else {
    out["submodular"] = nullptr;
  }
  out["minimizer"] = OneBased(best.minimizer);
  out["value"] = best.value;
  std::cout << out.dump(2) << '\n';
  return kExitOk;
}

int RunLowerBound(const RunConfig& config, const sfm::LoadedInstance& loaded) {
  int n = loaded.instance->ground_size();
  std::vector<sfm::StrategyKind> kinds;
  if (config.strategy == "all") {
    kinds.assign(std::begin(sfm::kAllStrategies),
                 std::end(sfm::kAllStrategies));
  } else {
    auto kind = sfm::ParseStrategy(config.strategy);
    Require(kind.has_value(), "unknown strategy '" + config.strategy + "'");
    kinds.push_back(*kind);
  }
  std::vector<std::pair<sfm::StrategyKind, sfm::SimulationStats>> rows;
  for (sfm::StrategyKind kind : kinds) {
    rows.emplace_back(kind, sfm::SimulateRecognizerParallel(
                                sfm::MakeStrategy(kind), n, config.seed,
                                config.trials));
  }
  if (config.out == "csv") {
    std::cout << sfm::LowerBoundCsvHeader() << '\n';
    for (const auto& [kind, stats] : rows) {
      std::cout << sfm::LowerBoundCsvRow(stats, sfm::StrategyName(kind))
                << '\n';
    }
    return kExitOk;
  }
  auto out = nlohmann::ordered_json::array();
  for (const auto& [kind, stats] : rows) {
    out.push_back({{"n", stats.n},
                   {"mean_queries", stats.mean_queries},
                   {"std", stats.std_queries},
                   {"strategy", sfm::StrategyName(kind)},
                   {"trials", stats.trials},
                   {"flagged", stats.flagged},
                   {"seed", config.seed}});
  }
  std::cout << out.dump(2) << '\n';
  return kExitOk;
}

int Dispatch(const RunConfig& config) {
  ValidateConfig(config);
  sfm::LoadedInstance loaded = LoadInstance(config);
  spdlog::info("instance: {}", loaded.instance->description());
  if (config.algorithm == "verify") return RunVerify(config, loaded);
  if (config.algorithm == "lowerbound") return RunLowerBound(config, loaded);
  return RunAlgorithm(config, loaded);
}

}  // namespace

int main(int argc, char** argv) {
  ConfigureLogging();
  CLI::App app{"Submodular function minimization toolkit"};
  app.require_subcommand(1);
  RunConfig config;
  CLI::App* run = app.add_subcommand("run", "Run one algorithm on an instance");
  run->add_option("--alg", config.algorithm, "Algorithm")
      ->required()
      ->check(CLI::IsMember({"exact", "approx", "sparse-exact",
                             "sparse-approx", "mult", "mincut", "lowerbound",
                             "verify"}));
  run->add_option("--instance", config.instance_path,
                  "Instance file (cut, table or lb format)");
  run->add_option("--gen", config.generator,
                  "Generator spec, e.g. cut:n=64,density=0.1,wmax=4 or "
                  "lb:n=64");
  run->add_option("--eps", config.eps,
                  "Additive accuracy; relative to M = max|f| for approx and "
                  "to the total edge weight W for mincut");
  run->add_option("--M", config.m, "Integer bound on |f| (exact modes)");
  run->add_option("--s", config.s, "Sparsity cap (sparse modes)");
  run->add_option("--delta", config.delta,
                  "Multiplicative accuracy for mult")
      ->capture_default_str();
  run->add_option("--seed", config.seed, "Random seed")->capture_default_str();
  run->add_option("--trials", config.trials,
                  "Seeds seed..seed+k-1 for algorithms; Monte-Carlo trials "
                  "for lowerbound")
      ->capture_default_str();
  run->add_option("--out", config.out, "Output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  run->add_option("--strategy", config.strategy,
                  "Recognizer strategy for lowerbound: index, reverse, "
                  "shuffle or all")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    return Dispatch(config);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const sfm::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitContract;
  } catch (const sfm::ContractViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitContract;
  } catch (const sfm::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitContract;
  }
}
