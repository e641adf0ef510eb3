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

#include "sfm/report.h"

#include <fmt/format.h>

namespace sfm {
namespace {

std::string OneBasedList(const std::vector<Element>& members, char sep) {
  std::string out;
  for (std::size_t k = 0; k < members.size(); ++k) {
    if (k > 0) out += sep;
    out += std::to_string(members[k] + 1);
  }
  return out;
}

}  // namespace

nlohmann::ordered_json ReportToJson(const RunReport& report) {
  nlohmann::ordered_json out;
  std::vector<int> minimizer;
  for (Element e : report.minimizer) minimizer.push_back(e + 1);
  out["algorithm"] = report.algorithm;
  out["minimizer"] = minimizer;
  out["value"] = report.value;
  out["eval_calls"] = report.eval_calls;
  out["subgradient_calls"] = report.subgradient_calls;
  out["iterations"] = report.iterations;
  out["batches"] = report.batches;
  out["seed"] = report.seed;
  out["elapsed_ms"] = report.elapsed_ms;
  return out;
}

std::string ReportCsvHeader() {
  return "algorithm,minimizer,value,eval_calls,subgradient_calls,iterations,"
         "batches,seed,elapsed_ms";
}

std::string ReportCsvRow(const RunReport& report) {
  return fmt::format("{},{},{},{},{},{},{},{},{:.3f}", report.algorithm,
                     OneBasedList(report.minimizer, ' '), report.value,
                     report.eval_calls, report.subgradient_calls,
                     report.iterations, report.batches, report.seed,
                     report.elapsed_ms);
}

std::string LowerBoundCsvHeader() {
  return "n,mean_queries,std,strategy,trials,flagged";
}

std::string LowerBoundCsvRow(const SimulationStats& stats,
                             std::string_view strategy) {
  return fmt::format("{},{:.6f},{:.6f},{},{},{}", stats.n, stats.mean_queries,
                     stats.std_queries, strategy, stats.trials, stats.flagged);
}

}  // namespace sfm
