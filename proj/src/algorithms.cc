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

#include "sfm/algorithms.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <random>

#include "sfm/lovasz.h"

namespace sfm {
namespace {

using Clock = std::chrono::steady_clock;

double ElapsedMs(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

void Finish(RunReport& report, CountingOracle& oracle,
            std::vector<Element> members, Clock::time_point start) {
  std::sort(members.begin(), members.end());
  report.value = oracle.EvaluateSet(members);
  report.minimizer = std::move(members);
  report.eval_calls = oracle.eval_calls();
  report.subgradient_calls = oracle.subgradient_calls();
  report.elapsed_ms = ElapsedMs(start);
}

int CeilCubeRoot(int n) {
  int t = 1;
  while (static_cast<std::int64_t>(t) * t * t < n) ++t;
  return t;
}

void CheckSparsity(int s) {
  if (s < 0) throw DomainError("sparsity s must be >= 0");
}

RunReport RunExact(const SubmodularInstance& instance, double m, int support,
                   bool capped, const ExactOptions& options,
                   const char* name) {
  const auto start = Clock::now();
  if (!(m >= 0.0) || !std::isfinite(m)) {
    throw DomainError("exact SFM: M must be a finite nonnegative bound");
  }
  OracleGuards guards;
  guards.require_integer = true;
  CountingOracle oracle(instance, guards);
  const int n = oracle.ground_size();
  if (n < 1) throw DomainError("exact SFM: empty ground set");

  const double r = std::max(1, support);
  StepSchedule schedule;
  if (m == 0.0) {
    schedule = {1.0, 1};
  } else {
    auto iterations =
        static_cast<std::int64_t>(std::ceil(20.0 * r * m * m));
    schedule = options.step_rule == ExactStepRule::kTheorem
                   ? TheoremSchedule(r / 2.0, 9.0 * m * m, iterations)
                   : StepSchedule{std::sqrt(r) / (18.0 * m), iterations};
  }

  ExactProvider provider(oracle);
  DescentOptions descent;
  descent.domain = capped ? DomainKind::kSparseCap : DomainKind::kBox;
  descent.cap = support;
  descent.schedule = schedule;
  Rng rng(0);
  DescentResult result = RunDescent(oracle, provider, descent, rng);

  RunReport report;
  report.algorithm = name;
  report.iterations = result.iterations;
  Finish(report, oracle, std::move(result.best.members), start);
  return report;
}

RunReport RunApprox(CountingOracle& oracle, const ApproxPlan& plan,
                    bool capped, int cap, std::uint64_t seed,
                    const char* name) {
  const auto start = Clock::now();
  BatchedSamplingProvider provider(oracle, plan.batch_length);
  DescentOptions descent;
  descent.domain = capped ? DomainKind::kSparseCap : DomainKind::kBox;
  descent.cap = cap;
  descent.schedule = plan.schedule;
  Rng rng(seed);
  DescentResult result = RunDescent(oracle, provider, descent, rng);

  RunReport report;
  report.algorithm = name;
  report.seed = seed;
  report.iterations = result.iterations;
  report.batches = provider.batches();
  Finish(report, oracle, std::move(result.best.members), start);
  return report;
}

void CheckApproxInputs(const SubmodularInstance& instance, double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) {
    throw DomainError("approximate SFM: eps must lie in (0, 1]");
  }
  if (instance.bound() > 1.0 + 1e-12) {
    throw DomainError("approximate SFM: instance must satisfy |f| <= 1 (" +
                      instance.description() + ")");
  }
}

}  // namespace

RunReport ExactSfm(const SubmodularInstance& instance, double m,
                   const ExactOptions& options) {
  return RunExact(instance, m, instance.ground_size(), false, options,
                  "exact");
}

RunReport SparseExactSfm(const SubmodularInstance& instance, double m, int s,
                         const ExactOptions& options) {
  const int n = instance.ground_size();
  CheckSparsity(s);
  // With s >= n the cap never binds and the run is the dense one.
  return RunExact(instance, m, std::min(s, n), s < n, options,
                  "sparse-exact");
}

ApproxPlan MakeApproxPlan(int n, int support, double eps) {
  if (n < 1) throw DomainError("approximate SFM: empty ground set");
  ApproxPlan plan;
  const double log_n = std::max(1.0, std::log2(static_cast<double>(n)));
  const double r = std::max(1, support);
  plan.steps = static_cast<std::int64_t>(
      std::ceil(10.0 * r * log_n * log_n / (eps * eps)));
  plan.batch_length = CeilCubeRoot(n);
  plan.batches = (plan.steps + plan.batch_length - 1) / plan.batch_length;
  double harmonic = 0.0;
  for (int t = 1; t <= plan.batch_length; ++t) harmonic += 1.0 / t;
  const double b_squared = 9.0 * (2.0 + 2.0 * harmonic);
  plan.schedule = TheoremSchedule(r / 2.0, b_squared,
                                  plan.batches * plan.batch_length);
  return plan;
}

RunReport ApproxSfm(const SubmodularInstance& instance, double eps,
                    std::uint64_t seed) {
  CheckApproxInputs(instance, eps);
  CountingOracle oracle(instance);
  const int n = oracle.ground_size();
  return RunApprox(oracle, MakeApproxPlan(n, n, eps), false, n, seed,
                   "approx");
}

RunReport SparseApproxSfm(const SubmodularInstance& instance, double eps,
                          int s, std::uint64_t seed) {
  CheckApproxInputs(instance, eps);
  const int n = instance.ground_size();
  CheckSparsity(s);
  const int support = std::min(s, n);
  CountingOracle oracle(instance);
  return RunApprox(oracle, MakeApproxPlan(n, support, eps), s < n, support,
                   seed, "sparse-approx");
}

RunReport MultiplicativeApprox(const SubmodularInstance& instance,
                               double delta, std::uint64_t seed) {
  const auto start = Clock::now();
  if (!(delta > 0.0 && delta < 1.0)) {
    throw DomainError("multiplicative SFM: delta must lie in (0, 1)");
  }
  OracleGuards guards;
  guards.require_nonpositive = true;
  CountingOracle probe(instance, guards);
  const int n = probe.ground_size();
  if (n < 1) throw DomainError("multiplicative SFM: empty ground set");

  // Every base-polytope vertex g satisfies g(S) <= f(S), so
  // OPT >= sum_i min(g_i, 0).
  std::vector<double> g = FullSubgradient(probe, std::vector<double>(n, 0.0));
  double lower = 0.0;
  for (double gi : g) lower += std::min(gi, 0.0);
  if (lower == 0.0) {
    throw DomainError("multiplicative SFM: f is identically zero (OPT = 0)");
  }
  int top = 0;
  std::frexp(-lower, &top);  // 2^(top-1) <= |lower| < 2^top
  if (std::ldexp(1.0, top - 1) == -lower) --top;

  std::shared_ptr<const SubmodularInstance> inner(
      &instance, [](const SubmodularInstance*) {});
  const ApproxPlan plan = MakeApproxPlan(n, n, delta / 2.0);

  RunReport report;
  report.algorithm = "mult";
  report.seed = seed;
  std::vector<Element> best;
  double best_value = 0.0;
  std::uint64_t evals = probe.eval_calls();
  std::uint64_t subgradients = probe.subgradient_calls();
  constexpr int kMaxLevels = 64;
  for (int level = 0; level < kMaxLevels; ++level) {
    const int j = top - level;
    ScaledInstance scaled(inner, std::ldexp(1.0, -j));
    CountingOracle oracle(scaled, guards);
    const std::uint64_t level_seed = TrialRng(seed, level)();
    RunReport run = RunApprox(oracle, plan, false, n, level_seed, "approx");
    evals += run.eval_calls;
    subgradients += run.subgradient_calls;
    report.iterations += run.iterations;
    report.batches += run.batches;
    const double value = std::ldexp(run.value, j);
    if (value < best_value) {
      best_value = value;
      best = run.minimizer;
    }
    if (best_value <= -std::ldexp(1.0, j - 1)) break;
  }
  report.value = probe.EvaluateSet(best);
  report.minimizer = std::move(best);
  report.eval_calls = evals + 1;
  report.subgradient_calls = subgradients;
  report.elapsed_ms = ElapsedMs(start);
  return report;
}

MincutEdgeSampler::MincutEdgeSampler(const CutInstance& graph)
    : graph_(&graph) {
  for (const WeightedEdge& e : graph.edges()) {
    if (e.weight <= 0.0) continue;
    edges_.push_back(e);
    total_ += e.weight;
    cumulative_.push_back(total_);
  }
}

SparseVector MincutEdgeSampler::Sample(std::span<const double> x,
                                       Rng& rng) const {
  if (edges_.empty()) return {};
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng) *
                   total_;
  const std::size_t k = std::min<std::size_t>(
      std::upper_bound(cumulative_.begin(), cumulative_.end(), u) -
          cumulative_.begin(),
      edges_.size() - 1);
  const WeightedEdge& e = edges_[k];
  auto level = [&](int v) {
    if (v == graph_->source()) return 0.0;
    if (v == graph_->sink()) return 1.0;
    return x[graph_->element_of(v)];
  };
  if (!(level(e.to) > level(e.from))) return {};
  std::vector<SparseEntry> entries;
  if (Element head = graph_->element_of(e.to); head >= 0) {
    entries.push_back({head, total_});
  }
  if (Element tail = graph_->element_of(e.from); tail >= 0) {
    entries.push_back({tail, -total_});
  }
  return SparseVector::FromEntries(std::move(entries));
}

RunReport MincutSgd(const CutInstance& graph, double eps,
                    std::uint64_t seed) {
  const auto start = Clock::now();
  if (!(eps > 0.0)) throw DomainError("mincut SGD: eps must be positive");
  CountingOracle oracle(graph);
  const int n = graph.ground_size();
  RunReport report;
  report.algorithm = "mincut";
  report.seed = seed;

  MincutEdgeSampler sampler(graph);
  if (sampler.empty()) {
    Finish(report, oracle, {}, start);
    return report;
  }
  const double total = sampler.total_weight();
  const auto iterations = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::ceil(2.0 * n / (eps * eps))));
  const StepSchedule schedule =
      TheoremSchedule(n / 2.0, 2.0 * total * total, iterations);

  Rng rng(seed);
  std::vector<double> x(n, 0.0);
  LazyAverager averager(n);
  for (std::int64_t t = 1; t <= iterations; ++t) {
    SparseVector g = sampler.Sample(x, rng);
    if (t < iterations) averager.NextIterate(0.0);
    for (const SparseEntry& entry : g.entries()) {
      double& xi = x[entry.index];
      xi = std::clamp(xi - schedule.eta * entry.value, 0.0, 1.0);
      if (t < iterations) averager.Set(entry.index, xi, false);
    }
  }

  // Threshold rounding: {i : x_i <= v} over the distinct values v, and the
  // empty set.
  std::vector<Element> best;
  double best_value = oracle.EvaluateSet(best);
  for (const std::vector<double>& point : {averager.Mean(), x}) {
    Permutation order = ConsistentPermutation(point);
    std::reverse(order.begin(), order.end());
    std::vector<Element> members;
    for (int k = 0; k < n; ++k) {
      members.push_back(order[k]);
      if (k + 1 < n && point[order[k + 1]] == point[order[k]]) continue;
      double value = oracle.EvaluateSet(members);
      if (value < best_value) {
        best_value = value;
        best = members;
      }
    }
  }
  report.iterations = iterations;
  Finish(report, oracle, std::move(best), start);
  return report;
}

}  // namespace sfm
