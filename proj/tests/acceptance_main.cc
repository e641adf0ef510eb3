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

// Acceptance runner: one PASS/FAIL line per criterion. Exit status is zero
// only when every criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "sfm/algorithms.h"
#include "sfm/descent.h"
#include "sfm/lovasz.h"
#include "sfm/lowerbound.h"
#include "sfm/oracle.h"
#include "sfm/order_tree.h"
#include "sfm/verify.h"
#include "test_util.h"

namespace sfm {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Format(const char* fmt, auto... args) {
  char buffer[512];
  std::snprintf(buffer, sizeof(buffer), fmt, args...);
  return buffer;
}

std::vector<double> GridPoint(int n, int grid, Rng& rng) {
  std::uniform_int_distribution<int> level(0, grid);
  std::vector<double> x(n);
  for (double& v : x) v = level(rng) / static_cast<double>(grid);
  return x;
}

// Edit of up to k coordinates to fresh grid points; `sign` > 0 keeps only
// increases, < 0 only decreases, 0 both.
SparseVector GridEdit(std::span<const double> x, int k, int grid, int sign,
                      Rng& rng) {
  const int n = static_cast<int>(x.size());
  std::uniform_int_distribution<int> coord(0, n - 1);
  std::uniform_int_distribution<int> level(0, grid);
  std::vector<SparseEntry> entries;
  std::vector<char> used(n, 0);
  for (int j = 0; j < k; ++j) {
    Element i = coord(rng);
    if (used[i]) continue;
    used[i] = 1;
    const double delta = level(rng) / static_cast<double>(grid) - x[i];
    if (sign == 0 || (delta > 0) == (sign > 0)) entries.push_back({i, delta});
  }
  return SparseVector::FromEntries(std::move(entries));
}

// Directed graph with uniform real weights in (0, 1].
CutInstance RealCutInstance(int n, double density, Rng& rng) {
  std::bernoulli_distribution keep(density);
  std::uniform_real_distribution<double> weight(0.0, 1.0);
  std::vector<WeightedEdge> edges;
  const int s = n;
  const int t = n + 1;
  for (int u = 0; u < n + 2; ++u) {
    for (int v = 0; v < n + 2; ++v) {
      if (u == v || u == t || v == s || !keep(rng)) continue;
      edges.push_back({u, v, 1.0 - weight(rng)});
    }
  }
  return CutInstance(n + 2, s, t, std::move(edges));
}

// Random cut divided by max |f|. For n <= 20 the result is tabulated so its
// certified bound is exactly 1; beyond that the total weight is used.
std::shared_ptr<const SubmodularInstance> UnitScaledCut(int n, double density,
                                                        int wmax,
                                                        std::uint64_t seed) {
  auto cut = std::make_shared<CutInstance>(
      RandomCutInstance(n, density, wmax, seed));
  if (n > 20) return std::make_shared<ScaledInstance>(cut, 1.0 / cut->bound());
  std::vector<double> table = testing::NormalizedTable(*cut);
  const double m = testing::TableBound(table);
  if (m > 0.0) {
    for (double& v : table) v /= m;
  }
  return std::make_shared<TableInstance>(n, std::move(table));
}

// ---------------------------------------------------------------------------

Outcome Exactness() {
  int agree = 0;
  int total = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const int n = 4 + static_cast<int>(seed % 11);
    const int weight = 1 + static_cast<int>(seed % 8);
    CutInstance cut = RandomBudgetCutInstance(n, weight, 3, 1000 + seed);
    const double m = cut.bound();
    RunReport report = ExactSfm(cut, m);
    BruteForceResult truth = BruteForceMin(cut);
    ++total;
    agree += report.value == truth.value;
  }
  Rng rng(2024);
  for (int run = 0; run < 100; ++run) {
    const int n = 2 + run % 9;
    TableInstance table = testing::RandomIntegerTable(n, 8, rng);
    RunReport report = ExactSfm(table, table.bound());
    BruteForceResult truth = BruteForceMin(table);
    ++total;
    agree += report.value == truth.value;
  }
  return {agree == total, Format("%d/%d instances agree", agree, total)};
}

Outcome OracleEquivalence() {
  Rng rng(7);
  int mismatches = 0;
  double worst_real = 0.0;
  for (int run = 0; run < 100; ++run) {
    const int n = 8 + static_cast<int>(rng() % 57);
    const bool integer = run % 2 == 0;
    std::unique_ptr<CutInstance> cut;
    if (integer) {
      cut = std::make_unique<CutInstance>(
          RandomCutInstance(n, 4.0 / n, 4, rng()));
    } else {
      cut = std::make_unique<CutInstance>(RealCutInstance(n, 4.0 / n, rng));
    }
    CountingOracle oracle(*cut);
    OrderTree tree(oracle, GridPoint(n, 8, rng));
    for (int step = 0; step < 50; ++step) {
      tree.ApplyUpdateExact(GridEdit(tree.keys(), 4, 8, 0, rng));
      CountingOracle fresh(*cut);
      const std::vector<double> truth = FullSubgradient(fresh, tree.keys());
      for (int i = 0; i < n; ++i) {
        const double gap = std::abs(tree.gradient(i) - truth[i]);
        if (integer) {
          mismatches += gap != 0.0;
        } else {
          worst_real = std::max(worst_real, gap);
          mismatches += gap > 1e-9;
        }
      }
    }
  }
  return {mismatches == 0,
          Format("5000 updates, %d mismatching entries, worst real gap %.2e",
                 mismatches, worst_real)};
}

struct Family {
  const char* name;
  bool integer;
  std::function<std::shared_ptr<const SubmodularInstance>(Rng&)> make;
};

Outcome PropertySuite() {
  const std::vector<Family> families = {
      {"cut", true,
       [](Rng& rng) {
         const int n = 3 + static_cast<int>(rng() % 10);
         return std::make_shared<CutInstance>(
             RandomCutInstance(n, 0.4, 4, rng()));
       }},
      {"integer-table", true,
       [](Rng& rng) {
         return std::make_shared<TableInstance>(
             testing::RandomIntegerTable(2 + static_cast<int>(rng() % 9), 8,
                                         rng));
       }},
      {"unit-table", false,
       [](Rng& rng) {
         return std::make_shared<TableInstance>(
             testing::RandomUnitTable(2 + static_cast<int>(rng() % 9), rng));
       }},
      {"f_R", true,
       [](Rng& rng) {
         const int n = 1 + static_cast<int>(rng() % 12);
         std::vector<Element> hidden;
         for (int i = 0; i < n; ++i) {
           if (rng() >> 63) hidden.push_back(i);
         }
         if (hidden.empty()) hidden.push_back(0);
         return std::make_shared<LowerBoundInstance>(n, hidden);
       }},
  };
  int violations[4] = {0, 0, 0, 0};
  Rng rng(11);
  for (const Family& family : families) {
    for (int trial = 0; trial < 1000; ++trial) {
      auto f = family.make(rng);
      const int n = f->ground_size();
      const std::vector<double> table = testing::NormalizedTable(*f);
      const double m = testing::TableBound(table);
      CountingOracle oracle(*f);
      std::vector<double> x = GridPoint(n, 6, rng);
      const std::vector<double> g = FullSubgradient(oracle, x);

      double l1 = 0.0;
      int nnz = 0;
      for (double v : g) {
        l1 += std::abs(v);
        nnz += v != 0.0;
      }
      violations[0] += l1 > 3.0 * m + 1e-9;
      if (family.integer) violations[1] += nnz > 3.0 * m;

      const int sign = trial % 2 == 0 ? 1 : -1;
      SparseVector d = GridEdit(x, 1 + static_cast<int>(rng() % 3), 6, sign,
                                rng);
      std::vector<double> y = x;
      for (const SparseEntry& e : d.entries()) y[e.index] += e.value;
      const std::vector<double> gy = FullSubgradient(oracle, y);
      for (int i = 0; i < n; ++i) {
        if (d.Get(i) != 0.0) continue;
        if (sign > 0) violations[2] += gy[i] > g[i] + 1e-12;
        if (sign < 0) violations[2] += gy[i] < g[i] - 1e-12;
      }

      OrderTree tree(oracle, x);
      const Permutation perm = testing::RefPermutation(x);
      std::uniform_int_distribution<int> rank(1, n);
      int a = rank(rng);
      int b = rank(rng);
      if (a > b) std::swap(a, b);
      std::uint32_t before_a = 0;
      std::uint32_t upto_b = 0;
      for (int k = 1; k <= b; ++k) {
        upto_b |= 1u << perm[k - 1];
        if (k < a) before_a |= 1u << perm[k - 1];
      }
      const double formula = table[upto_b] - table[before_a];
      double direct = 0.0;
      for (int k = a; k <= b; ++k) direct += g[perm[k - 1]];
      violations[3] += std::abs(tree.IntervalSum(a, b) - formula) > 1e-9;
      violations[3] += std::abs(direct - formula) > 1e-9;
    }
  }
  const int total = violations[0] + violations[1] + violations[2] +
                    violations[3];
  return {total == 0,
          Format("4 families x 1000 trials; violations: l1 %d, sparsity %d, "
                 "monotonicity %d, interval %d",
                 violations[0], violations[1], violations[2], violations[3])};
}

Outcome Estimator() {
  struct Case {
    std::shared_ptr<const SubmodularInstance> f;
  };
  std::vector<Case> cases;
  Rng rng(13);
  for (int k = 0; k < 3; ++k) {
    cases.push_back({std::make_shared<TableInstance>(
        testing::RandomUnitTable(8 + k, rng))});
  }
  for (int k = 0; k < 3; ++k) {
    cases.push_back({UnitScaledCut(12 + 4 * k, 0.2, 4, 100 + k)});
  }
  double worst_z = 0.0;
  bool mismatch = false;
  double worst_ratio = 0.0;
  int checks = 0;
  for (const Case& c : cases) {
    const int n = c.f->ground_size();
    OrderTree::Options options;
    options.track_gradient = false;
    for (int e_trial = 0; e_trial < 2; ++e_trial) {
      CountingOracle oracle(*c.f);
      std::vector<double> x = GridPoint(n, 5, rng);
      OrderTree tree(oracle, x, options);
      SparseVector e = GridEdit(x, 4, 5, e_trial == 0 ? 1 : -1, rng);
      for (int ell : {1, 4, 16}) {
        EstimatorMoments m = MeasureEstimatorMoments(tree, e, ell, 100000, rng);
        worst_z = std::max(worst_z, m.max_z_score);
        mismatch = mismatch || m.zero_variance_mismatch;
        worst_ratio = std::max(worst_ratio, m.total_variance * ell / 9.0);
        ++checks;
      }
    }
  }
  const bool pass = worst_z <= 4.0 && !mismatch && worst_ratio <= 1.0;
  return {pass,
          Format("%d (instance, edit, ell) cells; max z-score %.2f; max "
                 "variance / (9/ell) = %.3f",
                 checks, worst_z, worst_ratio)};
}

Outcome ApproxQuality() {
  Rng rng(17);
  int ok = 0;
  double worst_gap = -1e9;
  for (int k = 0; k < 20; ++k) {
    const int n = 4 + k % 5;
    std::shared_ptr<const SubmodularInstance> f;
    if (k % 2 == 0) {
      f = std::make_shared<TableInstance>(testing::RandomUnitTable(n, rng));
    } else {
      f = UnitScaledCut(n, 0.5, 4, 500 + k);
    }
    const double opt = BruteForceMin(*f).value;
    std::vector<double> values;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      values.push_back(ApproxSfm(*f, 0.1, seed).value);
    }
    const double mean = testing::Mean(values);
    const double se = testing::SampleStd(values) / std::sqrt(values.size());
    ok += mean <= opt + 0.1 + 3.0 * se;
    worst_gap = std::max(worst_gap, mean - opt);
  }

  // Oracle-call scaling at a looser eps; the per-batch cost does not
  // depend on it.
  double worst_constant = 0.0;
  bool batches_match = true;
  for (int n : {8, 27, 64, 125, 216, 343}) {
    auto f = UnitScaledCut(n, 3.0 / n, 4, 900 + n);
    const ApproxPlan plan = MakeApproxPlan(n, n, 1.0);
    RunReport report = ApproxSfm(*f, 1.0, 1);
    const double log_n = std::max(1.0, std::log2(n));
    const std::int64_t expected_batches =
        (static_cast<std::int64_t>(std::ceil(10.0 * n * log_n * log_n)) +
         plan.batch_length - 1) /
        plan.batch_length;
    batches_match = batches_match && report.batches == expected_batches;
    const double t = plan.batch_length;
    const double per_batch =
        static_cast<double>(report.eval_calls) / report.batches;
    worst_constant = std::max(
        worst_constant, per_batch / (n + t * t * t * log_n * log_n));
  }
  constexpr double kConstant = 4.0;
  const bool pass = ok == 20 && batches_match && worst_constant <= kConstant;
  return {pass, Format("%d/20 instances within OPT + eps + 3 SE (worst mean "
                       "gap %.4f); batches = ceil(N/T): %s; eval_calls per "
                       "batch <= %.3f (n + T^3 log^2 n), limit c = %.0f",
                       ok, worst_gap, batches_match ? "yes" : "no",
                       worst_constant, kConstant)};
}

Outcome ExactScaling() {
  std::vector<double> log_n;
  std::vector<double> log_calls;
  std::string points;
  for (int n : {64, 128, 256, 512, 1024}) {
    CutInstance cut = RandomBudgetCutInstance(n, 2, 2, 3000 + n);
    RunReport report = ExactSfm(cut, 2.0);
    log_n.push_back(std::log(n));
    log_calls.push_back(std::log(static_cast<double>(report.eval_calls)));
    points += Format(" %d:%llu", n,
                     static_cast<unsigned long long>(report.eval_calls));
  }
  const double mx = testing::Mean(log_n);
  const double my = testing::Mean(log_calls);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t k = 0; k < log_n.size(); ++k) {
    sxy += (log_n[k] - mx) * (log_calls[k] - my);
    sxx += (log_n[k] - mx) * (log_n[k] - mx);
  }
  const double slope = sxy / sxx;
  return {slope <= 1.25,
          Format("slope %.3f (limit 1.25); eval_calls%s", slope,
                 points.c_str())};
}

Outcome Projection() {
  Rng rng(19);
  std::uniform_real_distribution<double> coord(-1.0, 2.0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + trial % 8;
    std::vector<double> y(n);
    for (double& v : y) v = coord(rng);
    const double s = std::uniform_real_distribution<double>(0.0, n)(rng);
    const SparseCapProjection got = ProjectSparseCap(y, s);
    const std::vector<double> want = testing::ActiveSetProjection(y, s);
    for (int i = 0; i < n; ++i) {
      worst = std::max(worst, std::abs(got.z[i] - want[i]));
    }
  }
  return {worst <= 1e-9,
          Format("1000 points, max coordinate gap %.2e", worst)};
}

Outcome LowerBound() {
  bool pass = true;
  std::string detail;
  for (int n : {32, 64, 128}) {
    for (StrategyKind kind : kAllStrategies) {
      SimulationStats stats = SimulateRecognizerParallel(
          MakeStrategy(kind), n, 4000 + n, 10000);
      ChiSquareResult chi = GeometricChiSquare(stats.first_reveal, n, 0.01);
      const bool ok = stats.mean_queries >= n / 4.0 && chi.pass;
      pass = pass && ok;
      detail += Format(" [n=%d %s mean %.2f p %.3f]", n,
                       std::string(StrategyName(kind)).c_str(),
                       stats.mean_queries, chi.p_value);
    }
  }
  return {pass, "mean >= n/4 and chi-square at 1%:" + detail};
}

double CutValue(const CutInstance& graph, std::span<const Element> members) {
  std::vector<char> side(graph.ground_size(), 0);
  for (Element e : members) side[e] = 1;
  return graph.CutWeight(side);
}

Outcome Mincut() {
  int ok = 0;
  double worst_gap = -1e9;
  for (int k = 0; k < 20; ++k) {
    const int n = 3 + k % 6;
    CutInstance graph = RandomCutInstance(n, 0.4, 5, 6000 + k);
    double opt = std::numeric_limits<double>::infinity();
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      std::vector<Element> members;
      for (int i = 0; i < n; ++i) {
        if ((mask >> i) & 1u) members.push_back(i);
      }
      opt = std::min(opt, CutValue(graph, members));
    }
    std::vector<double> values;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      values.push_back(
          CutValue(graph, MincutSgd(graph, 0.05, seed).minimizer));
    }
    const double mean = testing::Mean(values);
    const double slack = 0.05 * graph.total_weight();
    ok += mean <= opt + slack;
    worst_gap = std::max(worst_gap, (mean - opt) / graph.total_weight());
  }
  return {ok == 20, Format("%d/20 graphs with mean cut <= mincut + eps W "
                           "(worst (mean - mincut) / W = %.4f)",
                           ok, worst_gap)};
}

Outcome Multiplicative() {
  Rng rng(23);
  int ok = 0;
  double worst_ratio = 0.0;
  for (int k = 0; k < 20; ++k) {
    const int n = 2 + k % 6;
    TableInstance table = testing::RandomNonpositiveTable(n, rng);
    const double opt = BruteForceMin(table).value;
    std::vector<double> values;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      values.push_back(MultiplicativeApprox(table, 0.5, seed).value);
    }
    const double mean = testing::Mean(values);
    ok += mean <= 0.5 * opt;
    worst_ratio = k == 0 ? mean / opt : std::min(worst_ratio, mean / opt);
  }
  return {ok == 20, Format("%d/20 tables with mean <= 0.5 OPT (smallest "
                           "mean / OPT = %.3f)",
                           ok, worst_ratio)};
}

struct Criterion {
  const char* name;
  double budget_seconds;
  Outcome (*run)();
};

}  // namespace
}  // namespace sfm

int main() {
  using sfm::Criterion;
  const Criterion criteria[] = {
      {"exactness", 300, sfm::Exactness},
      {"oracle-equivalence", 120, sfm::OracleEquivalence},
      {"property-suite", 120, sfm::PropertySuite},
      {"estimator", 300, sfm::Estimator},
      {"approximation", 600, sfm::ApproxQuality},
      {"exact-scaling", 900, sfm::ExactScaling},
      {"sparse-cap-projection", 60, sfm::Projection},
      {"lower-bound", 300, sfm::LowerBound},
      {"mincut", 300, sfm::Mincut},
      {"multiplicative", 300, sfm::Multiplicative},
  };
  int failures = 0;
  int index = 0;
  for (const Criterion& c : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    sfm::Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start)
                               .count();
    const bool in_time = seconds <= c.budget_seconds;
    const bool pass = outcome.pass && in_time;
    failures += !pass;
    std::printf("%s %2d %-22s %7.1fs (budget %.0fs) %s\n",
                pass ? "PASS" : "FAIL", index, c.name, seconds,
                c.budget_seconds, outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
