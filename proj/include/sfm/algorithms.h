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

// End-to-end minimizers assembled from the oracle, tree and descent layers.

#ifndef SFM_ALGORITHMS_H_
#define SFM_ALGORITHMS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sfm/descent.h"
#include "sfm/oracle.h"
#include "sfm/sparse_vector.h"
#include "sfm/types.h"

namespace sfm {

struct RunReport {
  std::string algorithm;
  // 0-based, ascending.
  std::vector<Element> minimizer;
  // f(minimizer), re-evaluated once at the end of the run.
  double value = 0.0;
  std::uint64_t eval_calls = 0;
  std::uint64_t subgradient_calls = 0;
  std::int64_t iterations = 0;
  std::int64_t batches = 0;
  std::uint64_t seed = 0;
  double elapsed_ms = 0.0;
};

// Step size used by the exact algorithms.
enum class ExactStepRule {
  // eta = (R / B) sqrt(2 / T), R^2 = n / 2, B = 3M: the descent bound is
  // 3 / sqrt(20) < 1 after T = 20 n M^2 steps.
  kTheorem,
  // eta = sqrt(n) / (18 M) with the same T.
  kPseudocode,
};

struct ExactOptions {
  ExactStepRule step_rule = ExactStepRule::kTheorem;
};

// Exact minimizer of an integer-valued f with |f| <= M. Deterministic.
// ContractViolation when a non-integer value is observed.
RunReport ExactSfm(const SubmodularInstance& instance, double m,
                   const ExactOptions& options = {});

// Iteration plan of the additive-approximation algorithm.
struct ApproxPlan {
  // L = max(1, log2 n), N = ceil(10 n L^2 / eps^2) steps.
  std::int64_t steps = 0;
  // ceil(n^(1/3)).
  int batch_length = 1;
  // ceil(N / batch_length); every batch runs batch_length steps.
  std::int64_t batches = 0;
  StepSchedule schedule;
};

// `support` is n for the dense algorithm and s for the sparse one.
ApproxPlan MakeApproxPlan(int n, int support, double eps);

// S with E f(S) <= OPT + eps for |f| <= 1.
RunReport ApproxSfm(const SubmodularInstance& instance, double eps,
                    std::uint64_t seed);

// Variants for instances promised to have a minimizer with at most s
// elements; the descent runs on {x in [0,1]^n : sum x <= s}. Nothing
// detects a broken promise.
RunReport SparseExactSfm(const SubmodularInstance& instance, double m, int s,
                         const ExactOptions& options = {});
RunReport SparseApproxSfm(const SubmodularInstance& instance, double eps,
                          int s, std::uint64_t seed);

// E f(S) <= (1 - delta) OPT for nonpositive f with OPT < 0, by running the
// additive algorithm on f / 2^j over decreasing powers of two.
// DomainError if f == 0; ContractViolation on a positive value.
RunReport MultiplicativeApprox(const SubmodularInstance& instance,
                               double delta, std::uint64_t seed);

// Projected SGD on the explicit cut relaxation with an edge-sampling
// estimator; E cut <= mincut + eps * W.
// Stochastic subgradient of the min-cut relaxation
// sum_{(u,v)} w_uv max(0, y_v - y_u) with y_s = 0, y_t = 1 and y = x elsewhere.
class MincutEdgeSampler {
 public:
  explicit MincutEdgeSampler(const CutInstance& graph);
  bool empty() const { return edges_.empty(); }
  double total_weight() const { return total_; }
  // Draws an edge with probability w / W. Returns W (1_v - 1_u) restricted to
  // non-terminals when y_v > y_u, and the zero vector otherwise.
  SparseVector Sample(std::span<const double> x, Rng& rng) const;

 private:
  const CutInstance* graph_;
  std::vector<WeightedEdge> edges_;
  std::vector<double> cumulative_;
  double total_ = 0.0;
};

RunReport MincutSgd(const CutInstance& graph, double eps, std::uint64_t seed);

}  // namespace sfm

#endif  // SFM_ALGORITHMS_H_
