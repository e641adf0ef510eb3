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

// Projected (stochastic) subgradient descent over the Lovasz extension.
//
// The driver keeps x implicitly as the keys of a gradient provider's
// OrderTree. On the box every step edits only supp(g~). On the capped box
// {x in [0,1]^n : sum x <= s} the projection subtracts one common lambda from
// every positive coordinate; SparseCapState keeps that shift as a running
// offset so a step touches only supp(g~) plus the coordinates that reach 0.

#ifndef SFM_DESCENT_H_
#define SFM_DESCENT_H_

#include <cstdint>
#include <memory>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "sfm/lovasz.h"
#include "sfm/oracle.h"
#include "sfm/order_tree.h"
#include "sfm/sparse_vector.h"
#include "sfm/types.h"

namespace sfm {

struct StepSchedule {
  double eta = 0.0;
  std::int64_t iterations = 1;
};

// eta = (R / B) sqrt(2 / T).
StepSchedule TheoremSchedule(double r_squared, double b_squared,
                             std::int64_t iterations);

// e with x + e = clamp(x - eta g, 0, 1), supported on supp(g).
SparseVector ProjectBoxEdit(std::span<const double> x, const SparseVector& g,
                            double eta);

struct SparseCapProjection {
  std::vector<double> z;
  double lambda = 0.0;
};

// z_i = median(0, y_i - lambda, 1) with the smallest lambda >= 0 such that
// sum z <= s. Reference implementation: sorted breakpoint scan.
SparseCapProjection ProjectSparseCap(std::span<const double> y, double s);

// x on the capped box, encoded as keys: key_i = x_i + theta for x_i > 0 and
// key_i = 0 otherwise. Keys order the coordinates exactly like x.
class SparseCapState {
 public:
  struct StepResult {
    // Key changes to forward to the gradient provider.
    SparseVector key_edit;
    // New x values of the coordinates that left the drifting set or were
    // stepped explicitly. All other positive coordinates dropped by lambda.
    std::vector<SparseEntry> explicit_values;
    double lambda = 0.0;
  };

  SparseCapState(int n, double s);

  int size() const { return static_cast<int>(keys_.size()); }
  double cap() const { return cap_; }
  double theta() const { return theta_; }
  std::span<const double> keys() const { return keys_; }
  bool positive(Element i) const { return positive_flag_[i] != 0; }
  double value(Element i) const {
    return positive_flag_[i] ? keys_[i] - theta_ : 0.0;
  }
  std::vector<double> Values() const;

  // x <- Proj(x - eta g).
  StepResult Step(const SparseVector& g, double eta);

  bool NeedsRebase() const { return theta_ > 1.0; }
  // Subtracts theta from every positive key and resets it to 0. Returns the
  // amount removed.
  double Rebase();

 private:
  double cap_;
  double theta_ = 0.0;
  std::vector<double> keys_;
  std::vector<char> positive_flag_;
  // (key, coordinate) of positive coordinates, ascending.
  std::set<std::pair<double, Element>> positive_;
  double positive_key_sum_ = 0.0;
};

// Running sum of iterates where drifting coordinates lose a common shift
// every iteration without being touched.
class LazyAverager {
 public:
  explicit LazyAverager(int n);

  // Opens the next iterate; drifting coordinates drop by `shift`.
  void NextIterate(double shift);
  // Coordinate i has value v in the current iterate.
  void Set(Element i, double v, bool drifting);
  // Mean over all iterates so far, current one included.
  std::vector<double> Mean() const;
  std::int64_t iterates() const { return t_; }

 private:
  struct Coordinate {
    std::int64_t since = 1;
    double base = 0.0;
    double phi_since = 0.0;
    double acc = 0.0;
    bool drifting = false;
  };

  double SegmentSum(const Coordinate& c, std::int64_t count,
                    double phi_end) const;

  std::int64_t t_ = 1;
  double theta_ = 0.0;
  double phi_ = 0.0;  // sum of theta over iterates before the current one
  std::vector<Coordinate> coords_;
};

// Supplies g~ at the point encoded by the current keys and follows edits.
class GradientProvider {
 public:
  virtual ~GradientProvider() = default;

  virtual void Reset(std::span<const double> keys, bool unit_box) = 0;
  virtual SparseVector Estimate(Rng& rng) = 0;
  virtual void Apply(const SparseVector& key_edit, Rng& rng) = 0;
  // Every positive key dropped by `delta`; `keys` holds the result.
  virtual void ShiftPositiveKeys(double delta,
                                 std::span<const double> keys) = 0;
  virtual std::int64_t batches() const { return 0; }
};

// Exact subgradient maintained by OrderTree::ApplyUpdateExact.
class ExactProvider final : public GradientProvider {
 public:
  explicit ExactProvider(CountingOracle& oracle) : oracle_(&oracle) {}

  void Reset(std::span<const double> keys, bool unit_box) override;
  SparseVector Estimate(Rng& rng) override;
  void Apply(const SparseVector& key_edit, Rng& rng) override;
  void ShiftPositiveKeys(double delta, std::span<const double> keys) override;

  const OrderTree& tree() const { return *tree_; }

 private:
  CountingOracle* oracle_;
  bool unit_box_ = true;
  std::unique_ptr<OrderTree> tree_;
};

// Batched estimator: every `batch_length` steps a full subgradient is
// reduced to one scaled coordinate sample, then each step t of the batch
// adds sampled differences averaged over ell = t draws.
class BatchedSamplingProvider final : public GradientProvider {
 public:
  BatchedSamplingProvider(CountingOracle& oracle, int batch_length);

  void Reset(std::span<const double> keys, bool unit_box) override;
  SparseVector Estimate(Rng& rng) override;
  void Apply(const SparseVector& key_edit, Rng& rng) override;
  void ShiftPositiveKeys(double delta, std::span<const double> keys) override;
  std::int64_t batches() const override { return batches_; }

 private:
  void Accumulate(const SparseVector& z);

  CountingOracle* oracle_;
  int batch_length_;
  bool unit_box_ = true;
  std::unique_ptr<OrderTree> tree_;
  int step_ = 0;
  std::int64_t batches_ = 0;
  std::vector<double> acc_;
  std::vector<Element> acc_support_;
  std::vector<char> in_support_;
};

// Recomputes the full subgradient every step (n + 1 queries).
class FullSubgradientProvider final : public GradientProvider {
 public:
  explicit FullSubgradientProvider(CountingOracle& oracle)
      : oracle_(&oracle) {}

  void Reset(std::span<const double> keys, bool unit_box) override;
  SparseVector Estimate(Rng& rng) override;
  void Apply(const SparseVector& key_edit, Rng& rng) override;
  void ShiftPositiveKeys(double delta, std::span<const double> keys) override;

 private:
  CountingOracle* oracle_;
  bool unit_box_ = true;
  std::vector<double> keys_;
};

enum class DomainKind { kBox, kSparseCap };

struct DescentOptions {
  DomainKind domain = DomainKind::kBox;
  double cap = 0.0;
  // Capped box only: dense breakpoint projection instead of the offset path.
  bool reference_projection = false;
  StepSchedule schedule;
  // Check feasibility of every iterate (O(n) per step).
  bool validate_iterates = false;
};

struct DescentResult {
  PrefixSet best;
  bool from_average = false;
  std::int64_t iterations = 0;
  std::vector<double> average;
  std::vector<double> final_point;
};

// Starts at x = 0, runs schedule.iterations steps and returns the better of
// the best prefix sets at the averaged and at the final iterate.
DescentResult RunDescent(CountingOracle& oracle, GradientProvider& provider,
                         const DescentOptions& options, Rng& rng);

}  // namespace sfm

#endif  // SFM_DESCENT_H_
