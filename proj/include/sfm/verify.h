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

// Exhaustive ground truth for small instances and Monte-Carlo checks of the
// difference estimator. Each exhaustive kernel has a serial reference and an
// OpenMP version that must return identical results.

#ifndef SFM_VERIFY_H_
#define SFM_VERIFY_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "sfm/oracle.h"
#include "sfm/order_tree.h"
#include "sfm/sparse_vector.h"
#include "sfm/types.h"

namespace sfm {

struct BruteForceResult {
  // 0-based, ascending; the smallest bitmask among all minimizers.
  std::vector<Element> minimizer;
  double value = 0.0;
  std::uint32_t mask = 0;
  // Normalized f on every bitmask when requested.
  std::vector<double> table;
};

inline constexpr int kMaxBruteForceSize = 20;
inline constexpr int kMaxSubmodularCheckSize = 12;

// Gray-code enumeration of all 2^n subsets. DomainError for n > 20.
BruteForceResult BruteForceMin(const SubmodularInstance& instance,
                               bool keep_table = false);
BruteForceResult BruteForceMinParallel(const SubmodularInstance& instance);

struct SubmodularityWitness {
  // S subset of T, i outside T, with f(S + i) - f(S) < f(T + i) - f(T).
  std::vector<Element> s;
  std::vector<Element> t;
  Element i = -1;
};

struct SubmodularityReport {
  bool submodular = true;
  std::optional<SubmodularityWitness> witness;
};

// Exhaustive diminishing-returns check; DomainError for n > 12.
// Integer-valued instances are checked exactly, real ones to 1e-9 (1 + M).
SubmodularityReport CheckSubmodular(const SubmodularInstance& instance);
SubmodularityReport CheckSubmodularParallel(
    const SubmodularInstance& instance);

struct EstimatorMoments {
  std::vector<double> mean;
  std::vector<double> variance;
  // g(x + e) - g(x), from two full subgradients.
  std::vector<double> exact;
  // sum_i variance_i, i.e. E ||z - E z||_2^2 of one averaged estimate.
  double total_variance = 0.0;
  double l1_mass = 0.0;
  int ell = 0;
  std::int64_t draws = 0;
  // max_i |mean_i - exact_i| / standard error_i (coordinates with zero
  // sample variance must match exactly and are excluded).
  double max_z_score = 0.0;
  bool zero_variance_mismatch = false;
};

// Draws `draws` estimates with ell samples each for the sign-uniform edit e
// at the tree's current point. The tree is left at x.
EstimatorMoments MeasureEstimatorMoments(OrderTree& tree,
                                         const SparseVector& e, int ell,
                                         std::int64_t draws, Rng& rng);

}  // namespace sfm

#endif  // SFM_VERIFY_H_
