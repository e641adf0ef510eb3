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

// Query-complexity experiment on the hidden-set family f_R.
//
// A subgradient of f_R at any point is +1 at the first prefix element
// outside R and -1 at the element that completes R, so each query reveals a
// run of R-members at the front of the unknown block and a run of
// non-members at its back. A recognizer keeps the confirmed members first
// and the confirmed non-members last, and chooses only the order of the
// undetermined elements.

#ifndef SFM_LOWERBOUND_H_
#define SFM_LOWERBOUND_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sfm/sparse_vector.h"
#include "sfm/types.h"

namespace sfm {

// Positions (1-based) read off one f_R subgradient: i is the first element
// outside R (n + 1 if none), j the element completing R (0 if R is empty).
struct RevealIndices {
  int i = 0;
  int j = 0;
};

RevealIndices FRRevealIndices(std::span<const char> in_r,
                              std::span<const Element> perm);

// Subgradient of f_R's Lovasz extension at any point ordered by `perm`.
// DomainError unless perm is a permutation of [n].
SparseVector FRSubgradient(std::span<const char> in_r,
                           std::span<const Element> perm);

// Orders the undetermined elements; must return a permutation of them.
using RecognizerStrategy =
    std::function<std::vector<Element>(std::span<const Element>, Rng&)>;

enum class StrategyKind { kIndexOrder, kReverseOrder, kRandomShuffle };

inline constexpr StrategyKind kAllStrategies[] = {
    StrategyKind::kIndexOrder, StrategyKind::kReverseOrder,
    StrategyKind::kRandomShuffle};

std::string_view StrategyName(StrategyKind kind);
std::optional<StrategyKind> ParseStrategy(std::string_view name);
RecognizerStrategy MakeStrategy(StrategyKind kind);

struct TrialOutcome {
  int queries = 0;
  // Elements classified by the first query's leading run, i.e. its i.
  int first_reveal = 0;
  // R is empty or the whole ground set.
  bool flagged = false;
};

// One recognizer run against a hidden set drawn by `rng` (each element in R
// with probability 1/2).
TrialOutcome RunRecognizerTrial(const RecognizerStrategy& strategy, int n,
                                Rng& rng);

struct SimulationStats {
  int n = 0;
  std::int64_t trials = 0;
  double mean_queries = 0.0;
  double std_queries = 0.0;
  std::int64_t flagged = 0;
  std::vector<int> queries;
  std::vector<int> first_reveal;
};

// Trial t uses TrialRng(seed, t). The parallel version returns the same
// statistics as the serial one.
SimulationStats SimulateRecognizer(const RecognizerStrategy& strategy, int n,
                                   std::uint64_t seed, std::int64_t trials);
SimulationStats SimulateRecognizerParallel(const RecognizerStrategy& strategy,
                                           int n, std::uint64_t seed,
                                           std::int64_t trials);

struct ChiSquareResult {
  double statistic = 0.0;
  int degrees_of_freedom = 0;
  double critical = 0.0;
  double p_value = 1.0;
  bool pass = true;
};

// Goodness of fit of first-query reveals against Pr[X = k] = 2^-k
// (k = 1..n, with X = n + 1 when no element is outside R). Bins hold an
// expected count of at least 5; the last bin takes the tail.
ChiSquareResult GeometricChiSquare(std::span<const int> reveals, int n,
                                   double alpha);

}  // namespace sfm

#endif  // SFM_LOWERBOUND_H_
