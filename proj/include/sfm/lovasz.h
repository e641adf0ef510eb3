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

// Lovasz extension of a normalized submodular function: value, the greedy
// (Lovasz) subgradient and rounding back to a set.

#ifndef SFM_LOVASZ_H_
#define SFM_LOVASZ_H_

#include <span>
#include <vector>

#include "sfm/oracle.h"
#include "sfm/sparse_vector.h"

namespace sfm {

// Coordinates sorted by value descending, ties by index ascending. This is
// the single total order shared with OrderTree keys.
Permutation ConsistentPermutation(std::span<const double> x);

// f(P[lo]), ..., f(P[hi]) along `perm`; charges hi - lo + 1 queries.
std::vector<double> PrefixValues(CountingOracle& oracle, const Permutation& perm,
                                 int lo, int hi);

// f^(x) = sum_j f(P[j]) (x_{P_j} - x_{P_{j+1}}) + f(P[n]) x_{P_n}.
double LovaszValue(CountingOracle& oracle, std::span<const double> x);

// g_{P_k} = f(P[k]) - f(P[k-1]); n + 1 prefix queries.
std::vector<double> FullSubgradient(CountingOracle& oracle,
                                    std::span<const double> x);

struct PrefixSet {
  std::vector<Element> members;  // ascending
  double value = 0.0;
};

// The cheapest of P[0], ..., P[n]; its value never exceeds f^(x). Ties go to
// the shorter prefix.
PrefixSet BestPrefixSet(CountingOracle& oracle, std::span<const double> x);

}  // namespace sfm

#endif  // SFM_LOVASZ_H_
