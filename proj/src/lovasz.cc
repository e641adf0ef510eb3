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

#include "sfm/lovasz.h"

#include <algorithm>
#include <numeric>

namespace sfm {
namespace {

std::vector<int> InverseOf(const Permutation& perm) {
  std::vector<int> rank(perm.size());
  for (std::size_t j = 0; j < perm.size(); ++j) rank[perm[j]] = static_cast<int>(j);
  return rank;
}

void CheckDimension(const CountingOracle& oracle, std::span<const double> x) {
  if (static_cast<int>(x.size()) != oracle.ground_size()) {
    throw DomainError("point dimension does not match the ground set");
  }
  CheckUnitBox(x);
}

}  // namespace

Permutation ConsistentPermutation(std::span<const double> x) {
  Permutation perm(x.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](Element a, Element b) {
    return x[a] > x[b];
  });
  return perm;
}

std::vector<double> PrefixValues(CountingOracle& oracle, const Permutation& perm,
                                 int lo, int hi) {
  const std::vector<int> rank = InverseOf(perm);
  std::vector<double> values;
  values.reserve(hi - lo + 1);
  for (int k = lo; k <= hi; ++k) {
    values.push_back(oracle.EvaluatePrefix(PermutationPrefix(perm, rank, k)));
  }
  return values;
}

double LovaszValue(CountingOracle& oracle, std::span<const double> x) {
  CheckDimension(oracle, x);
  const int n = static_cast<int>(x.size());
  const Permutation perm = ConsistentPermutation(x);
  const std::vector<double> f = PrefixValues(oracle, perm, 1, n);
  double value = f[n - 1] * x[perm[n - 1]];
  for (int j = 0; j + 1 < n; ++j) {
    value += f[j] * (x[perm[j]] - x[perm[j + 1]]);
  }
  return value;
}

std::vector<double> FullSubgradient(CountingOracle& oracle,
                                    std::span<const double> x) {
  CheckDimension(oracle, x);
  oracle.NoteSubgradient();
  const int n = static_cast<int>(x.size());
  const Permutation perm = ConsistentPermutation(x);
  const std::vector<double> f = PrefixValues(oracle, perm, 0, n);
  std::vector<double> g(n);
  for (int k = 1; k <= n; ++k) g[perm[k - 1]] = f[k] - f[k - 1];
  return g;
}

PrefixSet BestPrefixSet(CountingOracle& oracle, std::span<const double> x) {
  CheckDimension(oracle, x);
  const int n = static_cast<int>(x.size());
  const Permutation perm = ConsistentPermutation(x);
  const std::vector<double> f = PrefixValues(oracle, perm, 0, n);
  const int best = static_cast<int>(
      std::min_element(f.begin(), f.end()) - f.begin());
  PrefixSet out;
  out.members.assign(perm.begin(), perm.begin() + best);
  std::sort(out.members.begin(), out.members.end());
  out.value = f[best];
  return out;
}

}  // namespace sfm
