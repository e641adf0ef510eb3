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

// Randomized sparse estimate of g(x + e) - g(x) for a sign-uniform edit e.
//
// With the k touched coordinates detached, the untouched ones keep their
// relative order in both permutations. Cutting the untouched ranks at every
// position where a touched coordinate sits (before or after the edit) leaves
// at most 2k + 1 blocks; inside a block the set of touched coordinates that
// precede it is fixed on each side, so the block's total difference is four
// prefix values and every entry in it has the same sign. A sample picks a
// touched coordinate or a block in proportion to |difference|, then halves
// the block by rank until one coordinate is left.

#ifndef SFM_DIFFERENCE_SAMPLER_H_
#define SFM_DIFFERENCE_SAMPLER_H_

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "sfm/order_tree.h"
#include "sfm/sparse_vector.h"
#include "sfm/types.h"

namespace sfm {

struct DifferenceEstimate {
  SparseVector z;
  int ell = 0;
  // ||g(x + e) - g(x)||_1.
  double l1_mass = 0.0;
};

class DifferenceSampler {
 public:
  // Detaches the touched coordinates of `tree` and computes the touched
  // differences and block masses. The tree must not track gradients.
  // DomainError for mixed-sign e or x + e outside the key domain.
  DifferenceSampler(OrderTree& tree, const SparseVector& e);
  // Restores the original keys unless Commit() was called.
  ~DifferenceSampler();

  DifferenceSampler(const DifferenceSampler&) = delete;
  DifferenceSampler& operator=(const DifferenceSampler&) = delete;

  double l1_mass() const { return l1_mass_; }
  // Explicit differences on the touched coordinates (zeros included).
  const std::vector<SparseEntry>& touched_differences() const {
    return touched_diff_;
  }
  int num_blocks() const { return static_cast<int>(blocks_.size()); }

  // One draw: l1_mass * sign(d_j) at coordinate j, chosen with probability
  // |d_j| / l1_mass. Empty when the mass is zero.
  std::optional<SparseEntry> DrawOne(Rng& rng);
  // Average of `ell` independent draws.
  SparseVector Draw(int ell, Rng& rng);

  // Reattaches the touched coordinates at their new keys.
  void Commit();

 private:
  struct Block {
    int lo;  // untouched ranks [lo, hi)
    int hi;
    int count_x;  // touched coordinates preceding the block before the edit
    int count_y;  // and after it
    double mass;  // signed sum of differences
  };

  // f(U[q] + first `count` touched coordinates of the side's order).
  double Eval(int side, int count, int q);
  double BlockDifference(const Block& block, int lo, int hi);
  Element SampleInBlock(const Block& block, Rng& rng);

  OrderTree* tree_;
  bool attached_ = false;
  int m_ = 0;
  std::vector<Element> touched_;
  std::vector<double> old_key_;
  std::vector<double> new_key_;
  // Touched coordinates in old / new order, and each slot's position there.
  std::vector<Element> order_[2];
  std::vector<int> pos_[2];
  std::vector<int> untouched_before_[2];

  std::vector<SparseEntry> touched_diff_;
  std::vector<Block> blocks_;
  std::vector<double> bucket_mass_;
  double l1_mass_ = 0.0;
  std::unordered_map<std::uint64_t, double> memo_;
};

// Builds a sampler, averages `ell` draws and commits the edit to `tree`.
DifferenceEstimate SampleDifference(OrderTree& tree, const SparseVector& e,
                                    int ell, Rng& rng);

}  // namespace sfm

#endif  // SFM_DIFFERENCE_SAMPLER_H_
