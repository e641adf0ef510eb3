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

#ifndef SFM_SPARSE_VECTOR_H_
#define SFM_SPARSE_VECTOR_H_

#include <cstddef>
#include <span>
#include <vector>

#include "sfm/types.h"

namespace sfm {

// An ordering of the ground set; prefix P[j] is the first j entries.
using Permutation = std::vector<Element>;

struct SparseEntry {
  Element index;
  double value;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

// Coordinate list with distinct, ascending indices and no stored zeros.
class SparseVector {
 public:
  SparseVector() = default;

  // Sorts by index, sums duplicates and drops entries that end up zero.
  static SparseVector FromEntries(std::vector<SparseEntry> entries);
  static SparseVector FromDense(std::span<const double> dense);

  std::span<const SparseEntry> entries() const { return entries_; }
  std::size_t nnz() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // Zero when `i` is not stored.
  double Get(Element i) const;

  double L1() const;
  double SquaredL2() const;
  std::vector<double> ToDense(int n) const;

  // Entrywise nonnegative / nonpositive parts; their sum is *this.
  SparseVector PositivePart() const;
  SparseVector NegativePart() const;

  bool IsNonnegative() const;
  bool IsNonpositive() const;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;

 private:
  std::vector<SparseEntry> entries_;
};

// Throws DomainError unless every coordinate lies in [0, 1].
void CheckUnitBox(std::span<const double> x);

}  // namespace sfm

#endif  // SFM_SPARSE_VECTOR_H_
