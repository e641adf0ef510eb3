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

#include "sfm/sparse_vector.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace sfm {

SparseVector SparseVector::FromEntries(std::vector<SparseEntry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const SparseEntry& a, const SparseEntry& b) {
              return a.index < b.index;
            });
  SparseVector out;
  out.entries_.reserve(entries.size());
  for (const SparseEntry& e : entries) {
    if (!out.entries_.empty() && out.entries_.back().index == e.index) {
      out.entries_.back().value += e.value;
    } else {
      out.entries_.push_back(e);
    }
  }
  std::erase_if(out.entries_,
                [](const SparseEntry& e) { return e.value == 0.0; });
  return out;
}

SparseVector SparseVector::FromDense(std::span<const double> dense) {
  SparseVector out;
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] != 0.0) {
      out.entries_.push_back({static_cast<Element>(i), dense[i]});
    }
  }
  return out;
}

double SparseVector::Get(Element i) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), i,
      [](const SparseEntry& e, Element idx) { return e.index < idx; });
  return (it != entries_.end() && it->index == i) ? it->value : 0.0;
}

double SparseVector::L1() const {
  double s = 0.0;
  for (const SparseEntry& e : entries_) s += std::abs(e.value);
  return s;
}

double SparseVector::SquaredL2() const {
  double s = 0.0;
  for (const SparseEntry& e : entries_) s += e.value * e.value;
  return s;
}

std::vector<double> SparseVector::ToDense(int n) const {
  std::vector<double> out(n, 0.0);
  for (const SparseEntry& e : entries_) {
    if (e.index < 0 || e.index >= n) {
      throw DomainError("sparse index " + std::to_string(e.index) +
                        " outside ground set of size " + std::to_string(n));
    }
    out[e.index] = e.value;
  }
  return out;
}

SparseVector SparseVector::PositivePart() const {
  SparseVector out;
  for (const SparseEntry& e : entries_) {
    if (e.value > 0.0) out.entries_.push_back(e);
  }
  return out;
}

SparseVector SparseVector::NegativePart() const {
  SparseVector out;
  for (const SparseEntry& e : entries_) {
    if (e.value < 0.0) out.entries_.push_back(e);
  }
  return out;
}

bool SparseVector::IsNonnegative() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](const SparseEntry& e) { return e.value >= 0.0; });
}

bool SparseVector::IsNonpositive() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](const SparseEntry& e) { return e.value <= 0.0; });
}

void CheckUnitBox(std::span<const double> x) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= 0.0 && x[i] <= 1.0)) {
      throw DomainError("coordinate " + std::to_string(i) + " = " +
                        std::to_string(x[i]) + " outside [0, 1]");
    }
  }
}

}  // namespace sfm
