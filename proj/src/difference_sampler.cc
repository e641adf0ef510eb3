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

#include "sfm/difference_sampler.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>

namespace sfm {
namespace {

// U[q] plus the first `count` touched coordinates of one side's order.
class CompositePrefix final : public PrefixView {
 public:
  CompositePrefix(const OrderTree& tree, std::span<const int> slot,
                  std::span<const Element> touched_order,
                  std::span<const int> pos, int count, int q)
      : tree_(tree),
        slot_(slot),
        order_(touched_order),
        pos_(pos),
        count_(count),
        q_(q) {}

  int ground_size() const override { return tree_.size(); }
  int length() const override { return q_ + count_; }
  bool Contains(Element e) const override {
    int s = slot_[e];
    if (s >= 0) return pos_[s] < count_;
    return tree_.RankOf(e) < q_;
  }
  void AppendMembers(std::vector<Element>& out) const override {
    Element e = tree_.first();
    for (int j = 0; j < q_; ++j) {
      out.push_back(e);
      e = tree_.next(e);
    }
    out.insert(out.end(), order_.begin(), order_.begin() + count_);
  }

 private:
  const OrderTree& tree_;
  std::span<const int> slot_;
  std::span<const Element> order_;
  std::span<const int> pos_;
  int count_;
  int q_;
};

}  // namespace

DifferenceSampler::DifferenceSampler(OrderTree& tree, const SparseVector& e)
    : tree_(&tree) {
  if (tree.tracks_gradient()) {
    throw std::logic_error("DifferenceSampler needs a non-tracking OrderTree");
  }
  if (!e.IsNonnegative() && !e.IsNonpositive()) {
    throw DomainError("sample_difference: edit must be sign-uniform");
  }
  for (const SparseEntry& entry : e.entries()) {
    if (entry.index < 0 || entry.index >= tree.size()) {
      throw DomainError("sample_difference: coordinate out of range");
    }
    double next = tree.EditedKey(entry.index, entry.value);
    if (next == tree.key_[entry.index]) continue;
    touched_.push_back(entry.index);
    old_key_.push_back(tree.key_[entry.index]);
    new_key_.push_back(next);
  }
  const int k = static_cast<int>(touched_.size());
  for (int s = 0; s < k; ++s) {
    tree.slot_[touched_[s]] = s;
    tree.Detach(touched_[s]);
  }
  m_ = tree.stored_;

  try {
    for (int side = 0; side < 2; ++side) {
      const std::vector<double>& keys = side == 0 ? old_key_ : new_key_;
      untouched_before_[side].resize(k);
      for (int s = 0; s < k; ++s) {
        untouched_before_[side][s] = tree.CountBefore(keys[s], touched_[s]);
      }
      std::vector<int> slots(k);
      std::iota(slots.begin(), slots.end(), 0);
      std::sort(slots.begin(), slots.end(), [&](int a, int b) {
        return tree.BeforeKey(keys[a], touched_[a], keys[b], touched_[b]);
      });
      order_[side].resize(k);
      pos_[side].resize(k);
      for (int r = 0; r < k; ++r) {
        order_[side][r] = touched_[slots[r]];
        pos_[side][slots[r]] = r;
      }
    }

    // Touched coordinates: g_side(j) = f(A + j) - f(A).
    std::vector<double> grad[2];
    for (int side = 0; side < 2; ++side) {
      grad[side].assign(k, 0.0);
      for (int r = 0; r < k; ++r) {
        int s = tree.slot_[order_[side][r]];
        int q = untouched_before_[side][s];
        grad[side][s] = Eval(side, r + 1, q) - Eval(side, r, q);
      }
    }
    for (int s = 0; s < k; ++s) {
      touched_diff_.push_back({touched_[s], grad[1][s] - grad[0][s]});
    }

    // Block boundaries in untouched-rank space.
    std::vector<int> cuts = {0, m_};
    std::vector<int> before_sorted[2];
    for (int side = 0; side < 2; ++side) {
      cuts.insert(cuts.end(), untouched_before_[side].begin(),
                  untouched_before_[side].end());
      before_sorted[side] = untouched_before_[side];
      std::sort(before_sorted[side].begin(), before_sorted[side].end());
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      Block block{cuts[c], cuts[c + 1], 0, 0, 0.0};
      block.count_x = static_cast<int>(
          std::upper_bound(before_sorted[0].begin(), before_sorted[0].end(),
                           block.lo) -
          before_sorted[0].begin());
      block.count_y = static_cast<int>(
          std::upper_bound(before_sorted[1].begin(), before_sorted[1].end(),
                           block.lo) -
          before_sorted[1].begin());
      if (block.count_x == block.count_y &&
          (block.count_x == 0 || block.count_x == k)) {
        continue;
      }
      block.mass = BlockDifference(block, block.lo, block.hi);
      if (block.mass != 0.0) blocks_.push_back(block);
    }
  } catch (...) {
    for (int s = 0; s < k; ++s) {
      tree.Attach(touched_[s]);
      tree.slot_[touched_[s]] = -1;
    }
    throw;
  }

  double running = 0.0;
  for (const SparseEntry& d : touched_diff_) {
    running += std::abs(d.value);
    bucket_mass_.push_back(running);
  }
  for (const Block& block : blocks_) {
    running += std::abs(block.mass);
    bucket_mass_.push_back(running);
  }
  l1_mass_ = running;
}

DifferenceSampler::~DifferenceSampler() {
  if (attached_) return;
  for (Element j : touched_) {
    tree_->Attach(j);
    tree_->slot_[j] = -1;
  }
}

void DifferenceSampler::Commit() {
  if (attached_) return;
  for (std::size_t s = 0; s < touched_.size(); ++s) {
    tree_->key_[touched_[s]] = new_key_[s];
    tree_->Attach(touched_[s]);
    tree_->slot_[touched_[s]] = -1;
  }
  attached_ = true;
}

double DifferenceSampler::Eval(int side, int count, int q) {
  if (count == 0 && q == 0) return 0.0;
  const std::uint64_t k = touched_.size();
  std::uint64_t key =
      ((static_cast<std::uint64_t>(side) * (k + 1) + count) * (m_ + 1)) + q;
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;
  CompositePrefix view(*tree_, tree_->slot_, order_[side], pos_[side], count,
                       q);
  double value = tree_->oracle().EvaluatePrefix(view);
  memo_.emplace(key, value);
  return value;
}

double DifferenceSampler::BlockDifference(const Block& block, int lo, int hi) {
  double after = Eval(1, block.count_y, hi) - Eval(1, block.count_y, lo);
  double before = Eval(0, block.count_x, hi) - Eval(0, block.count_x, lo);
  return after - before;
}

Element DifferenceSampler::SampleInBlock(const Block& block, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int lo = block.lo;
  int hi = block.hi;
  while (hi - lo > 1) {
    int mid = lo + (hi - lo) / 2;
    double wl = std::abs(BlockDifference(block, lo, mid));
    double wr = std::abs(BlockDifference(block, mid, hi));
    double total = wl + wr;
    bool go_left = total > 0.0
                       ? unit(rng) * total < wl
                       : unit(rng) * (hi - lo) < (mid - lo);
    if (go_left) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return tree_->AtRank(lo);
}

std::optional<SparseEntry> DifferenceSampler::DrawOne(Rng& rng) {
  if (l1_mass_ == 0.0) return std::nullopt;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double u = unit(rng) * l1_mass_;
  auto it = std::upper_bound(bucket_mass_.begin(), bucket_mass_.end(), u);
  std::size_t b = static_cast<std::size_t>(it - bucket_mass_.begin());
  if (it == bucket_mass_.end()) {
    b = bucket_mass_.size() - 1;
    while (b > 0 && bucket_mass_[b] == bucket_mass_[b - 1]) --b;
  }
  if (b < touched_diff_.size()) {
    const SparseEntry& d = touched_diff_[b];
    return SparseEntry{d.index, d.value > 0 ? l1_mass_ : -l1_mass_};
  }
  const Block& block = blocks_[b - touched_diff_.size()];
  Element j = SampleInBlock(block, rng);
  return SparseEntry{j, block.mass > 0 ? l1_mass_ : -l1_mass_};
}

SparseVector DifferenceSampler::Draw(int ell, Rng& rng) {
  if (ell < 1) throw DomainError("sample_difference: ell must be positive");
  std::vector<SparseEntry> entries;
  entries.reserve(ell);
  for (int i = 0; i < ell; ++i) {
    if (auto z = DrawOne(rng)) {
      entries.push_back({z->index, z->value / ell});
    }
  }
  return SparseVector::FromEntries(std::move(entries));
}

DifferenceEstimate SampleDifference(OrderTree& tree, const SparseVector& e,
                                    int ell, Rng& rng) {
  DifferenceSampler sampler(tree, e);
  DifferenceEstimate out;
  out.z = sampler.Draw(ell, rng);
  out.ell = ell;
  out.l1_mass = sampler.l1_mass();
  sampler.Commit();
  return out;
}

}  // namespace sfm
