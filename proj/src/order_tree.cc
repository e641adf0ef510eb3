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

#include "sfm/order_tree.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sfm/lovasz.h"

namespace sfm {
namespace {

constexpr double kSnap = 1e-12;

void Fail(const std::string& what) {
  throw std::logic_error("OrderTree invariant: " + what);
}

}  // namespace

void OrderTree::Prefix::AppendMembers(std::vector<Element>& out) const {
  Element e = tree_->head_;
  for (int j = 0; j < k_; ++j) {
    out.push_back(e);
    e = tree_->next_[e];
  }
}

OrderTree::OrderTree(CountingOracle& oracle, std::span<const double> keys,
                     Options options)
    : oracle_(&oracle),
      options_(options),
      n_(static_cast<int>(keys.size())),
      key_(keys.begin(), keys.end()),
      left_(n_, -1),
      right_(n_, -1),
      height_(n_, 1),
      size_(n_, 1),
      g_(n_, 0.0),
      sum_(n_, 0.0),
      prev_(n_, -1),
      next_(n_, -1),
      nz_prev_(n_, -1),
      nz_next_(n_, -1),
      in_nz_(n_, 0),
      memo_value_(n_ + 1, 0.0),
      memo_stamp_(n_ + 1, 0),
      slot_(n_, -1) {
  if (n_ != oracle.ground_size()) {
    throw DomainError("OrderTree: key length differs from ground set size");
  }
  for (double k : key_) {
    if (!std::isfinite(k)) throw DomainError("OrderTree: non-finite key");
  }
  if (options_.unit_box) CheckUnitBox(key_);
  if (options_.prune_tolerance < 0) {
    const auto& inst = oracle.instance();
    options_.prune_tolerance = inst.value_kind() == ValueKind::kInteger
                                   ? 0.0
                                   : 1e-11 * (1.0 + inst.bound());
  }

  Permutation order = ConsistentPermutation(key_);
  for (int j = 0; j < n_; ++j) {
    prev_[order[j]] = j > 0 ? order[j - 1] : -1;
    next_[order[j]] = j + 1 < n_ ? order[j + 1] : -1;
  }
  head_ = n_ > 0 ? order[0] : -1;

  if (options_.track_gradient && n_ > 0) {
    std::vector<double> values = PrefixValues(oracle, order, 0, n_);
    oracle.NoteSubgradient();
    for (int j = 0; j < n_; ++j) SetGradient(order[j], values[j + 1] - values[j]);
  }
  root_ = BuildBalanced(order);
  stored_ = n_;
}

int OrderTree::BuildBalanced(std::span<const Element> order) {
  if (order.empty()) return -1;
  std::size_t mid = order.size() / 2;
  Element node = order[mid];
  left_[node] = BuildBalanced(order.first(mid));
  right_[node] = BuildBalanced(order.subspan(mid + 1));
  Pull(node);
  return node;
}

void OrderTree::Pull(int node) {
  int l = left_[node];
  int r = right_[node];
  height_[node] = 1 + std::max(Height(l), Height(r));
  size_[node] = 1 + Size(l) + Size(r);
  if (options_.track_gradient) sum_[node] = Sum(l) + g_[node] + Sum(r);
}

int OrderTree::RotateLeft(int x) {
  int y = right_[x];
  right_[x] = left_[y];
  left_[y] = x;
  Pull(x);
  Pull(y);
  return y;
}

int OrderTree::RotateRight(int y) {
  int x = left_[y];
  left_[y] = right_[x];
  right_[x] = y;
  Pull(y);
  Pull(x);
  return x;
}

int OrderTree::Rebalance(int node) {
  Pull(node);
  int balance = Height(left_[node]) - Height(right_[node]);
  if (balance > 1) {
    int l = left_[node];
    if (Height(left_[l]) < Height(right_[l])) left_[node] = RotateLeft(l);
    return RotateRight(node);
  }
  if (balance < -1) {
    int r = right_[node];
    if (Height(right_[r]) < Height(left_[r])) right_[node] = RotateRight(r);
    return RotateLeft(node);
  }
  return node;
}

int OrderTree::InsertAt(int node, Element e) {
  if (node < 0) {
    left_[e] = right_[e] = -1;
    Pull(e);
    return e;
  }
  if (Before(e, node)) {
    left_[node] = InsertAt(left_[node], e);
  } else {
    right_[node] = InsertAt(right_[node], e);
  }
  return Rebalance(node);
}

int OrderTree::EraseMinAt(int node, Element& min) {
  if (left_[node] < 0) {
    min = node;
    return right_[node];
  }
  left_[node] = EraseMinAt(left_[node], min);
  return Rebalance(node);
}

int OrderTree::EraseAt(int node, Element e) {
  if (node < 0) Fail("erasing an element that is not stored");
  if (node == e) {
    int l = left_[e];
    int r = right_[e];
    if (r < 0) return l;
    Element min = -1;
    int rest = EraseMinAt(r, min);
    left_[min] = l;
    right_[min] = rest;
    return Rebalance(min);
  }
  if (Before(e, node)) {
    left_[node] = EraseAt(left_[node], e);
  } else {
    right_[node] = EraseAt(right_[node], e);
  }
  return Rebalance(node);
}

void OrderTree::RepullPath(Element e) {
  int path[128];
  int depth = 0;
  int node = root_;
  while (node >= 0) {
    path[depth++] = node;
    if (node == e) break;
    node = Before(e, node) ? left_[node] : right_[node];
  }
  while (depth > 0) Pull(path[--depth]);
}

void OrderTree::Detach(Element e) {
  root_ = EraseAt(root_, e);
  --stored_;
  if (prev_[e] >= 0) {
    next_[prev_[e]] = next_[e];
  } else {
    head_ = next_[e];
  }
  if (next_[e] >= 0) prev_[next_[e]] = prev_[e];
  prev_[e] = next_[e] = -1;
}

void OrderTree::Attach(Element e) {
  // Predecessor among stored elements.
  int pred = -1;
  for (int node = root_; node >= 0;) {
    if (Before(node, e)) {
      pred = node;
      node = right_[node];
    } else {
      node = left_[node];
    }
  }
  root_ = InsertAt(root_, e);
  ++stored_;
  prev_[e] = pred;
  next_[e] = pred >= 0 ? next_[pred] : head_;
  if (next_[e] >= 0) prev_[next_[e]] = e;
  if (pred >= 0) {
    next_[pred] = e;
  } else {
    head_ = e;
  }
}

int OrderTree::CountBefore(double k, Element id) const {
  int count = 0;
  for (int node = root_; node >= 0;) {
    if (BeforeKey(k, id, key_[node], node)) {
      node = left_[node];
    } else {
      count += Size(left_[node]) + 1;
      node = right_[node];
    }
  }
  return count;
}

int OrderTree::RankOf(Element i) const {
  if (i < 0 || i >= n_) throw DomainError("OrderTree::RankOf: bad element");
  int rank = 0;
  int node = root_;
  while (node >= 0 && node != i) {
    if (Before(i, node)) {
      node = left_[node];
    } else {
      rank += Size(left_[node]) + 1;
      node = right_[node];
    }
  }
  if (node < 0) throw DomainError("OrderTree::RankOf: element not stored");
  return rank + Size(left_[node]);
}

Element OrderTree::AtRank(int rank) const {
  if (rank < 0 || rank >= stored_) {
    throw DomainError("OrderTree::AtRank: rank out of range");
  }
  int node = root_;
  for (;;) {
    int l = Size(left_[node]);
    if (rank < l) {
      node = left_[node];
    } else if (rank == l) {
      return node;
    } else {
      rank -= l + 1;
      node = right_[node];
    }
  }
}

Permutation OrderTree::permutation() const {
  Permutation out;
  out.reserve(stored_);
  for (Element e = head_; e >= 0; e = next_[e]) out.push_back(e);
  return out;
}

void OrderTree::SetGradient(Element e, double value) {
  g_[e] = value;
  bool nonzero = value != 0.0;
  if (nonzero == static_cast<bool>(in_nz_[e])) return;
  if (nonzero) {
    nz_prev_[e] = -1;
    nz_next_[e] = nz_head_;
    if (nz_head_ >= 0) nz_prev_[nz_head_] = e;
    nz_head_ = e;
  } else {
    if (nz_prev_[e] >= 0) {
      nz_next_[nz_prev_[e]] = nz_next_[e];
    } else {
      nz_head_ = nz_next_[e];
    }
    if (nz_next_[e] >= 0) nz_prev_[nz_next_[e]] = nz_prev_[e];
    nz_prev_[e] = nz_next_[e] = -1;
  }
  in_nz_[e] = nonzero ? 1 : 0;
}

SparseVector OrderTree::SparseGradient() const {
  std::vector<SparseEntry> entries;
  for (int e = nz_head_; e >= 0; e = nz_next_[e]) entries.push_back({e, g_[e]});
  return SparseVector::FromEntries(std::move(entries));
}

std::vector<double> OrderTree::DenseGradient() const { return g_; }

std::vector<Element> OrderTree::NonzeroList() const {
  std::vector<Element> out;
  for (int e = nz_head_; e >= 0; e = nz_next_[e]) out.push_back(e);
  std::sort(out.begin(), out.end());
  return out;
}

bool OrderTree::SumsMatch(double stored, double truth) const {
  if (options_.prune_tolerance == 0.0) return stored == truth;
  return std::abs(stored - truth) <= options_.prune_tolerance;
}

void OrderTree::InvalidateCache() {
  if (++stamp_ == 0) {
    std::fill(memo_stamp_.begin(), memo_stamp_.end(), 0);
    stamp_ = 1;
  }
}

double OrderTree::CachedPrefixValue(int k) {
  if (memo_stamp_[k] != stamp_) {
    memo_value_[k] = k == 0 ? 0.0 : oracle_->EvaluatePrefix(Prefix(*this, k));
    memo_stamp_[k] = stamp_;
  }
  return memo_value_[k];
}

double OrderTree::EditedKey(Element i, double delta) const {
  double next = key_[i] + delta;
  if (options_.unit_box) {
    if (next < 0.0 && next >= -kSnap) next = 0.0;
    if (next > 1.0 && next <= 1.0 + kSnap) next = 1.0;
    if (!(next >= 0.0 && next <= 1.0)) {
      throw DomainError("OrderTree: x + e leaves [0,1]^n");
    }
  } else if (!std::isfinite(next)) {
    throw DomainError("OrderTree: non-finite key");
  }
  return next;
}

OrderTree::UpdateStats OrderTree::ApplyUpdateExact(const SparseVector& e) {
  if (!options_.track_gradient) {
    throw std::logic_error("ApplyUpdateExact on a non-tracking OrderTree");
  }
  std::vector<SparseEntry> up;
  std::vector<SparseEntry> down;
  for (const SparseEntry& entry : e.entries()) {
    if (entry.index < 0 || entry.index >= n_) {
      throw DomainError("ApplyUpdateExact: coordinate out of range");
    }
    double next = EditedKey(entry.index, entry.value);
    if (next > key_[entry.index]) {
      up.push_back({entry.index, next});
    } else if (next < key_[entry.index]) {
      down.push_back({entry.index, next});
    }
  }
  UpdateStats stats;
  ApplySignUniform(up, stats);
  ApplySignUniform(down, stats);
  return stats;
}

void OrderTree::MoveKeys(const SparseVector& e) {
  if (options_.track_gradient) {
    throw std::logic_error("MoveKeys on a gradient-tracking OrderTree");
  }
  std::vector<SparseEntry> moved;
  for (const SparseEntry& entry : e.entries()) {
    if (entry.index < 0 || entry.index >= n_) {
      throw DomainError("MoveKeys: coordinate out of range");
    }
    double next = EditedKey(entry.index, entry.value);
    if (next != key_[entry.index]) moved.push_back({entry.index, next});
  }
  for (const SparseEntry& entry : moved) {
    Detach(entry.index);
    key_[entry.index] = entry.value;
    Attach(entry.index);
  }
}

void OrderTree::ApplySignUniform(std::span<const SparseEntry> new_keys,
                                 UpdateStats& stats) {
  if (new_keys.empty()) return;
  for (const SparseEntry& entry : new_keys) {
    Detach(entry.index);
    key_[entry.index] = entry.value;
    Attach(entry.index);
  }
  InvalidateCache();
  oracle_->NoteSubgradient();
  for (const SparseEntry& entry : new_keys) {
    Element i = entry.index;
    int r = RankOf(i);
    double value = CachedPrefixValue(r + 1) - CachedPrefixValue(r);
    ++stats.touched;
    if (value != g_[i]) ++stats.changed;
    SetGradient(i, value);
    RepullPath(i);
  }
  Descend(root_, 0, stats);
}

void OrderTree::Descend(int node, int offset, UpdateStats& stats) {
  if (node < 0) return;
  ++stats.visited;
  double truth =
      CachedPrefixValue(offset + size_[node]) - CachedPrefixValue(offset);
  if (SumsMatch(sum_[node], truth)) {
    ++stats.pruned;
    if (options_.record_pruned) {
      stats.pruned_subtrees.emplace_back();
      CollectSubtree(node, stats.pruned_subtrees.back());
    }
    return;
  }
  Descend(left_[node], offset, stats);
  int rank = offset + Size(left_[node]);
  double value = CachedPrefixValue(rank + 1) - CachedPrefixValue(rank);
  if (value != g_[node]) ++stats.changed;
  SetGradient(node, value);
  Descend(right_[node], rank + 1, stats);
  Pull(node);
}

void OrderTree::CollectSubtree(int node, std::vector<Element>& out) const {
  if (node < 0) return;
  CollectSubtree(left_[node], out);
  out.push_back(node);
  CollectSubtree(right_[node], out);
}

double OrderTree::IntervalSum(int a, int b) {
  if (a < 1 || b < a || b > n_) {
    throw DomainError("IntervalSum: need 1 <= a <= b <= n");
  }
  double hi = oracle_->EvaluatePrefix(Prefix(*this, b));
  double lo = oracle_->EvaluatePrefix(Prefix(*this, a - 1));
  return hi - lo;
}

bool OrderTree::ShiftPositiveKeys(double delta) {
  if (delta == 0.0) return true;
  auto shifted = [&](Element e) {
    return key_[e] > 0.0 ? key_[e] - delta : key_[e];
  };
  for (Element e = head_; e >= 0; e = next_[e]) {
    if (key_[e] > 0.0 && !(shifted(e) > 0.0)) return false;
    Element f = next_[e];
    if (f >= 0 && !BeforeKey(shifted(e), e, shifted(f), f)) return false;
  }
  for (Element e = 0; e < n_; ++e) key_[e] = shifted(e);
  return true;
}

void OrderTree::CheckInvariants() const {
  if (stored_ != n_) Fail("detached elements present");
  std::vector<Element> inorder;
  inorder.reserve(n_);
  CollectSubtree(root_, inorder);
  if (inorder != ConsistentPermutation(key_)) {
    Fail("in-order traversal is not the consistent permutation");
  }
  if (permutation() != inorder) Fail("order list disagrees with the tree");
  for (Element e = head_; e >= 0; e = next_[e]) {
    if (next_[e] >= 0 && prev_[next_[e]] != e) Fail("order list back-links");
  }
  for (Element e = 0; e < n_; ++e) {
    int l = left_[e];
    int r = right_[e];
    if (height_[e] != 1 + std::max(Height(l), Height(r))) Fail("height");
    if (std::abs(Height(l) - Height(r)) > 1) Fail("AVL balance");
    if (size_[e] != 1 + Size(l) + Size(r)) Fail("subtree size");
    if (options_.track_gradient && sum_[e] != Sum(l) + g_[e] + Sum(r)) {
      Fail("subtree gradient sum");
    }
  }
  if (options_.track_gradient) {
    std::vector<Element> nz = NonzeroList();
    std::vector<Element> expected;
    for (Element e = 0; e < n_; ++e) {
      if (g_[e] != 0.0) expected.push_back(e);
    }
    if (nz != expected) Fail("nonzero list");
  }
}

}  // namespace sfm
