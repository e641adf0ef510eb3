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

// OrderTree: an AVL tree over the coordinates keyed by (x_i descending,
// i ascending). In-order traversal is the consistent permutation of x. Each
// node carries its own Lovasz subgradient entry g_i and the sum of g over
// its subtree; a doubly-linked order list mirrors the in-order sequence and a
// second linked list holds the coordinates with g_i != 0.
//
// Every subtree covers a contiguous block of ranks, so its true gradient sum
// is f(P[b]) - f(P[a-1]): two oracle queries. ApplyUpdateExact uses this to
// find every changed coordinate after a sign-uniform edit by descending only
// into subtrees whose stored and true sums disagree. Untouched coordinates
// move monotonically under such an edit, so a matching sum certifies that
// nothing below changed.

#ifndef SFM_ORDER_TREE_H_
#define SFM_ORDER_TREE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "sfm/oracle.h"
#include "sfm/sparse_vector.h"

namespace sfm {

class DifferenceSampler;

class OrderTree {
 public:
  struct Options {
    // Maintain g and subtree sums. Trees used only for sampling skip this.
    bool track_gradient = true;
    // Keys must stay inside [0, 1]. Offset-encoded keys may exceed 1.
    bool unit_box = true;
    // Largest |stored - true| still treated as equal when pruning. Negative
    // selects 0 for integer instances and 1e-11 * (1 + M) otherwise.
    double prune_tolerance = -1.0;
    // Record the members of every pruned subtree in UpdateStats.
    bool record_pruned = false;
  };

  struct UpdateStats {
    int touched = 0;
    int visited = 0;
    int pruned = 0;
    // Coordinates whose stored gradient value changed.
    int changed = 0;
    std::vector<std::vector<Element>> pruned_subtrees;
  };

  // Prefix P[k] of the tree's current permutation.
  class Prefix final : public PrefixView {
   public:
    Prefix(const OrderTree& tree, int k) : tree_(&tree), k_(k) {}
    int ground_size() const override { return tree_->n_; }
    int length() const override { return k_; }
    bool Contains(Element e) const override { return tree_->RankOf(e) < k_; }
    void AppendMembers(std::vector<Element>& out) const override;

   private:
    const OrderTree* tree_;
    int k_;
  };

  // Builds the tree for `keys` and, when tracking, the exact gradient
  // (n + 1 queries through `oracle`, which must outlive the tree).
  OrderTree(CountingOracle& oracle, std::span<const double> keys,
            Options options);
  OrderTree(CountingOracle& oracle, std::span<const double> keys)
      : OrderTree(oracle, keys, Options{}) {}

  int size() const { return n_; }
  const Options& options() const { return options_; }
  CountingOracle& oracle() const { return *oracle_; }

  double key(Element i) const { return key_[i]; }
  std::span<const double> keys() const { return key_; }

  // 0-based rank in the permutation.
  int RankOf(Element i) const;
  Element AtRank(int rank) const;
  Permutation permutation() const;

  Element first() const { return head_; }
  Element next(Element i) const { return next_[i]; }
  Element prev(Element i) const { return prev_[i]; }

  bool tracks_gradient() const { return options_.track_gradient; }
  double gradient(Element i) const { return g_[i]; }
  // Sum of g over the whole tree; equals f([n]).
  double total_gradient() const { return root_ < 0 ? 0.0 : sum_[root_]; }
  SparseVector SparseGradient() const;
  std::vector<double> DenseGradient() const;
  std::vector<Element> NonzeroList() const;

  // x <- x + e, then repairs g. Mixed-sign edits are applied as the
  // nonnegative part followed by the nonpositive part. DomainError when
  // x + e leaves the key domain; the tree is left unchanged in that case.
  UpdateStats ApplyUpdateExact(const SparseVector& e);

  // x <- x + e without gradient maintenance; non-tracking trees only.
  void MoveKeys(const SparseVector& e);

  // sum_{i=a}^{b} g_{P_i} for 1-based ranks, from exactly two queries.
  double IntervalSum(int a, int b);

  // Subtracts delta from every positive key. Returns false, leaving the
  // tree untouched, if that would reorder elements or make a key <= 0.
  bool ShiftPositiveKeys(double delta);

  // Throws std::logic_error when a structural invariant is broken.
  void CheckInvariants() const;

 private:
  friend class DifferenceSampler;

  bool BeforeKey(double ka, Element a, double kb, Element b) const {
    return ka > kb || (ka == kb && a < b);
  }
  bool Before(Element a, Element b) const {
    return BeforeKey(key_[a], a, key_[b], b);
  }

  int Height(int node) const { return node < 0 ? 0 : height_[node]; }
  int Size(int node) const { return node < 0 ? 0 : size_[node]; }
  double Sum(int node) const { return node < 0 ? 0.0 : sum_[node]; }

  void Pull(int node);
  int RotateLeft(int node);
  int RotateRight(int node);
  int Rebalance(int node);
  int InsertAt(int node, Element e);
  int EraseAt(int node, Element e);
  int EraseMinAt(int node, Element& min);
  int BuildBalanced(std::span<const Element> order);
  void RepullPath(Element e);

  // Removes / restores an element in both the tree and the order list.
  void Detach(Element e);
  void Attach(Element e);
  // Number of stored elements preceding the key (k, id).
  int CountBefore(double k, Element id) const;

  // key_[i] + delta, snapped to and checked against the key domain.
  double EditedKey(Element i, double delta) const;
  void SetGradient(Element e, double value);
  bool SumsMatch(double stored, double truth) const;

  // Cached f(P[k]) for the current permutation, valid until InvalidateCache.
  double CachedPrefixValue(int k);
  void InvalidateCache();

  void ApplySignUniform(std::span<const SparseEntry> new_keys,
                        UpdateStats& stats);
  void Descend(int node, int offset, UpdateStats& stats);
  void CollectSubtree(int node, std::vector<Element>& out) const;

  CountingOracle* oracle_;
  Options options_;
  int n_;
  int root_ = -1;
  int stored_ = 0;

  std::vector<double> key_;
  std::vector<int> left_;
  std::vector<int> right_;
  std::vector<int> height_;
  std::vector<int> size_;
  std::vector<double> g_;
  std::vector<double> sum_;

  // In-order list.
  std::vector<int> prev_;
  std::vector<int> next_;
  int head_ = -1;

  // Coordinates with g != 0.
  std::vector<int> nz_prev_;
  std::vector<int> nz_next_;
  std::vector<char> in_nz_;
  int nz_head_ = -1;

  // Per-update memo of prefix values.
  std::vector<double> memo_value_;
  std::vector<std::uint32_t> memo_stamp_;
  std::uint32_t stamp_ = 1;

  // Scratch slot per element for the sampler; -1 when unused.
  std::vector<int> slot_;
};

}  // namespace sfm

#endif  // SFM_ORDER_TREE_H_
