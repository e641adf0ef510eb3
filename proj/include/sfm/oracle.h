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

// Evaluation-oracle contract and the concrete submodular instances.
//
// Every query is phrased the way the evaluation-oracle model phrases it: a
// permutation of the ground set together with a prefix length k, answered
// with f(P[k]). Instances are immutable after construction and may be shared
// between threads; all per-run state (counters, the cached f(empty)) lives in
// a CountingOracle, which is owned by exactly one run.

#ifndef SFM_ORACLE_H_
#define SFM_ORACLE_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sfm/sparse_vector.h"
#include "sfm/types.h"

namespace sfm {

// Read-only view of a prefix P[k] of some permutation.
class PrefixView {
 public:
  virtual ~PrefixView() = default;

  virtual int ground_size() const = 0;
  // k, the number of elements in the prefix.
  virtual int length() const = 0;
  virtual bool Contains(Element e) const = 0;
  // Appends the k members to `out`.
  virtual void AppendMembers(std::vector<Element>& out) const = 0;
};

// Prefix of an explicit permutation with its inverse.
class PermutationPrefix final : public PrefixView {
 public:
  // rank[order[j]] == j for all j.
  PermutationPrefix(std::span<const Element> order, std::span<const int> rank,
                    int k)
      : order_(order), rank_(rank), k_(k) {}

  int ground_size() const override { return static_cast<int>(order_.size()); }
  int length() const override { return k_; }
  bool Contains(Element e) const override { return rank_[e] < k_; }
  void AppendMembers(std::vector<Element>& out) const override {
    out.insert(out.end(), order_.begin(), order_.begin() + k_);
  }

 private:
  std::span<const Element> order_;
  std::span<const int> rank_;
  int k_;
};

enum class ValueKind { kInteger, kReal };

class SubmodularInstance {
 public:
  virtual ~SubmodularInstance() = default;

  virtual int ground_size() const = 0;
  // Raw value of the prefix set; normalization happens in CountingOracle.
  virtual double EvaluateRaw(const PrefixView& prefix) const = 0;
  virtual ValueKind value_kind() const = 0;
  // Certified M with |f(S) - f(empty)| <= M for every S.
  virtual double bound() const = 0;
  // False when the instance must be observed without subtracting f(empty).
  virtual bool normalized() const { return true; }
  virtual std::string description() const = 0;
};

// Explicit value table indexed by bitmask (bit i <-> element i). n <= 20.
class TableInstance final : public SubmodularInstance {
 public:
  static constexpr int kMaxSize = 20;

  TableInstance(int n, std::vector<double> values);

  // Raw values of `instance` on all 2^n subsets.
  static TableInstance Tabulate(const SubmodularInstance& instance);

  int ground_size() const override { return n_; }
  double EvaluateRaw(const PrefixView& prefix) const override;
  ValueKind value_kind() const override { return kind_; }
  double bound() const override { return bound_; }
  std::string description() const override;

  std::span<const double> values() const { return values_; }

 private:
  int n_;
  std::vector<double> values_;
  ValueKind kind_;
  double bound_;
};

// f(S) = sum_{i in S} c_i.
class ModularInstance final : public SubmodularInstance {
 public:
  explicit ModularInstance(std::vector<double> weights);

  int ground_size() const override {
    return static_cast<int>(weights_.size());
  }
  double EvaluateRaw(const PrefixView& prefix) const override;
  ValueKind value_kind() const override { return kind_; }
  double bound() const override { return bound_; }
  std::string description() const override;

 private:
  std::vector<double> weights_;
  ValueKind kind_;
  double bound_;
};

struct WeightedEdge {
  int from;
  int to;
  double weight;

  friend bool operator==(const WeightedEdge&, const WeightedEdge&) = default;
};

// Directed s-t cut function over A = V \ {s, t}: f(S) is the weight of the
// edges leaving S + {s}. Element i is the i-th vertex of A in id order.
class CutInstance final : public SubmodularInstance {
 public:
  CutInstance(int num_vertices, int source, int sink,
              std::vector<WeightedEdge> edges);

  int ground_size() const override {
    return static_cast<int>(vertex_of_.size());
  }
  double EvaluateRaw(const PrefixView& prefix) const override;
  ValueKind value_kind() const override { return kind_; }
  double bound() const override { return total_weight_; }
  std::string description() const override;

  int num_vertices() const { return num_vertices_; }
  int source() const { return source_; }
  int sink() const { return sink_; }
  std::span<const WeightedEdge> edges() const { return edges_; }
  double total_weight() const { return total_weight_; }
  // -1 for the terminals.
  Element element_of(int vertex) const { return element_of_[vertex]; }
  int vertex_of(Element e) const { return vertex_of_[e]; }

  // Raw weight leaving `s_side` + {s}; s_side[e] marks element e.
  double CutWeight(std::span<const char> s_side) const;

 private:
  int num_vertices_;
  int source_;
  int sink_;
  std::vector<WeightedEdge> edges_;
  std::vector<Element> element_of_;
  std::vector<int> vertex_of_;
  double total_weight_ = 0.0;
  ValueKind kind_ = ValueKind::kInteger;
};

// The hard family f_R: -1 on R, 0 on strict subsets and supersets of R, 1
// elsewhere. With R empty the raw f(empty) is -1 and the instance reports
// normalized() == false.
class LowerBoundInstance final : public SubmodularInstance {
 public:
  LowerBoundInstance(int n, std::vector<Element> hidden);

  int ground_size() const override { return n_; }
  double EvaluateRaw(const PrefixView& prefix) const override;
  ValueKind value_kind() const override { return ValueKind::kInteger; }
  double bound() const override { return 1.0; }
  bool normalized() const override { return !hidden_.empty(); }
  std::string description() const override;

  std::span<const Element> hidden() const { return hidden_; }
  bool in_hidden(Element e) const { return member_[e] != 0; }

 private:
  int n_;
  std::vector<Element> hidden_;
  std::vector<char> member_;
};

// factor * inner.
class ScaledInstance final : public SubmodularInstance {
 public:
  ScaledInstance(std::shared_ptr<const SubmodularInstance> inner,
                 double factor);

  int ground_size() const override { return inner_->ground_size(); }
  double EvaluateRaw(const PrefixView& prefix) const override {
    return factor_ * inner_->EvaluateRaw(prefix);
  }
  ValueKind value_kind() const override;
  double bound() const override;
  bool normalized() const override { return inner_->normalized(); }
  std::string description() const override;

 private:
  std::shared_ptr<const SubmodularInstance> inner_;
  double factor_;
};

struct OracleGuards {
  // Throw ContractViolation on a non-integer normalized value.
  bool require_integer = false;
  // Throw ContractViolation on a positive normalized value.
  bool require_nonpositive = false;
};

// Per-run wrapper: normalization, query accounting and value guards.
// Single-writer; give every concurrent run its own CountingOracle.
class CountingOracle {
 public:
  explicit CountingOracle(const SubmodularInstance& instance,
                          OracleGuards guards = {});

  const SubmodularInstance& instance() const { return *instance_; }
  int ground_size() const { return instance_->ground_size(); }

  // Normalized f(P[k]). The first call also queries f(empty) once.
  double EvaluatePrefix(const PrefixView& prefix);
  // Convenience wrapper: evaluates the set as a prefix of a permutation that
  // lists `members` first.
  double EvaluateSet(std::span<const Element> members);

  void NoteSubgradient() { ++subgradient_calls_; }

  // Number of EvaluatePrefix/EvaluateSet invocations.
  std::uint64_t eval_calls() const { return eval_calls_; }
  // Queries forwarded to the instance (eval_calls plus the f(empty) cache).
  std::uint64_t raw_queries() const { return raw_queries_; }
  std::uint64_t subgradient_calls() const { return subgradient_calls_; }

 private:
  double Offset(const PrefixView& any_prefix);

  const SubmodularInstance* instance_;
  OracleGuards guards_;
  std::optional<double> empty_value_;
  std::uint64_t eval_calls_ = 0;
  std::uint64_t raw_queries_ = 0;
  std::uint64_t subgradient_calls_ = 0;
};

// Normalized f(P[k]) for an explicit permutation; DomainError unless
// 0 <= k <= n and `perm` is a permutation of the ground set.
double EvaluatePrefix(CountingOracle& oracle, std::span<const Element> perm,
                      int k);

// Random integer-weighted digraph on n + 2 vertices (terminals s = n,
// t = n + 1): each useful ordered pair gets an edge with probability
// `density` and weight uniform in [1, weight_max].
CutInstance RandomCutInstance(int n, double density, int weight_max,
                              std::uint64_t seed);

// Random digraph whose total weight is exactly `total_weight`; edges are
// drawn uniformly among useful pairs with weights in [1, weight_max],
// the last one truncated to fit.
CutInstance RandomBudgetCutInstance(int n, int total_weight, int weight_max,
                                    std::uint64_t seed);

// f_R over [n]; `hidden` lists 0-based elements of R.
LowerBoundInstance MakeLowerBoundInstance(std::vector<Element> hidden, int n);

}  // namespace sfm

#endif  // SFM_ORACLE_H_
