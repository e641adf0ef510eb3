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

#include "sfm/oracle.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <utility>

namespace sfm {
namespace {

class EmptyPrefix final : public PrefixView {
 public:
  explicit EmptyPrefix(int n) : n_(n) {}
  int ground_size() const override { return n_; }
  int length() const override { return 0; }
  bool Contains(Element) const override { return false; }
  void AppendMembers(std::vector<Element>&) const override {}

 private:
  int n_;
};

bool IsIntegral(double v) { return std::isfinite(v) && v == std::nearbyint(v); }

std::vector<Element>& MemberBuffer() {
  thread_local std::vector<Element> buffer;
  buffer.clear();
  return buffer;
}

}  // namespace

// ---------------------------------------------------------------------------
// TableInstance

TableInstance::TableInstance(int n, std::vector<double> values)
    : n_(n), values_(std::move(values)) {
  if (n < 1 || n > kMaxSize) {
    throw DomainError("table instances need 1 <= n <= 20, got " +
                      std::to_string(n));
  }
  if (values_.size() != (std::size_t{1} << n)) {
    throw DomainError("table of size " + std::to_string(values_.size()) +
                      " does not have 2^" + std::to_string(n) + " entries");
  }
  bool integral = true;
  bound_ = 0.0;
  for (double v : values_) {
    if (!std::isfinite(v)) throw DomainError("non-finite table value");
    integral = integral && IsIntegral(v);
    bound_ = std::max(bound_, std::abs(v - values_[0]));
  }
  kind_ = integral ? ValueKind::kInteger : ValueKind::kReal;
}

TableInstance TableInstance::Tabulate(const SubmodularInstance& instance) {
  const int n = instance.ground_size();
  if (n > kMaxSize) throw DomainError("cannot tabulate n > 20");
  std::vector<double> values(std::size_t{1} << n);
  std::vector<Element> order(n);
  std::vector<int> rank(n);
  for (std::uint32_t mask = 0; mask < values.size(); ++mask) {
    int k = 0;
    for (int i = 0; i < n; ++i) {
      if (mask >> i & 1u) order[k++] = i;
    }
    int tail = k;
    for (int i = 0; i < n; ++i) {
      if (!(mask >> i & 1u)) order[tail++] = i;
    }
    for (int j = 0; j < n; ++j) rank[order[j]] = j;
    values[mask] = instance.EvaluateRaw(PermutationPrefix(order, rank, k));
  }
  return TableInstance(n, std::move(values));
}

double TableInstance::EvaluateRaw(const PrefixView& prefix) const {
  std::vector<Element>& members = MemberBuffer();
  prefix.AppendMembers(members);
  std::uint32_t mask = 0;
  for (Element e : members) mask |= 1u << e;
  return values_[mask];
}

std::string TableInstance::description() const {
  return "table(n=" + std::to_string(n_) + ")";
}

// ---------------------------------------------------------------------------
// ModularInstance

ModularInstance::ModularInstance(std::vector<double> weights)
    : weights_(std::move(weights)) {
  if (weights_.empty()) throw DomainError("modular instance needs n >= 1");
  bool integral = true;
  double pos = 0.0;
  double neg = 0.0;
  for (double w : weights_) {
    integral = integral && IsIntegral(w);
    (w > 0 ? pos : neg) += std::abs(w);
  }
  kind_ = integral ? ValueKind::kInteger : ValueKind::kReal;
  bound_ = std::max(pos, neg);
}

double ModularInstance::EvaluateRaw(const PrefixView& prefix) const {
  std::vector<Element>& members = MemberBuffer();
  prefix.AppendMembers(members);
  double total = 0.0;
  for (Element e : members) total += weights_[e];
  return total;
}

std::string ModularInstance::description() const {
  return "modular(n=" + std::to_string(weights_.size()) + ")";
}

// ---------------------------------------------------------------------------
// CutInstance

CutInstance::CutInstance(int num_vertices, int source, int sink,
                         std::vector<WeightedEdge> edges)
    : num_vertices_(num_vertices),
      source_(source),
      sink_(sink),
      edges_(std::move(edges)) {
  if (num_vertices < 3) {
    throw DomainError("cut instance needs at least one non-terminal vertex");
  }
  if (source < 0 || source >= num_vertices || sink < 0 ||
      sink >= num_vertices || source == sink) {
    throw DomainError("invalid terminals s=" + std::to_string(source) +
                      " t=" + std::to_string(sink));
  }
  element_of_.assign(num_vertices, -1);
  for (int v = 0; v < num_vertices; ++v) {
    if (v == source || v == sink) continue;
    element_of_[v] = static_cast<Element>(vertex_of_.size());
    vertex_of_.push_back(v);
  }
  for (const WeightedEdge& e : edges_) {
    if (e.from < 0 || e.from >= num_vertices || e.to < 0 ||
        e.to >= num_vertices) {
      throw DomainError("edge endpoint out of range");
    }
    if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) {
      throw DomainError("edge weights must be finite and nonnegative");
    }
    if (!IsIntegral(e.weight)) kind_ = ValueKind::kReal;
    total_weight_ += e.weight;
  }
}

double CutInstance::EvaluateRaw(const PrefixView& prefix) const {
  const int k = prefix.length();
  const double probe_cost =
      static_cast<double>(edges_.size()) *
      std::max(1, static_cast<int>(std::bit_width(
                      static_cast<unsigned>(vertex_of_.size()))));
  double total = 0.0;
  if (probe_cost < k) {
    auto in_side = [&](int v) {
      if (v == source_) return true;
      if (v == sink_) return false;
      return prefix.Contains(element_of_[v]);
    };
    for (const WeightedEdge& e : edges_) {
      if (in_side(e.from) && !in_side(e.to)) total += e.weight;
    }
    return total;
  }
  thread_local std::vector<char> mark;
  if (mark.size() < static_cast<std::size_t>(num_vertices_)) {
    mark.resize(num_vertices_, 0);
  }
  std::vector<Element>& members = MemberBuffer();
  prefix.AppendMembers(members);
  mark[source_] = 1;
  for (Element e : members) mark[vertex_of_[e]] = 1;
  for (const WeightedEdge& e : edges_) {
    if (mark[e.from] && !mark[e.to]) total += e.weight;
  }
  mark[source_] = 0;
  for (Element e : members) mark[vertex_of_[e]] = 0;
  return total;
}

double CutInstance::CutWeight(std::span<const char> s_side) const {
  auto in_side = [&](int v) {
    if (v == source_) return true;
    if (v == sink_) return false;
    return s_side[element_of_[v]] != 0;
  };
  double total = 0.0;
  for (const WeightedEdge& e : edges_) {
    if (in_side(e.from) && !in_side(e.to)) total += e.weight;
  }
  return total;
}

std::string CutInstance::description() const {
  std::ostringstream out;
  out << "cut(n=" << ground_size() << ", edges=" << edges_.size()
      << ", W=" << total_weight_ << ")";
  return out.str();
}

// ---------------------------------------------------------------------------
// LowerBoundInstance

LowerBoundInstance::LowerBoundInstance(int n, std::vector<Element> hidden)
    : n_(n), hidden_(std::move(hidden)), member_(n, 0) {
  if (n < 1) throw DomainError("lower-bound instance needs n >= 1");
  std::sort(hidden_.begin(), hidden_.end());
  hidden_.erase(std::unique(hidden_.begin(), hidden_.end()), hidden_.end());
  for (Element e : hidden_) {
    if (e < 0 || e >= n) {
      throw DomainError("hidden element " + std::to_string(e + 1) +
                        " outside [n]");
    }
    member_[e] = 1;
  }
}

double LowerBoundInstance::EvaluateRaw(const PrefixView& prefix) const {
  std::vector<Element>& members = MemberBuffer();
  prefix.AppendMembers(members);
  const std::size_t k = members.size();
  std::size_t inside = 0;
  for (Element e : members) inside += member_[e];
  const bool subset = inside == k;
  const bool superset = inside == hidden_.size();
  if (subset && superset) return -1.0;
  if (subset || superset) return 0.0;
  return 1.0;
}

std::string LowerBoundInstance::description() const {
  return "lower_bound(n=" + std::to_string(n_) +
         ", |R|=" + std::to_string(hidden_.size()) + ")";
}

// ---------------------------------------------------------------------------
// ScaledInstance

ScaledInstance::ScaledInstance(std::shared_ptr<const SubmodularInstance> inner,
                               double factor)
    : inner_(std::move(inner)), factor_(factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw DomainError("scale factor must be positive and finite");
  }
}

ValueKind ScaledInstance::value_kind() const {
  const bool integral_factor = factor_ == std::round(factor_);
  return integral_factor ? inner_->value_kind() : ValueKind::kReal;
}

double ScaledInstance::bound() const { return factor_ * inner_->bound(); }

std::string ScaledInstance::description() const {
  std::ostringstream out;
  out << factor_ << " * " << inner_->description();
  return out.str();
}

// ---------------------------------------------------------------------------
// CountingOracle

CountingOracle::CountingOracle(const SubmodularInstance& instance,
                               OracleGuards guards)
    : instance_(&instance), guards_(guards) {}

double CountingOracle::Offset(const PrefixView& any_prefix) {
  if (!instance_->normalized()) return 0.0;
  if (!empty_value_) {
    ++raw_queries_;
    empty_value_ =
        instance_->EvaluateRaw(EmptyPrefix(any_prefix.ground_size()));
  }
  return *empty_value_;
}

double CountingOracle::EvaluatePrefix(const PrefixView& prefix) {
  ++eval_calls_;
  const double offset = Offset(prefix);
  ++raw_queries_;
  const double value = instance_->EvaluateRaw(prefix) - offset;
  if (guards_.require_integer && !IsIntegral(value)) {
    std::ostringstream msg;
    msg << "exact mode requires integer values, oracle returned " << value;
    throw ContractViolation(msg.str());
  }
  if (guards_.require_nonpositive &&
      value > 1e-12 * (1.0 + instance_->bound())) {
    std::ostringstream msg;
    msg << "multiplicative mode requires f <= 0, oracle returned " << value;
    throw ContractViolation(msg.str());
  }
  return value;
}

double CountingOracle::EvaluateSet(std::span<const Element> members) {
  const int n = ground_size();
  std::vector<int> rank(n, -1);
  std::vector<Element> order;
  order.reserve(n);
  for (Element e : members) {
    if (e < 0 || e >= n) {
      throw DomainError("element " + std::to_string(e) + " outside ground set");
    }
    if (rank[e] >= 0) throw DomainError("duplicate element in set");
    rank[e] = static_cast<int>(order.size());
    order.push_back(e);
  }
  const int k = static_cast<int>(order.size());
  for (Element e = 0; e < n; ++e) {
    if (rank[e] < 0) {
      rank[e] = static_cast<int>(order.size());
      order.push_back(e);
    }
  }
  return EvaluatePrefix(PermutationPrefix(order, rank, k));
}

double EvaluatePrefix(CountingOracle& oracle, std::span<const Element> perm,
                      int k) {
  const int n = oracle.ground_size();
  if (static_cast<int>(perm.size()) != n) {
    throw DomainError("permutation has wrong length");
  }
  if (k < 0 || k > n) {
    throw DomainError("prefix length " + std::to_string(k) +
                      " outside [0, " + std::to_string(n) + "]");
  }
  std::vector<int> rank(n, -1);
  for (int j = 0; j < n; ++j) {
    const Element e = perm[j];
    if (e < 0 || e >= n || rank[e] >= 0) {
      throw DomainError("not a permutation of the ground set");
    }
    rank[e] = j;
  }
  return oracle.EvaluatePrefix(PermutationPrefix(perm, rank, k));
}

// ---------------------------------------------------------------------------
// Generators

namespace {

// Ordered pairs (u, v) whose edge can ever cross a cut: u != t, v != s.
std::vector<std::pair<int, int>> UsefulPairs(int n) {
  const int s = n;
  const int t = n + 1;
  std::vector<std::pair<int, int>> pairs;
  for (int u = 0; u < n + 2; ++u) {
    if (u == t) continue;
    for (int v = 0; v < n + 2; ++v) {
      if (v == u || v == s) continue;
      pairs.emplace_back(u, v);
    }
  }
  return pairs;
}

}  // namespace

CutInstance RandomCutInstance(int n, double density, int weight_max,
                              std::uint64_t seed) {
  if (n < 1) throw DomainError("random_cut_instance needs n >= 1");
  if (!(density > 0.0 && density <= 1.0)) {
    throw DomainError("density must lie in (0, 1]");
  }
  if (weight_max < 1) throw DomainError("weight_max must be positive");
  Rng rng(seed);
  std::bernoulli_distribution keep(density);
  std::uniform_int_distribution<int> weight(1, weight_max);
  std::vector<WeightedEdge> edges;
  for (const auto& [u, v] : UsefulPairs(n)) {
    if (keep(rng)) edges.push_back({u, v, static_cast<double>(weight(rng))});
  }
  return CutInstance(n + 2, n, n + 1, std::move(edges));
}

CutInstance RandomBudgetCutInstance(int n, int total_weight, int weight_max,
                                    std::uint64_t seed) {
  if (n < 1) throw DomainError("random_cut_instance needs n >= 1");
  if (total_weight < 0) throw DomainError("total weight must be >= 0");
  if (weight_max < 1) throw DomainError("weight_max must be positive");
  Rng rng(seed);
  std::uniform_int_distribution<int> tail(0, n);      // A + {s}
  std::uniform_int_distribution<int> head_pick(0, n);  // A + {t}
  std::uniform_int_distribution<int> weight(1, weight_max);
  std::map<std::pair<int, int>, double> chosen;
  int remaining = total_weight;
  while (remaining > 0) {
    const int u = tail(rng);
    int v = head_pick(rng);
    if (v == n) v = n + 1;
    if (u == v) continue;
    const int w = std::min(weight(rng), remaining);
    chosen[{u, v}] += w;
    remaining -= w;
  }
  std::vector<WeightedEdge> edges;
  for (const auto& [uv, w] : chosen) edges.push_back({uv.first, uv.second, w});
  return CutInstance(n + 2, n, n + 1, std::move(edges));
}

LowerBoundInstance MakeLowerBoundInstance(std::vector<Element> hidden, int n) {
  return LowerBoundInstance(n, std::move(hidden));
}

}  // namespace sfm
