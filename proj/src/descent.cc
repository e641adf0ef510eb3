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

#include "sfm/descent.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>

#include "sfm/difference_sampler.h"

namespace sfm {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double Clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// The key a tree ends up with after adding `delta` to `key`.
double AppliedKey(double key, double delta, bool unit_box) {
  double next = key + delta;
  return unit_box ? Clamp01(next) : next;
}

// Slope events of lambda -> median(0, y - lambda, 1) for lambda > 0.
// Returns the number of pieces already decreasing at lambda = 0.
int AddCapEvents(double y, std::vector<std::pair<double, int>>& events) {
  if (y > 1.0) {
    events.push_back({y - 1.0, -1});
    events.push_back({y, +1});
    return 0;
  }
  if (y > 0.0) {
    events.push_back({y, +1});
    return 1;
  }
  return 0;
}

}  // namespace

StepSchedule TheoremSchedule(double r_squared, double b_squared,
                             std::int64_t iterations) {
  if (!(r_squared > 0) || !(b_squared > 0) || iterations < 1) {
    throw DomainError("TheoremSchedule: need R^2 > 0, B^2 > 0, T >= 1");
  }
  double eta = std::sqrt(r_squared / b_squared) *
               std::sqrt(2.0 / static_cast<double>(iterations));
  return {eta, iterations};
}

SparseVector ProjectBoxEdit(std::span<const double> x, const SparseVector& g,
                            double eta) {
  std::vector<SparseEntry> out;
  out.reserve(g.nnz());
  for (const SparseEntry& entry : g.entries()) {
    double xi = x[entry.index];
    double next = Clamp01(xi - eta * entry.value);
    out.push_back({entry.index, next - xi});
  }
  return SparseVector::FromEntries(std::move(out));
}

SparseCapProjection ProjectSparseCap(std::span<const double> y, double s) {
  if (!(s >= 0.0)) throw DomainError("ProjectSparseCap: s must be >= 0");
  SparseCapProjection out;
  double value = 0.0;
  for (double yi : y) value += Clamp01(yi);
  if (value > s) {
    std::vector<std::pair<double, int>> events;
    int active = 0;
    for (double yi : y) active += AddCapEvents(yi, events);
    std::sort(events.begin(), events.end());
    double slope = -active;
    double at = 0.0;
    out.lambda = kInf;
    for (const auto& [point, delta] : events) {
      if (slope < 0) {
        double cross = at + (value - s) / -slope;
        if (cross <= point) {
          out.lambda = cross;
          break;
        }
      }
      value += slope * (point - at);
      at = point;
      slope += delta;
    }
    if (out.lambda == kInf) out.lambda = at;
  }
  out.z.reserve(y.size());
  for (double yi : y) out.z.push_back(Clamp01(yi - out.lambda));
  return out;
}

// ---------------------------------------------------------------------------
// SparseCapState

SparseCapState::SparseCapState(int n, double s)
    : cap_(s), keys_(n, 0.0), positive_flag_(n, 0) {
  if (!(s >= 0.0)) throw DomainError("sparse cap must be >= 0");
}

std::vector<double> SparseCapState::Values() const {
  std::vector<double> out(keys_.size());
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    out[i] = value(static_cast<Element>(i));
  }
  return out;
}

SparseCapState::StepResult SparseCapState::Step(const SparseVector& g,
                                                double eta) {
  struct Touched {
    Element i;
    double y;
  };
  std::vector<Touched> touched;
  touched.reserve(g.nnz());
  for (const SparseEntry& entry : g.entries()) {
    Element i = entry.index;
    double x = value(i);
    if (positive_flag_[i]) {
      positive_.erase({keys_[i], i});
      positive_key_sum_ -= keys_[i];
      positive_flag_[i] = 0;
    }
    touched.push_back({i, x - eta * entry.value});
  }

  const double drifting = static_cast<double>(positive_.size());
  double value_at = positive_key_sum_ - theta_ * drifting;
  for (const Touched& t : touched) value_at += Clamp01(t.y);

  double lambda = 0.0;
  if (value_at > cap_) {
    std::vector<std::pair<double, int>> events;
    int active = static_cast<int>(positive_.size());
    for (const Touched& t : touched) active += AddCapEvents(t.y, events);
    std::sort(events.begin(), events.end());
    double slope = -active;
    double at = 0.0;
    auto it = positive_.begin();
    std::size_t next_event = 0;
    for (;;) {
      double pop_at = it != positive_.end() ? it->first - theta_ : kInf;
      double event_at =
          next_event < events.size() ? events[next_event].first : kInf;
      double point = std::max(at, std::min(pop_at, event_at));
      if (slope < 0) {
        double cross = at + (value_at - cap_) / -slope;
        if (cross <= point) {
          lambda = cross;
          break;
        }
      }
      if (point == kInf) {
        lambda = at;
        break;
      }
      value_at += slope * (point - at);
      at = point;
      if (pop_at <= event_at) {
        slope += 1;
        ++it;
      } else {
        slope += events[next_event].second;
        ++next_event;
      }
    }
  }

  const double theta_next = theta_ + lambda;
  StepResult out;
  out.lambda = lambda;
  std::vector<SparseEntry> edit;
  while (!positive_.empty() && positive_.begin()->first <= theta_next) {
    auto [key, i] = *positive_.begin();
    positive_.erase(positive_.begin());
    positive_key_sum_ -= key;
    positive_flag_[i] = 0;
    edit.push_back({i, -key});
    keys_[i] = 0.0;
    out.explicit_values.push_back({i, 0.0});
  }
  for (const Touched& t : touched) {
    double z = Clamp01(t.y - lambda);
    double old_key = keys_[t.i];
    double delta = (z > 0.0 ? z + theta_next : 0.0) - old_key;
    double key = old_key + delta;
    if (key <= theta_next) {
      delta = -old_key;
      key = 0.0;
    }
    keys_[t.i] = key;
    if (key > 0.0) {
      positive_flag_[t.i] = 1;
      positive_.insert({key, t.i});
      positive_key_sum_ += key;
    }
    if (delta != 0.0) edit.push_back({t.i, delta});
    out.explicit_values.push_back({t.i, key > 0.0 ? key - theta_next : 0.0});
  }
  theta_ = theta_next;
  out.key_edit = SparseVector::FromEntries(std::move(edit));
  return out;
}

double SparseCapState::Rebase() {
  double delta = theta_;
  std::set<std::pair<double, Element>> shifted;
  positive_key_sum_ = 0.0;
  for (const auto& [key, i] : positive_) {
    keys_[i] = key - delta;
    shifted.insert({keys_[i], i});
    positive_key_sum_ += keys_[i];
  }
  positive_.swap(shifted);
  theta_ = 0.0;
  return delta;
}

// ---------------------------------------------------------------------------
// LazyAverager

LazyAverager::LazyAverager(int n) : coords_(n) {}

double LazyAverager::SegmentSum(const Coordinate& c, std::int64_t count,
                                double phi_end) const {
  double total = c.base * static_cast<double>(count);
  if (c.drifting) total -= phi_end - c.phi_since;
  return total;
}

void LazyAverager::NextIterate(double shift) {
  phi_ += theta_;
  ++t_;
  theta_ += shift;
}

void LazyAverager::Set(Element i, double v, bool drifting) {
  Coordinate& c = coords_[i];
  c.acc += SegmentSum(c, t_ - c.since, phi_);
  c.since = t_;
  c.phi_since = phi_;
  c.drifting = drifting;
  c.base = drifting ? v + theta_ : v;
}

std::vector<double> LazyAverager::Mean() const {
  std::vector<double> out(coords_.size());
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    const Coordinate& c = coords_[i];
    double total = c.acc + SegmentSum(c, t_ - c.since + 1, phi_ + theta_);
    out[i] = total / static_cast<double>(t_);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Providers

void ExactProvider::Reset(std::span<const double> keys, bool unit_box) {
  unit_box_ = unit_box;
  OrderTree::Options options;
  options.unit_box = unit_box;
  tree_ = std::make_unique<OrderTree>(*oracle_, keys, options);
}

SparseVector ExactProvider::Estimate(Rng&) { return tree_->SparseGradient(); }

void ExactProvider::Apply(const SparseVector& key_edit, Rng&) {
  tree_->ApplyUpdateExact(key_edit);
}

void ExactProvider::ShiftPositiveKeys(double delta,
                                      std::span<const double> keys) {
  if (!tree_->ShiftPositiveKeys(delta)) Reset(keys, unit_box_);
}

BatchedSamplingProvider::BatchedSamplingProvider(CountingOracle& oracle,
                                                 int batch_length)
    : oracle_(&oracle), batch_length_(batch_length) {
  if (batch_length < 1) throw DomainError("batch length must be >= 1");
}

void BatchedSamplingProvider::Reset(std::span<const double> keys,
                                    bool unit_box) {
  unit_box_ = unit_box;
  OrderTree::Options options;
  options.unit_box = unit_box;
  options.track_gradient = false;
  tree_ = std::make_unique<OrderTree>(*oracle_, keys, options);
  step_ = 0;
  acc_.assign(keys.size(), 0.0);
  acc_support_.clear();
  in_support_.assign(keys.size(), 0);
}

void BatchedSamplingProvider::Accumulate(const SparseVector& z) {
  for (const SparseEntry& entry : z.entries()) {
    acc_[entry.index] += entry.value;
    if (!in_support_[entry.index]) {
      in_support_[entry.index] = 1;
      acc_support_.push_back(entry.index);
    }
  }
}

SparseVector BatchedSamplingProvider::Estimate(Rng& rng) {
  if (step_ == 0) {
    for (Element i : acc_support_) {
      acc_[i] = 0.0;
      in_support_[i] = 0;
    }
    acc_support_.clear();
    const int n = tree_->size();
    Permutation perm = tree_->permutation();
    std::vector<double> prefix = PrefixValues(*oracle_, perm, 0, n);
    oracle_->NoteSubgradient();
    std::vector<double> cumulative(n);
    double l1 = 0.0;
    for (int k = 0; k < n; ++k) {
      l1 += std::abs(prefix[k + 1] - prefix[k]);
      cumulative[k] = l1;
    }
    if (l1 > 0.0) {
      double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng) * l1;
      int k = static_cast<int>(
          std::upper_bound(cumulative.begin(), cumulative.end(), u) -
          cumulative.begin());
      k = std::min(k, n - 1);
      while (k > 0 && cumulative[k] == cumulative[k - 1]) --k;
      double gk = prefix[k + 1] - prefix[k];
      Accumulate(SparseVector::FromEntries({{perm[k], gk > 0 ? l1 : -l1}}));
    }
    ++batches_;
  }
  std::vector<SparseEntry> entries;
  entries.reserve(acc_support_.size());
  for (Element i : acc_support_) entries.push_back({i, acc_[i]});
  return SparseVector::FromEntries(std::move(entries));
}

void BatchedSamplingProvider::Apply(const SparseVector& key_edit, Rng& rng) {
  ++step_;
  if (step_ >= batch_length_) {
    // The next estimate starts a fresh batch; no samples are needed.
    tree_->MoveKeys(key_edit);
    step_ = 0;
    return;
  }
  for (const SparseVector& part :
       {key_edit.PositivePart(), key_edit.NegativePart()}) {
    if (part.empty()) continue;
    Accumulate(SampleDifference(*tree_, part, step_, rng).z);
  }
}

void BatchedSamplingProvider::ShiftPositiveKeys(double delta,
                                                std::span<const double> keys) {
  if (tree_->ShiftPositiveKeys(delta)) return;
  OrderTree::Options options;
  options.unit_box = unit_box_;
  options.track_gradient = false;
  tree_ = std::make_unique<OrderTree>(*oracle_, keys, options);
}

void FullSubgradientProvider::Reset(std::span<const double> keys,
                                    bool unit_box) {
  unit_box_ = unit_box;
  keys_.assign(keys.begin(), keys.end());
}

SparseVector FullSubgradientProvider::Estimate(Rng&) {
  const int n = static_cast<int>(keys_.size());
  Permutation perm = ConsistentPermutation(keys_);
  std::vector<double> prefix = PrefixValues(*oracle_, perm, 0, n);
  oracle_->NoteSubgradient();
  std::vector<double> g(n);
  for (int k = 0; k < n; ++k) g[perm[k]] = prefix[k + 1] - prefix[k];
  return SparseVector::FromDense(g);
}

void FullSubgradientProvider::Apply(const SparseVector& key_edit, Rng&) {
  for (const SparseEntry& entry : key_edit.entries()) {
    keys_[entry.index] =
        AppliedKey(keys_[entry.index], entry.value, unit_box_);
  }
}

void FullSubgradientProvider::ShiftPositiveKeys(double,
                                                std::span<const double> keys) {
  keys_.assign(keys.begin(), keys.end());
}

// ---------------------------------------------------------------------------
// Driver

DescentResult RunDescent(CountingOracle& oracle, GradientProvider& provider,
                         const DescentOptions& options, Rng& rng) {
  const int n = oracle.ground_size();
  const StepSchedule& schedule = options.schedule;
  if (schedule.iterations < 1 || !(schedule.eta > 0.0)) {
    throw DomainError("RunDescent: need eta > 0 and T >= 1");
  }
  const bool capped = options.domain == DomainKind::kSparseCap;
  const bool offset = capped && !options.reference_projection;
  if (capped && !(options.cap >= 0.0)) {
    throw DomainError("RunDescent: sparse cap must be >= 0");
  }

  std::vector<double> keys(n, 0.0);
  std::optional<SparseCapState> cap_state;
  if (offset) cap_state.emplace(n, options.cap);
  provider.Reset(keys, !offset);
  LazyAverager averager(n);

  struct Change {
    Element i;
    double value;
    bool drifting;
  };
  std::vector<Change> changes;
  const double eta = schedule.eta;
  for (std::int64_t t = 1; t <= schedule.iterations; ++t) {
    SparseVector g = provider.Estimate(rng);
    SparseVector edit;
    double shift = 0.0;
    changes.clear();
    if (offset) {
      SparseCapState::StepResult step = cap_state->Step(g, eta);
      edit = std::move(step.key_edit);
      shift = step.lambda;
      for (const SparseEntry& v : step.explicit_values) {
        changes.push_back({v.index, v.value, cap_state->positive(v.index)});
      }
    } else if (!capped) {
      edit = ProjectBoxEdit(keys, g, eta);
      for (const SparseEntry& e : edit.entries()) {
        keys[e.index] = AppliedKey(keys[e.index], e.value, true);
        changes.push_back({e.index, keys[e.index], false});
      }
    } else {
      std::vector<double> y = keys;
      for (const SparseEntry& e : g.entries()) y[e.index] -= eta * e.value;
      SparseCapProjection projection = ProjectSparseCap(y, options.cap);
      std::vector<SparseEntry> entries;
      for (int i = 0; i < n; ++i) {
        double delta = projection.z[i] - keys[i];
        if (delta == 0.0) continue;
        entries.push_back({i, delta});
        keys[i] = AppliedKey(keys[i], delta, true);
        changes.push_back({i, keys[i], false});
      }
      edit = SparseVector::FromEntries(std::move(entries));
    }
    provider.Apply(edit, rng);
    if (offset && cap_state->NeedsRebase()) {
      double removed = cap_state->Rebase();
      provider.ShiftPositiveKeys(removed, cap_state->keys());
    }
    if (t < schedule.iterations) {
      averager.NextIterate(shift);
      for (const Change& c : changes) averager.Set(c.i, c.value, c.drifting);
    }
    if (options.validate_iterates) {
      std::vector<double> x = offset ? cap_state->Values() : keys;
      double total = 0.0;
      for (double v : x) {
        if (!(v >= 0.0 && v <= 1.0 + 1e-12)) {
          throw std::logic_error("RunDescent: iterate left [0,1]^n");
        }
        total += v;
      }
      if (capped && total > options.cap + 1e-9 * (1.0 + options.cap)) {
        throw std::logic_error("RunDescent: iterate exceeds the sparse cap");
      }
    }
  }

  DescentResult result;
  result.iterations = schedule.iterations;
  result.average = averager.Mean();
  for (double& v : result.average) v = Clamp01(v);
  result.final_point = offset ? cap_state->Values() : keys;
  for (double& v : result.final_point) v = Clamp01(v);
  PrefixSet from_average = BestPrefixSet(oracle, result.average);
  PrefixSet from_final = BestPrefixSet(oracle, result.final_point);
  result.from_average = from_average.value <= from_final.value;
  result.best = result.from_average ? std::move(from_average)
                                    : std::move(from_final);
  return result;
}

}  // namespace sfm
