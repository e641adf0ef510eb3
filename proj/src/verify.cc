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

#include "sfm/verify.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sfm/difference_sampler.h"
#include "sfm/lovasz.h"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sfm {
namespace {

class MaskPrefix final : public PrefixView {
 public:
  MaskPrefix(int n, std::uint32_t mask) : n_(n), mask_(mask) {}

  int ground_size() const override { return n_; }
  int length() const override { return std::popcount(mask_); }
  bool Contains(Element e) const override { return (mask_ >> e) & 1u; }
  void AppendMembers(std::vector<Element>& out) const override {
    for (std::uint32_t m = mask_; m != 0; m &= m - 1) {
      out.push_back(std::countr_zero(m));
    }
  }

 private:
  int n_;
  std::uint32_t mask_;
};

double RawValue(const SubmodularInstance& instance, std::uint32_t mask) {
  return instance.EvaluateRaw(MaskPrefix(instance.ground_size(), mask));
}

std::vector<Element> MaskMembers(std::uint32_t mask) {
  std::vector<Element> out;
  MaskPrefix(32, mask).AppendMembers(out);
  return out;
}

double EmptyOffset(const SubmodularInstance& instance) {
  return instance.normalized() ? RawValue(instance, 0) : 0.0;
}

void CheckBruteForceSize(int n) {
  if (n > kMaxBruteForceSize) {
    throw DomainError("brute force refused: n = " + std::to_string(n) +
                      " exceeds " + std::to_string(kMaxBruteForceSize));
  }
}

struct Best {
  double value = std::numeric_limits<double>::infinity();
  std::uint32_t mask = 0;

  void Offer(double v, std::uint32_t m) {
    if (v < value || (v == value && m < mask)) {
      value = v;
      mask = m;
    }
  }
};

BruteForceResult MakeResult(const Best& best) {
  BruteForceResult out;
  out.value = best.value;
  out.mask = best.mask;
  out.minimizer = MaskMembers(best.mask);
  return out;
}

struct Violation {
  std::uint32_t s;
  int i;
  int j;
};

// First violation for a fixed S, scanning i < j outside S.
std::optional<Violation> FindViolation(std::span<const double> table, int n,
                                       std::uint32_t s, double tolerance) {
  for (int i = 0; i < n; ++i) {
    if ((s >> i) & 1u) continue;
    for (int j = i + 1; j < n; ++j) {
      if ((s >> j) & 1u) continue;
      std::uint32_t si = s | (1u << i);
      std::uint32_t sj = s | (1u << j);
      double lhs = table[si] + table[sj];
      double rhs = table[si | sj] + table[s];
      if (lhs < rhs - tolerance) return Violation{s, i, j};
    }
  }
  return std::nullopt;
}

SubmodularityReport MakeReport(const std::optional<Violation>& v) {
  SubmodularityReport report;
  if (!v) return report;
  report.submodular = false;
  SubmodularityWitness w;
  w.s = MaskMembers(v->s);
  w.t = MaskMembers(v->s | (1u << v->j));
  w.i = v->i;
  report.witness = std::move(w);
  return report;
}

double CheckTolerance(const SubmodularInstance& instance) {
  return instance.value_kind() == ValueKind::kInteger
             ? 0.0
             : 1e-9 * (1.0 + instance.bound());
}

void CheckSubmodularSize(int n) {
  if (n > kMaxSubmodularCheckSize) {
    throw DomainError("submodularity check refused: n = " +
                      std::to_string(n) + " exceeds " +
                      std::to_string(kMaxSubmodularCheckSize));
  }
}

}  // namespace

BruteForceResult BruteForceMin(const SubmodularInstance& instance,
                               bool keep_table) {
  const int n = instance.ground_size();
  CheckBruteForceSize(n);
  const double offset = EmptyOffset(instance);
  const std::uint32_t count = 1u << n;
  std::vector<double> table;
  if (keep_table) table.resize(count);

  Best best;
  std::uint32_t mask = 0;
  for (std::uint32_t k = 0; k < count; ++k) {
    if (k > 0) mask ^= 1u << std::countr_zero(k);
    double v = mask == 0 && instance.normalized()
                   ? 0.0
                   : RawValue(instance, mask) - offset;
    if (keep_table) table[mask] = v;
    best.Offer(v, mask);
  }
  BruteForceResult out = MakeResult(best);
  out.table = std::move(table);
  return out;
}

BruteForceResult BruteForceMinParallel(const SubmodularInstance& instance) {
  const int n = instance.ground_size();
  CheckBruteForceSize(n);
  const double offset = EmptyOffset(instance);
  const std::int64_t count = std::int64_t{1} << n;
  const bool normalized = instance.normalized();

  Best best;
#pragma omp parallel
  {
    Best local;
#pragma omp for schedule(static)
    for (std::int64_t k = 0; k < count; ++k) {
      auto mask = static_cast<std::uint32_t>(k);
      double v = mask == 0 && normalized ? 0.0
                                         : RawValue(instance, mask) - offset;
      local.Offer(v, mask);
    }
#pragma omp critical
    best.Offer(local.value, local.mask);
  }
  return MakeResult(best);
}

SubmodularityReport CheckSubmodular(const SubmodularInstance& instance) {
  const int n = instance.ground_size();
  CheckSubmodularSize(n);
  TableInstance table = TableInstance::Tabulate(instance);
  const double tolerance = CheckTolerance(instance);
  for (std::uint32_t s = 0; s < (1u << n); ++s) {
    if (auto v = FindViolation(table.values(), n, s, tolerance)) {
      return MakeReport(v);
    }
  }
  return {};
}

SubmodularityReport CheckSubmodularParallel(
    const SubmodularInstance& instance) {
  const int n = instance.ground_size();
  CheckSubmodularSize(n);
  const std::int64_t count = std::int64_t{1} << n;
  std::vector<double> values(count);
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < count; ++k) {
    values[k] = RawValue(instance, static_cast<std::uint32_t>(k));
  }
  const double tolerance = CheckTolerance(instance);
  std::int64_t first = count;
  std::optional<Violation> found;
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t k = 0; k < count; ++k) {
    if (auto v = FindViolation(values, n, static_cast<std::uint32_t>(k),
                               tolerance)) {
#pragma omp critical
      if (k < first) {
        first = k;
        found = v;
      }
    }
  }
  return MakeReport(found);
}

EstimatorMoments MeasureEstimatorMoments(OrderTree& tree,
                                         const SparseVector& e, int ell,
                                         std::int64_t draws, Rng& rng) {
  if (draws < 2) throw DomainError("estimator moments: need >= 2 draws");
  const int n = tree.size();
  CountingOracle& oracle = tree.oracle();

  std::vector<double> after(tree.keys().begin(), tree.keys().end());
  for (const SparseEntry& entry : e.entries()) {
    after[entry.index] += entry.value;
    if (tree.options().unit_box) {
      after[entry.index] = std::clamp(after[entry.index], 0.0, 1.0);
    }
  }
  auto gradient = [&](const Permutation& perm) {
    std::vector<double> prefix = PrefixValues(oracle, perm, 0, n);
    std::vector<double> g(n);
    for (int k = 0; k < n; ++k) g[perm[k]] = prefix[k + 1] - prefix[k];
    return g;
  };
  std::vector<double> gx = gradient(tree.permutation());
  std::vector<double> gy = gradient(ConsistentPermutation(after));

  EstimatorMoments out;
  out.ell = ell;
  out.draws = draws;
  out.exact.resize(n);
  for (int i = 0; i < n; ++i) out.exact[i] = gy[i] - gx[i];

  DifferenceSampler sampler(tree, e);
  out.l1_mass = sampler.l1_mass();
  std::vector<double> mean(n, 0.0);
  std::vector<double> m2(n, 0.0);
  std::vector<double> z(n, 0.0);
  for (std::int64_t d = 1; d <= draws; ++d) {
    SparseVector sample = sampler.Draw(ell, rng);
    for (const SparseEntry& entry : sample.entries()) {
      z[entry.index] = entry.value;
    }
    for (int i = 0; i < n; ++i) {
      double delta = z[i] - mean[i];
      mean[i] += delta / static_cast<double>(d);
      m2[i] += delta * (z[i] - mean[i]);
    }
    for (const SparseEntry& entry : sample.entries()) z[entry.index] = 0.0;
  }
  out.mean = mean;
  out.variance.resize(n);
  for (int i = 0; i < n; ++i) {
    out.variance[i] = m2[i] / static_cast<double>(draws - 1);
    out.total_variance += out.variance[i];
    double gap = std::abs(mean[i] - out.exact[i]);
    double scale = 1.0 + std::abs(out.exact[i]);
    if (out.variance[i] <= 1e-24 * scale * scale) {
      if (gap > 1e-9 * scale) out.zero_variance_mismatch = true;
      continue;
    }
    double se = std::sqrt(out.variance[i] / static_cast<double>(draws));
    out.max_z_score = std::max(out.max_z_score, gap / se);
  }
  return out;
}

}  // namespace sfm
