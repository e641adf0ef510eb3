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

#include "sfm/lowerbound.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

namespace sfm {
namespace {

enum : char { kUnknown = 0, kIn = 1, kOut = 2 };

void CheckPermutation(std::span<const Element> perm, int n) {
  if (static_cast<int>(perm.size()) != n) {
    throw DomainError("f_R subgradient: permutation has the wrong length");
  }
  std::vector<char> seen(n, 0);
  for (Element e : perm) {
    if (e < 0 || e >= n || seen[e]) {
      throw DomainError("f_R subgradient: not a permutation of [n]");
    }
    seen[e] = 1;
  }
}

SimulationStats Summarize(int n, std::vector<TrialOutcome> outcomes) {
  SimulationStats stats;
  stats.n = n;
  stats.trials = static_cast<std::int64_t>(outcomes.size());
  double sum = 0.0;
  for (const TrialOutcome& o : outcomes) {
    stats.queries.push_back(o.queries);
    stats.first_reveal.push_back(o.first_reveal);
    stats.flagged += o.flagged ? 1 : 0;
    sum += o.queries;
  }
  if (stats.trials == 0) return stats;
  stats.mean_queries = sum / static_cast<double>(stats.trials);
  double squares = 0.0;
  for (int q : stats.queries) {
    squares += (q - stats.mean_queries) * (q - stats.mean_queries);
  }
  if (stats.trials > 1) {
    stats.std_queries =
        std::sqrt(squares / static_cast<double>(stats.trials - 1));
  }
  return stats;
}

void CheckSimulationArgs(int n, std::int64_t trials) {
  if (n < 1) throw DomainError("lower-bound simulation: n must be >= 1");
  if (trials < 1) {
    throw DomainError("lower-bound simulation: trials must be >= 1");
  }
}

}  // namespace

RevealIndices FRRevealIndices(std::span<const char> in_r,
                              std::span<const Element> perm) {
  const int n = static_cast<int>(perm.size());
  RevealIndices r{n + 1, 0};
  for (int k = 1; k <= n; ++k) {
    if (in_r[perm[k - 1]]) {
      r.j = k;
    } else if (r.i == n + 1) {
      r.i = k;
    }
  }
  return r;
}

SparseVector FRSubgradient(std::span<const char> in_r,
                           std::span<const Element> perm) {
  const int n = static_cast<int>(in_r.size());
  CheckPermutation(perm, n);
  RevealIndices r = FRRevealIndices(in_r, perm);
  std::vector<SparseEntry> entries;
  if (r.i <= n) entries.push_back({perm[r.i - 1], 1.0});
  if (r.j >= 1) entries.push_back({perm[r.j - 1], -1.0});
  return SparseVector::FromEntries(std::move(entries));
}

std::string_view StrategyName(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::kIndexOrder:
      return "index";
    case StrategyKind::kReverseOrder:
      return "reverse";
    case StrategyKind::kRandomShuffle:
      return "shuffle";
  }
  return "unknown";
}

std::optional<StrategyKind> ParseStrategy(std::string_view name) {
  for (StrategyKind kind : kAllStrategies) {
    if (StrategyName(kind) == name) return kind;
  }
  return std::nullopt;
}

RecognizerStrategy MakeStrategy(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::kIndexOrder:
      return [](std::span<const Element> unknown, Rng&) {
        return std::vector<Element>(unknown.begin(), unknown.end());
      };
    case StrategyKind::kReverseOrder:
      return [](std::span<const Element> unknown, Rng&) {
        return std::vector<Element>(unknown.rbegin(), unknown.rend());
      };
    case StrategyKind::kRandomShuffle:
      return [](std::span<const Element> unknown, Rng& rng) {
        std::vector<Element> order(unknown.begin(), unknown.end());
        std::shuffle(order.begin(), order.end(), rng);
        return order;
      };
  }
  throw DomainError("unknown recognizer strategy");
}

TrialOutcome RunRecognizerTrial(const RecognizerStrategy& strategy, int n,
                                Rng& rng) {
  std::vector<char> in_r(n);
  int size_r = 0;
  for (int e = 0; e < n; ++e) {
    in_r[e] = static_cast<char>(rng() >> 63);
    size_r += in_r[e];
  }
  TrialOutcome outcome;
  outcome.flagged = size_r == 0 || size_r == n;

  std::vector<char> status(n, kUnknown);
  std::vector<Element> confirmed_in;
  std::vector<Element> confirmed_out;
  std::vector<Element> unknown(n);
  for (int e = 0; e < n; ++e) unknown[e] = e;
  std::vector<Element> perm;
  std::vector<char> seen(n, 0);

  while (!unknown.empty()) {
    std::vector<Element> order = strategy(unknown, rng);
    if (order.size() != unknown.size()) {
      throw DomainError("recognizer strategy returned the wrong length");
    }
    for (Element e : order) {
      if (e < 0 || e >= n || status[e] != kUnknown || seen[e]) {
        throw DomainError("recognizer strategy returned an invalid order");
      }
      seen[e] = 1;
    }
    for (Element e : order) seen[e] = 0;

    perm.clear();
    perm.insert(perm.end(), confirmed_in.begin(), confirmed_in.end());
    perm.insert(perm.end(), order.begin(), order.end());
    perm.insert(perm.end(), confirmed_out.begin(), confirmed_out.end());
    RevealIndices r = FRRevealIndices(in_r, perm);
    ++outcome.queries;
    if (outcome.queries == 1) outcome.first_reveal = r.i;

    const int offset = static_cast<int>(confirmed_in.size());
    for (int p = offset + 1; p <= offset + static_cast<int>(order.size());
         ++p) {
      char label = kUnknown;
      if (r.i > r.j) {
        label = p <= r.j ? kIn : kOut;
      } else if (p < r.i || p == r.j) {
        label = kIn;
      } else if (p == r.i || p > r.j) {
        label = kOut;
      }
      if (label == kUnknown) continue;
      Element e = perm[p - 1];
      if ((label == kIn) != static_cast<bool>(in_r[e])) {
        throw std::logic_error("reveal rule misclassified an element");
      }
      status[e] = label;
      (label == kIn ? confirmed_in : confirmed_out).push_back(e);
    }
    std::erase_if(unknown, [&](Element e) { return status[e] != kUnknown; });
  }
  return outcome;
}

SimulationStats SimulateRecognizer(const RecognizerStrategy& strategy, int n,
                                   std::uint64_t seed, std::int64_t trials) {
  CheckSimulationArgs(n, trials);
  std::vector<TrialOutcome> outcomes(trials);
  for (std::int64_t t = 0; t < trials; ++t) {
    Rng rng = TrialRng(seed, t);
    outcomes[t] = RunRecognizerTrial(strategy, n, rng);
  }
  return Summarize(n, std::move(outcomes));
}

SimulationStats SimulateRecognizerParallel(const RecognizerStrategy& strategy,
                                           int n, std::uint64_t seed,
                                           std::int64_t trials) {
  CheckSimulationArgs(n, trials);
  std::vector<TrialOutcome> outcomes(trials);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t t = 0; t < trials; ++t) {
    Rng rng = TrialRng(seed, t);
    outcomes[t] = RunRecognizerTrial(strategy, n, rng);
  }
  return Summarize(n, std::move(outcomes));
}

ChiSquareResult GeometricChiSquare(std::span<const int> reveals, int n,
                                   double alpha) {
  const double total = static_cast<double>(reveals.size());
  // Bins 1..last-1 are single values; bin `last` is {X >= last}, whose
  // probability is 2^-(last-1).
  int last = 2;
  while (last + 1 <= n + 1 && total * std::ldexp(1.0, -last) >= 5.0) ++last;
  if (total * std::ldexp(1.0, -(last - 1)) < 5.0 || n < 1) {
    throw DomainError("chi-square: too few samples for two bins");
  }
  std::vector<double> observed(last + 1, 0.0);
  for (int x : reveals) {
    if (x < 1 || x > n + 1) throw DomainError("chi-square: reveal out of range");
    observed[std::min(x, last)] += 1.0;
  }
  ChiSquareResult result;
  for (int k = 1; k <= last; ++k) {
    double p = std::ldexp(1.0, k == last ? -(last - 1) : -k);
    double expected = total * p;
    result.statistic +=
        (observed[k] - expected) * (observed[k] - expected) / expected;
  }
  result.degrees_of_freedom = last - 1;
  boost::math::chi_squared dist(result.degrees_of_freedom);
  result.critical = boost::math::quantile(boost::math::complement(dist, alpha));
  result.p_value = boost::math::cdf(boost::math::complement(dist, result.statistic));
  result.pass = result.statistic <= result.critical;
  return result;
}

}  // namespace sfm
