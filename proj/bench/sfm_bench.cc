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

// Serial reference kernels against their OpenMP counterparts, and the dense
// capped-box projection against the offset-encoded one.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "sfm/descent.h"
#include "sfm/lowerbound.h"
#include "sfm/oracle.h"
#include "sfm/verify.h"

namespace {

void BM_BruteForceSerial(benchmark::State& state) {
  sfm::CutInstance cut =
      sfm::RandomCutInstance(static_cast<int>(state.range(0)), 0.2, 4, 1);
  for (auto _ : state) benchmark::DoNotOptimize(sfm::BruteForceMin(cut));
}
BENCHMARK(BM_BruteForceSerial)->Arg(14)->Arg(18)->Unit(benchmark::kMillisecond);

void BM_BruteForceParallel(benchmark::State& state) {
  sfm::CutInstance cut =
      sfm::RandomCutInstance(static_cast<int>(state.range(0)), 0.2, 4, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sfm::BruteForceMinParallel(cut));
  }
}
BENCHMARK(BM_BruteForceParallel)
    ->Arg(14)
    ->Arg(18)
    ->Unit(benchmark::kMillisecond);

void BM_CheckSubmodularSerial(benchmark::State& state) {
  sfm::CutInstance cut = sfm::RandomCutInstance(12, 0.3, 4, 2);
  for (auto _ : state) benchmark::DoNotOptimize(sfm::CheckSubmodular(cut));
}
BENCHMARK(BM_CheckSubmodularSerial)->Unit(benchmark::kMillisecond);

void BM_CheckSubmodularParallel(benchmark::State& state) {
  sfm::CutInstance cut = sfm::RandomCutInstance(12, 0.3, 4, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sfm::CheckSubmodularParallel(cut));
  }
}
BENCHMARK(BM_CheckSubmodularParallel)->Unit(benchmark::kMillisecond);

void BM_LowerBoundSerial(benchmark::State& state) {
  auto strategy = sfm::MakeStrategy(sfm::StrategyKind::kRandomShuffle);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sfm::SimulateRecognizer(strategy, 128, 1, 2000));
  }
}
BENCHMARK(BM_LowerBoundSerial)->Unit(benchmark::kMillisecond);

void BM_LowerBoundParallel(benchmark::State& state) {
  auto strategy = sfm::MakeStrategy(sfm::StrategyKind::kRandomShuffle);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sfm::SimulateRecognizerParallel(strategy, 128, 1, 2000));
  }
}
BENCHMARK(BM_LowerBoundParallel)->Unit(benchmark::kMillisecond);

std::vector<sfm::SparseVector> RandomSteps(int n, int count) {
  sfm::Rng rng(3);
  std::uniform_int_distribution<int> coord(0, n - 1);
  std::uniform_real_distribution<double> value(-3.0, 3.0);
  std::vector<sfm::SparseVector> steps;
  for (int t = 0; t < count; ++t) {
    steps.push_back(sfm::SparseVector::FromEntries(
        {{coord(rng), value(rng)}, {coord(rng), value(rng)}}));
  }
  return steps;
}

void BM_SparseCapReference(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto steps = RandomSteps(n, 1000);
  for (auto _ : state) {
    std::vector<double> x(n, 0.0);
    for (const auto& g : steps) {
      for (const auto& e : g.entries()) x[e.index] -= 0.05 * e.value;
      x = sfm::ProjectSparseCap(x, 4.0).z;
    }
    benchmark::DoNotOptimize(x);
  }
}
BENCHMARK(BM_SparseCapReference)
    ->Arg(256)
    ->Arg(4096)
    ->Unit(benchmark::kMillisecond);

void BM_SparseCapOffset(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto steps = RandomSteps(n, 1000);
  for (auto _ : state) {
    sfm::SparseCapState cap(n, 4.0);
    for (const auto& g : steps) {
      benchmark::DoNotOptimize(cap.Step(g, 0.05));
      if (cap.NeedsRebase()) cap.Rebase();
    }
  }
}
BENCHMARK(BM_SparseCapOffset)->Arg(256)->Arg(4096)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
