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

#include <gtest/gtest.h>

#include <cstdint>
#include <memory>
#include <numeric>
#include <vector>

#include "test_util.h"

namespace sfm {
namespace {

using testing::MaskView;
using testing::NormalizedTable;

// Weight of edges leaving {s} + S, straight from the edge list.
double DirectCut(const CutInstance& g, std::uint32_t mask) {
  auto side = [&](int v) {
    if (v == g.source()) return true;
    if (v == g.sink()) return false;
    return ((mask >> g.element_of(v)) & 1u) != 0;
  };
  double total = 0.0;
  for (const WeightedEdge& e : g.edges()) {
    if (side(e.from) && !side(e.to)) total += e.weight;
  }
  return total;
}

TEST(OracleTest, EmptyPrefixIsZero) {
  CutInstance cut(3, 0, 2, {{0, 1, 2.0}, {1, 2, 3.0}, {0, 2, 1.0}});
  TableInstance table(2, {5.0, 4.0, 6.0, 7.0});
  LowerBoundInstance lb(3, {0, 2});
  for (const SubmodularInstance* f :
       std::initializer_list<const SubmodularInstance*>{&cut, &table, &lb}) {
    CountingOracle oracle(*f);
    Permutation perm(f->ground_size());
    std::iota(perm.begin(), perm.end(), 0);
    EXPECT_EQ(EvaluatePrefix(oracle, perm, 0), 0.0) << f->description();
  }
}

TEST(OracleTest, SmallCutPrefix) {
  // s=0, a=1, t=2.
  CutInstance cut(3, 0, 2, {{0, 1, 2.0}, {1, 2, 3.0}, {0, 2, 1.0}});
  const double expected = DirectCut(cut, 1u) - DirectCut(cut, 0u);
  ASSERT_EQ(expected, 1.0);
  CountingOracle oracle(cut);
  Permutation perm{0};
  EXPECT_EQ(EvaluatePrefix(oracle, perm, 1), expected);
}

TEST(OracleTest, TableLookup) {
  TableInstance table(2, {0.0, -1.0, 1.0, 0.0});
  CountingOracle oracle(table);
  Permutation perm{0, 1};
  EXPECT_EQ(EvaluatePrefix(oracle, perm, 1), -1.0);
  EXPECT_EQ(EvaluatePrefix(oracle, perm, 2), 0.0);
}

TEST(OracleTest, TableNormalizesEmptySet) {
  TableInstance table(2, {5.0, 4.0, 6.0, 7.0});
  CountingOracle oracle(table);
  Permutation perm{1, 0};
  EXPECT_EQ(EvaluatePrefix(oracle, perm, 1), 1.0);
  EXPECT_EQ(EvaluatePrefix(oracle, perm, 2), 2.0);
  EXPECT_EQ(table.bound(), 2.0);
}

TEST(OracleTest, RandomCutIsSubmodular) {
  CutInstance cut = RandomCutInstance(4, 1.0, 3, 7);
  EXPECT_TRUE(testing::RefIsSubmodular(NormalizedTable(cut), 4));
  EXPECT_EQ(cut.value_kind(), ValueKind::kInteger);
}

TEST(OracleTest, SingleElementCut) {
  CutInstance cut = RandomCutInstance(1, 1.0, 1, 0);
  EXPECT_EQ(cut.ground_size(), 1);
  CountingOracle oracle(cut);
  Permutation perm{0};
  EXPECT_EQ(EvaluatePrefix(oracle, perm, 0), 0.0);
}

TEST(OracleTest, GeneratorIsDeterministic) {
  CutInstance a = RandomCutInstance(12, 0.3, 5, 42);
  CutInstance b = RandomCutInstance(12, 0.3, 5, 42);
  EXPECT_TRUE(std::equal(a.edges().begin(), a.edges().end(),
                         b.edges().begin(), b.edges().end()));
  CutInstance c = RandomBudgetCutInstance(12, 8, 3, 42);
  CutInstance d = RandomBudgetCutInstance(12, 8, 3, 42);
  EXPECT_TRUE(std::equal(c.edges().begin(), c.edges().end(),
                         d.edges().begin(), d.edges().end()));
  EXPECT_EQ(c.total_weight(), 8.0);
}

TEST(OracleTest, BudgetCutBoundIsTotalWeight) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CutInstance cut = RandomBudgetCutInstance(6, 5, 2, seed);
    EXPECT_LE(testing::TableBound(NormalizedTable(cut)), cut.bound());
    EXPECT_TRUE(testing::RefIsSubmodular(NormalizedTable(cut), 6));
  }
}

TEST(OracleTest, LowerBoundFamilyValues) {
  // R = {1, 3}, 0-based {0, 2}.
  LowerBoundInstance lb(3, {0, 2});
  EXPECT_EQ(lb.EvaluateRaw(MaskView(3, 0b101)), -1.0);
  EXPECT_EQ(lb.EvaluateRaw(MaskView(3, 0b001)), 0.0);
  EXPECT_EQ(lb.EvaluateRaw(MaskView(3, 0b010)), 1.0);
  EXPECT_EQ(lb.EvaluateRaw(MaskView(3, 0b111)), 0.0);
  EXPECT_EQ(lb.EvaluateRaw(MaskView(3, 0b000)), 0.0);
}

TEST(OracleTest, LowerBoundFamilyIsSubmodular) {
  for (int n = 1; n <= 8; ++n) {
    for (std::uint32_t r = 0; r < (1u << n); ++r) {
      std::vector<Element> hidden;
      for (int i = 0; i < n; ++i) {
        if ((r >> i) & 1u) hidden.push_back(i);
      }
      LowerBoundInstance lb(n, hidden);
      std::vector<double> table(std::size_t{1} << n);
      for (std::uint32_t m = 0; m < table.size(); ++m) {
        table[m] = lb.EvaluateRaw(MaskView(n, m));
      }
      ASSERT_TRUE(testing::RefIsSubmodular(table, n))
          << "n=" << n << " R=" << r;
    }
  }
}

TEST(OracleTest, CountsCallsAndCachesEmptySet) {
  TableInstance table(2, {0.0, -1.0, 1.0, 0.0});
  CountingOracle oracle(table);
  Permutation perm{0, 1};
  for (int k = 0; k <= 2; ++k) EvaluatePrefix(oracle, perm, k);
  std::vector<Element> set{1};
  EXPECT_EQ(oracle.EvaluateSet(set), 1.0);
  EXPECT_EQ(oracle.eval_calls(), 4u);
  EXPECT_EQ(oracle.raw_queries(), 5u);
  oracle.NoteSubgradient();
  EXPECT_EQ(oracle.subgradient_calls(), 1u);
}

TEST(OracleTest, IntegerGuardRejectsFractions) {
  TableInstance table(1, {0.0, 0.5});
  OracleGuards guards;
  guards.require_integer = true;
  CountingOracle oracle(table, guards);
  Permutation perm{0};
  EXPECT_THROW(EvaluatePrefix(oracle, perm, 1), ContractViolation);
}

TEST(OracleTest, NonpositiveGuardRejectsPositiveValues) {
  TableInstance table(2, {0.0, -1.0, 1.0, 0.0});
  OracleGuards guards;
  guards.require_nonpositive = true;
  CountingOracle oracle(table, guards);
  EXPECT_EQ(oracle.EvaluateSet(std::vector<Element>{0}), -1.0);
  EXPECT_THROW(oracle.EvaluateSet(std::vector<Element>{1}),
               ContractViolation);
}

TEST(OracleTest, ScaledInstance) {
  auto base = std::make_shared<TableInstance>(
      2, std::vector<double>{0.0, -4.0, 2.0, -1.0});
  ScaledInstance half(base, 0.25);
  EXPECT_EQ(half.bound(), 1.0);
  std::vector<double> t = NormalizedTable(half);
  EXPECT_EQ(t, (std::vector<double>{0.0, -1.0, 0.5, -0.25}));
  EXPECT_EQ(half.value_kind(), ValueKind::kReal);
  ScaledInstance twice(base, 2.0);
  EXPECT_EQ(twice.value_kind(), ValueKind::kInteger);
}

TEST(OracleTest, TabulateMatchesDirectEvaluation) {
  CutInstance cut = RandomCutInstance(5, 0.5, 4, 3);
  TableInstance table = TableInstance::Tabulate(cut);
  for (std::uint32_t m = 0; m < 32; ++m) {
    EXPECT_EQ(table.values()[m], DirectCut(cut, m));
  }
}

// Large sparse graphs take the per-edge membership path, small prefixes the
// marking path; both must agree with the direct count.
TEST(OracleTest, CutEvaluationPathsAgree) {
  CutInstance cut = RandomCutInstance(18, 0.05, 3, 11);
  CountingOracle oracle(cut);
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    Permutation perm(18);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const int k = static_cast<int>(rng() % 19);
    std::uint32_t mask = 0;
    for (int j = 0; j < k; ++j) mask |= 1u << perm[j];
    EXPECT_EQ(EvaluatePrefix(oracle, perm, k),
              DirectCut(cut, mask) - DirectCut(cut, 0));
  }
}

TEST(OracleTest, RejectsBadInputs) {
  EXPECT_THROW(TableInstance(2, {0.0, 1.0}), DomainError);
  EXPECT_THROW(CutInstance(3, 0, 0, {}), DomainError);
  EXPECT_THROW(CutInstance(3, 0, 2, {{0, 1, -1.0}}), DomainError);
  EXPECT_THROW(LowerBoundInstance(3, {3}), DomainError);
  EXPECT_THROW(RandomCutInstance(3, 0.0, 1, 0), DomainError);
}

}  // namespace
}  // namespace sfm
