// Copyright 2026 The privpack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "privpack/knapsack.h"

#include <random>
#include <vector>

#include "absl/status/status.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace privpack {
namespace {

using privpack_test::BruteForcePrivacy;
using privpack_test::BruteForceScalar;
using privpack_test::Curve;
using privpack_test::WideNarrowInstance;
using privpack_test::MakeGrid;
using privpack_test::RandomMultiBlock;
using privpack_test::ToKnapsack;

double SelectedWeight(const ScalarKnapsackInstance& inst,
                      const ScalarKnapsackSolution& sol) {
  double w = 0;
  double d = 0;
  for (size_t i : sol.selected) {
    w += inst.weights[i];
    d += inst.demands[i];
  }
  EXPECT_TRUE(FitsWithin(d, inst.capacity));
  EXPECT_NEAR(w, sol.total_weight, 1e-9 * std::max(1.0, w));
  return w;
}

TEST(ScalarFptasTest, Trivial) {
  EXPECT_TRUE(ScalarKnapsackFptas({}, 0.1).selected.empty());
  ScalarKnapsackInstance zero{{0.5, 0.2}, {1, 2}, 0};
  EXPECT_TRUE(ScalarKnapsackFptas(zero, 0.1).selected.empty());
  ScalarKnapsackInstance one{{0.5}, {3}, 1};
  for (double eta : {0.9, 0.1, 0.001}) {
    auto sol = ScalarKnapsackFptas(one, eta);
    ASSERT_EQ(sol.selected.size(), 1u);
    EXPECT_EQ(sol.total_weight, 3);
  }
}

TEST(ScalarFptasTest, ZeroDemandItemsAlwaysTaken) {
  ScalarKnapsackInstance inst{{0, 2, 0}, {1, 5, 1}, 1};
  auto sol = ScalarKnapsackFptas(inst, 0.1);
  EXPECT_EQ(sol.selected, (std::vector<size_t>{0, 2}));
}

TEST(ScalarFptasTest, GuaranteeAgainstEnumeration) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  std::uniform_int_distribution<int> size(1, 15);
  for (double eta : {0.3, 0.1, 0.01}) {
    for (int trial = 0; trial < 100; ++trial) {
      ScalarKnapsackInstance inst;
      const int n = trial == 0 ? 12 : size(rng);
      for (int i = 0; i < n; ++i) {
        inst.demands.push_back(u(rng));
        inst.weights.push_back(0.1 + 10 * u(rng));
      }
      inst.capacity = 0.5 + 2 * u(rng);
      const double opt =
          BruteForceScalar(inst.demands, inst.weights, inst.capacity);
      const auto sol = ScalarKnapsackFptas(inst, eta);
      const double got = SelectedWeight(inst, sol);
      EXPECT_GE(got, (1 - eta) * opt - 1e-9) << "trial " << trial;
      EXPECT_LE(got, opt + 1e-9);
    }
  }
}

TEST(SingleBlockTest, AllZeroCapacity) {
  const GridPtr grid = MakeGrid({2, 4, 8});
  SingleBlockInstance inst;
  inst.capacity = RdpCurve::Zero(grid);
  inst.demands = {Curve(grid, {1, 1, 1}), Curve(grid, {0.2, 0.3, 0.4})};
  inst.weights = {1, 1};
  auto sol = SingleBlockPrivacyKnapsack(inst, 0.1);
  EXPECT_EQ(sol.best_alpha_index, 0u);
  EXPECT_EQ(sol.best_weight, 0);
  for (const auto& s : sol.per_alpha) EXPECT_EQ(s.total_weight, 0);
}

TEST(SingleBlockTest, DominantCapacityWins) {
  const GridPtr grid = MakeGrid({2, 4});
  SingleBlockInstance inst;
  inst.capacity = Curve(grid, {1, 3});
  inst.demands.assign(4, Curve(grid, {0.9, 0.9}));
  inst.weights.assign(4, 1);
  auto sol = SingleBlockPrivacyKnapsack(inst, 0.1);
  EXPECT_EQ(sol.best_alpha_index, 1u);
  EXPECT_EQ(sol.best_weight, 3);
}

// One block of the two-block, two-order construction: two tasks that are
// cheap at the first order only, and one flat task.
TEST(SingleBlockTest, CheapAtFirstOrder) {
  const GridPtr grid = MakeGrid({2, 4});
  SingleBlockInstance inst;
  inst.capacity = Curve(grid, {1, 1});
  inst.demands = {Curve(grid, {0.5, 1.5}), Curve(grid, {0.5, 1.5}),
                  Curve(grid, {0.4, 0.4})};
  inst.weights = {1, 1, 1};
  auto sol = SingleBlockPrivacyKnapsack(inst, 0.1);
  EXPECT_EQ(sol.best_alpha_index, 0u);
  // Enumeration: at the first order at most two of the three fit (0.5 + 0.5,
  // or 0.5 + 0.4); at the second only the flat task does.
  EXPECT_EQ(BruteForceScalar({0.5, 0.5, 0.4}, {1, 1, 1}, 1), 2);
  EXPECT_EQ(BruteForceScalar({1.5, 1.5, 0.4}, {1, 1, 1}, 1), 1);
  EXPECT_EQ(sol.per_alpha[0].total_weight, 2);
  EXPECT_EQ(sol.per_alpha[1].total_weight, 1);
}

TEST(ExactTest, EverythingFits) {
  const GridPtr grid = MakeGrid({2, 4});
  PrivacyKnapsackInstance inst;
  inst.capacities = {Curve(grid, {1, 1}), Curve(grid, {1, 1})};
  for (int i = 0; i < 5; ++i) {
    inst.items.push_back({1.0 + i, {{0, Curve(grid, {0.1, 0.9})},
                                    {1, Curve(grid, {0.9, 0.15})}}});
  }
  auto sol = ExactPrivacyKnapsack(inst);
  ASSERT_TRUE(sol.ok());
  EXPECT_EQ(sol->selected.size(), 5u);
  EXPECT_EQ(sol->total_weight, 15);
  EXPECT_EQ(sol->alpha_choice, (std::vector<size_t>{0, 1}));
  EXPECT_TRUE(IsFeasibleSelection(inst, sol->selected));
}

TEST(ExactTest, WideNarrowOptimum) {
  const auto inst = ToKnapsack(WideNarrowInstance());
  EXPECT_EQ(BruteForcePrivacy(inst), 3);
  auto sol = ExactPrivacyKnapsack(inst);
  ASSERT_TRUE(sol.ok());
  EXPECT_EQ(sol->total_weight, 3);
  EXPECT_EQ(sol->selected, (std::vector<size_t>{1, 2, 3}));
}

TEST(ExactTest, LexicographicallySmallestOptimum) {
  const GridPtr grid = MakeGrid({2});
  PrivacyKnapsackInstance inst;
  inst.capacities = {Curve(grid, {1})};
  for (int i = 0; i < 4; ++i) inst.items.push_back({1, {{0, Curve(grid, {0.5})}}});
  auto sol = ExactPrivacyKnapsack(inst);
  ASSERT_TRUE(sol.ok());
  EXPECT_EQ(sol->selected, (std::vector<size_t>{0, 1}));
}

TEST(ExactTest, MatchesEnumeration) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const auto inst = ToKnapsack(RandomMultiBlock(rng, 8, 2, 3));
    auto sol = ExactPrivacyKnapsack(inst);
    ASSERT_TRUE(sol.ok());
    EXPECT_NEAR(sol->total_weight, BruteForcePrivacy(inst), 1e-9);
    EXPECT_TRUE(IsFeasibleSelection(inst, sol->selected));
  }
}

TEST(ExactTest, LimitsAndValidation) {
  const GridPtr grid = MakeGrid({2});
  PrivacyKnapsackInstance inst;
  inst.capacities = {Curve(grid, {1})};
  for (int i = 0; i < 25; ++i) inst.items.push_back({1, {{0, Curve(grid, {0.1})}}});
  EXPECT_EQ(ExactPrivacyKnapsack(inst).status().code(),
            absl::StatusCode::kResourceExhausted);
  ExactLimits tiny;
  tiny.max_items = 30;
  tiny.max_nodes = 10;
  EXPECT_EQ(ExactPrivacyKnapsack(inst, tiny).status().code(),
            absl::StatusCode::kResourceExhausted);

  PrivacyKnapsackInstance bad;
  bad.capacities = {Curve(grid, {1})};
  bad.items.push_back({1, {{3, Curve(grid, {0.1})}}});
  EXPECT_EQ(ExactPrivacyKnapsack(bad).status().code(),
            absl::StatusCode::kInvalidArgument);
  bad.items = {{0, {{0, Curve(grid, {0.1})}}}};
  EXPECT_FALSE(ExactPrivacyKnapsack(bad).ok());
}

TEST(ExactTest, EmptyInstance) {
  auto sol = ExactPrivacyKnapsack({});
  ASSERT_TRUE(sol.ok());
  EXPECT_TRUE(sol->selected.empty());
  EXPECT_EQ(sol->total_weight, 0);
}

}  // namespace
}  // namespace privpack
