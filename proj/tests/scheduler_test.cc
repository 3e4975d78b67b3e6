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

#include "privpack/scheduler.h"

#include <algorithm>
#include <random>
#include <vector>

#include "absl/status/status.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace privpack {
namespace {

using privpack_test::BruteForcePrivacy;
using privpack_test::Curve;
using privpack_test::WideNarrowInstance;
using privpack_test::TwoOrderInstance;
using privpack_test::MakeGrid;
using privpack_test::MakeTask;
using privpack_test::Pointers;
using privpack_test::RandomMultiBlock;
using privpack_test::RunBatch;
using privpack_test::StaticInstance;
using privpack_test::ToKnapsack;
using privpack_test::WeightOf;

SchedulerSpec Spec(SchedulerKind kind) {
  SchedulerSpec spec;
  spec.kind = kind;
  return spec;
}

std::vector<Block> BlocksOf(const StaticInstance& inst) {
  std::vector<Block> blocks;
  for (size_t j = 0; j < inst.capacity.size(); ++j) {
    blocks.emplace_back(static_cast<BlockId>(j), 0, inst.capacity[j], 1);
  }
  return blocks;
}

TEST(DpfEfficiencyTest, Examples) {
  const GridPtr grid = MakeGrid({2});
  const std::vector<RdpCurve> unit = {Curve(grid, {1})};
  const Task half = MakeTask(0, 1, {{0, Curve(grid, {0.5})}});
  EXPECT_DOUBLE_EQ(DpfEfficiency(half, unit).value, 2);
  const Task quarter = MakeTask(0, 1, {{0, Curve(grid, {0.25})}});
  EXPECT_DOUBLE_EQ(DpfEfficiency(quarter, unit).value, 4);

  const StaticInstance wide_narrow = WideNarrowInstance();
  const double t1 = DpfEfficiency(wide_narrow.tasks[0], wide_narrow.capacity).value;
  const double t2 = DpfEfficiency(wide_narrow.tasks[1], wide_narrow.capacity).value;
  EXPECT_DOUBLE_EQ(t1, 1 / 0.6);
  EXPECT_DOUBLE_EQ(t2, 1 / 0.7);
  EXPECT_GT(t1, t2);
}

TEST(DpfEfficiencyTest, MaxOverOrders) {
  const GridPtr grid = MakeGrid({2, 4});
  const std::vector<RdpCurve> cap = {Curve(grid, {1, 1})};
  const Task t = MakeTask(0, 1, {{0, Curve(grid, {0.5, 1.5})}});
  EXPECT_DOUBLE_EQ(DpfEfficiency(t, cap).value, 1 / 1.5);
}

TEST(AreaEfficiencyTest, Examples) {
  const StaticInstance wide_narrow = WideNarrowInstance();
  auto t1 = AreaEfficiency(wide_narrow.tasks[0], wide_narrow.capacity);
  auto t2 = AreaEfficiency(wide_narrow.tasks[1], wide_narrow.capacity);
  ASSERT_TRUE(t1.ok() && t2.ok());
  EXPECT_NEAR(t1->value, 1 / 1.8, 1e-12);
  EXPECT_NEAR(t2->value, 1 / 0.7, 1e-12);

  const GridPtr grid = MakeGrid({2});
  std::vector<RdpCurve> cap = {Curve(grid, {1}), Curve(grid, {1})};
  const Task whole = MakeTask(0, 1, {{0, Curve(grid, {1})}});
  EXPECT_DOUBLE_EQ(AreaEfficiency(whole, cap)->value, 1);

  const Task both =
      MakeTask(0, 1, {{0, Curve(grid, {0.2})}, {1, Curve(grid, {0.2})}});
  EXPECT_NEAR(AreaEfficiency(both, cap)->value, 1 / 0.4, 1e-12);
  cap[1] = Curve(grid, {0.5});
  EXPECT_NEAR(AreaEfficiency(both, cap)->value, 1 / 0.6, 1e-12);

  const StaticInstance two_order = TwoOrderInstance();
  EXPECT_EQ(AreaEfficiency(two_order.tasks[0], two_order.capacity).status().code(),
            absl::StatusCode::kFailedPrecondition);
}

TEST(ComputeBestAlphaTest, Examples) {
  const GridPtr grid = MakeGrid({2, 4});
  const StaticInstance two_order = TwoOrderInstance();
  // Block 0 requesters: the flat task and the two cheap-at-first tasks.
  std::vector<const Task*> b0 = {&two_order.tasks[0], &two_order.tasks[2],
                                 &two_order.tasks[4]};
  EXPECT_EQ(ComputeBestAlpha(0, b0, two_order.capacity[0], 0.05), 0u);
  std::vector<const Task*> b1 = {&two_order.tasks[1], &two_order.tasks[3],
                                 &two_order.tasks[5]};
  EXPECT_EQ(ComputeBestAlpha(1, b1, two_order.capacity[1], 0.05), 1u);

  const Task t = MakeTask(0, 1, {{0, Curve(grid, {0.1, 0.1})}});
  std::vector<const Task*> one = {&t};
  EXPECT_EQ(ComputeBestAlpha(0, one, Curve(grid, {0, 1}), 0.05), 1u);

  // No candidates: the order with the most room.
  EXPECT_EQ(ComputeBestAlpha(0, {}, Curve(grid, {2, 1}), 0.05), 0u);
  EXPECT_EQ(ComputeBestAlpha(0, {}, Curve(grid, {1, 2}), 0.05), 1u);

  const GridPtr single = MakeGrid({3});
  const Task s = MakeTask(0, 1, {{0, Curve(single, {5})}});
  std::vector<const Task*> ss = {&s};
  EXPECT_EQ(ComputeBestAlpha(0, ss, Curve(single, {1}), 0.05), 0u);
}

TEST(DpkEfficiencyTest, Examples) {
  const StaticInstance two_order = TwoOrderInstance();
  const std::vector<size_t> best = {0, 1};
  EXPECT_DOUBLE_EQ(DpkEfficiency(two_order.tasks[2], best, two_order.capacity).value, 2);
  EXPECT_DOUBLE_EQ(DpfEfficiency(two_order.tasks[2], two_order.capacity).value, 1 / 1.5);

  Task heavy = two_order.tasks[2];
  heavy.weight = 2;
  EXPECT_DOUBLE_EQ(DpkEfficiency(heavy, best, two_order.capacity).value, 4);

  // Demands nothing at the best order.
  const GridPtr grid = MakeGrid({2, 4});
  const Task free_task = MakeTask(0, 1, {{0, Curve(grid, {0, 3})}});
  EXPECT_EQ(DpkEfficiency(free_task, best, two_order.capacity).value,
            kUnboundedEfficiency);
}

TEST(DpkEfficiencyTest, SingleOrderMatchesArea) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const StaticInstance inst = RandomMultiBlock(rng, 10, 4, 1);
    const std::vector<size_t> best(inst.capacity.size(), 0);
    for (const Task& t : inst.tasks) {
      auto area = AreaEfficiency(t, inst.capacity);
      ASSERT_TRUE(area.ok());
      EXPECT_DOUBLE_EQ(DpkEfficiency(t, best, inst.capacity).value,
                       area->value);
    }
  }
}

TEST(SortTest, TieBreakByArrivalThenId) {
  const GridPtr grid = MakeGrid({2});
  std::vector<Task> tasks = {MakeTask(5, 1, {{0, Curve(grid, {0.5})}}, 2),
                             MakeTask(3, 1, {{0, Curve(grid, {0.5})}}, 2),
                             MakeTask(9, 1, {{0, Curve(grid, {0.5})}}, 1),
                             MakeTask(1, 1, {{0, Curve(grid, {0.1})}}, 9)};
  const auto ptrs = Pointers(tasks);
  std::vector<EfficiencyScore> scores;
  for (const Task& t : tasks) {
    scores.push_back(DpfEfficiency(t, std::vector<RdpCurve>{Curve(grid, {1})}));
  }
  const auto sorted = SortByEfficiency(ptrs, scores);
  std::vector<TaskId> ids;
  for (const Task* t : sorted) ids.push_back(t->id);
  EXPECT_EQ(ids, (std::vector<TaskId>{1, 9, 3, 5}));
}

TEST(GreedyTest, WideVersusNarrow) {
  const StaticInstance inst = WideNarrowInstance();
  const auto dpk = RunBatch(inst, Spec(SchedulerKind::kDpk));
  const auto dpf = RunBatch(inst, Spec(SchedulerKind::kDpf));
  const auto opt = RunBatch(inst, Spec(SchedulerKind::kOptimal));
  std::vector<TaskId> dpk_sorted = dpk;
  std::sort(dpk_sorted.begin(), dpk_sorted.end());
  EXPECT_EQ(dpk_sorted, (std::vector<TaskId>{2, 3, 4}));
  EXPECT_EQ(dpf, (std::vector<TaskId>{1}));
  EXPECT_EQ(opt.size(), 3u);
}

TEST(GreedyTest, BestOrderPerBlock) {
  const StaticInstance inst = TwoOrderInstance();
  EXPECT_EQ(BruteForcePrivacy(ToKnapsack(inst)), 4);
  EXPECT_EQ(RunBatch(inst, Spec(SchedulerKind::kDpk)).size(), 4u);
  EXPECT_EQ(RunBatch(inst, Spec(SchedulerKind::kDpf)).size(), 2u);
  EXPECT_EQ(RunBatch(inst, Spec(SchedulerKind::kOptimal)).size(), 4u);
}

TEST(GreedyTest, SkipsAndContinues) {
  const GridPtr grid = MakeGrid({2});
  std::vector<Task> tasks = {MakeTask(0, 1, {{0, Curve(grid, {0.8})}}),
                             MakeTask(1, 1, {{0, Curve(grid, {0.5})}}),
                             MakeTask(2, 1, {{0, Curve(grid, {0.2})}})};
  StaticInstance inst{grid, {Curve(grid, {1})}, tasks};
  auto blocks = BlocksOf(inst);
  const auto ptrs = Pointers(inst.tasks);
  EXPECT_EQ(GreedyAllocate(ptrs, blocks, inst.capacity),
            (std::vector<TaskId>{0, 2}));
  EXPECT_DOUBLE_EQ(blocks[0].consumed()[0], 1.0);
  EXPECT_TRUE(GreedyAllocate({}, blocks, inst.capacity).empty());
}

TEST(GreedyTest, AllOrNothingAcrossBlocks) {
  const GridPtr grid = MakeGrid({2});
  StaticInstance inst{grid, {Curve(grid, {1}), Curve(grid, {0.1})}, {}};
  inst.tasks.push_back(
      MakeTask(0, 1, {{0, Curve(grid, {0.5})}, {1, Curve(grid, {0.5})}}));
  auto blocks = BlocksOf(inst);
  const auto ptrs = Pointers(inst.tasks);
  EXPECT_TRUE(GreedyAllocate(ptrs, blocks, inst.capacity).empty());
  EXPECT_TRUE(blocks[0].consumed().IsZero());
}

TEST(FcfsTest, Examples) {
  StaticInstance inst = WideNarrowInstance();
  {
    auto blocks = BlocksOf(inst);
    EXPECT_EQ(FcfsAllocate(Pointers(inst.tasks), blocks, inst.capacity),
              (std::vector<TaskId>{1}));
  }
  inst.tasks[0].arrival = 3;
  for (int i = 1; i < 4; ++i) inst.tasks[i].arrival = i - 1;
  {
    auto blocks = BlocksOf(inst);
    EXPECT_EQ(FcfsAllocate(Pointers(inst.tasks), blocks, inst.capacity),
              (std::vector<TaskId>{2, 3, 4}));
  }
}

TEST(FcfsTest, SameSetAsDpkWhenEverythingFits) {
  const GridPtr grid = MakeGrid({2, 4});
  StaticInstance inst{grid, {Curve(grid, {5, 5}), Curve(grid, {5, 5})}, {}};
  for (int i = 0; i < 6; ++i) {
    inst.tasks.push_back(MakeTask(i, 1 + i, {{i % 2, Curve(grid, {0.5, 0.7})}},
                                  i));
  }
  auto fcfs = RunBatch(inst, Spec(SchedulerKind::kFcfs));
  auto dpk = RunBatch(inst, Spec(SchedulerKind::kDpk));
  EXPECT_NE(fcfs, dpk);
  std::sort(fcfs.begin(), fcfs.end());
  std::sort(dpk.begin(), dpk.end());
  EXPECT_EQ(fcfs, dpk);
  EXPECT_EQ(fcfs.size(), 6u);
}

TEST(OptimalTest, DominatesHeuristics) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 40; ++trial) {
    const StaticInstance inst = RandomMultiBlock(rng, 10, 3, 3);
    const double opt = WeightOf(inst, RunBatch(inst, Spec(SchedulerKind::kOptimal)));
    EXPECT_NEAR(opt, BruteForcePrivacy(ToKnapsack(inst)), 1e-9);
    for (SchedulerKind k :
         {SchedulerKind::kDpk, SchedulerKind::kDpf, SchedulerKind::kFcfs}) {
      EXPECT_LE(WeightOf(inst, RunBatch(inst, Spec(k))), opt + 1e-9);
    }
  }
}

// Density ordering alone is not a 1/2-approximation: a tiny dense task can
// block a heavy one that fills the block. The bound is only checked on random
// instances.
TEST(DpkBoundTest, DensityGreedyWorstCase) {
  const GridPtr grid = MakeGrid({2});
  StaticInstance inst{grid, {Curve(grid, {1})}, {}};
  inst.tasks.push_back(MakeTask(0, 1, {{0, Curve(grid, {0.01})}}));
  inst.tasks.push_back(MakeTask(1, 10, {{0, Curve(grid, {1})}}));
  const double dpk = WeightOf(inst, RunBatch(inst, Spec(SchedulerKind::kDpk)));
  EXPECT_EQ(dpk, 1);
  EXPECT_EQ(BruteForcePrivacy(ToKnapsack(inst)), 10);
}

TEST(SchedulerKindTest, ParseAndName) {
  for (SchedulerKind k : {SchedulerKind::kDpk, SchedulerKind::kDpf,
                          SchedulerKind::kFcfs, SchedulerKind::kOptimal}) {
    auto parsed = ParseSchedulerKind(SchedulerName(k));
    ASSERT_TRUE(parsed.ok());
    EXPECT_EQ(*parsed, k);
    EXPECT_EQ(MakeScheduler(Spec(k))->name(), SchedulerName(k));
  }
  EXPECT_FALSE(ParseSchedulerKind("drf").ok());
}

}  // namespace
}  // namespace privpack
