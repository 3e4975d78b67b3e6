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

#ifndef PRIVPACK_TESTS_TEST_UTIL_H_
#define PRIVPACK_TESTS_TEST_UTIL_H_

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "privpack/block.h"
#include "privpack/knapsack.h"
#include "privpack/rdp.h"
#include "privpack/scheduler.h"
#include "privpack/task.h"

namespace privpack_test {

using privpack::Block;
using privpack::BlockId;
using privpack::GridPtr;
using privpack::RdpCurve;
using privpack::Task;
using privpack::TaskId;

GridPtr MakeGrid(std::vector<double> orders);
RdpCurve Curve(const GridPtr& grid, std::vector<double> values);
Task MakeTask(TaskId id, double weight,
              std::vector<std::pair<BlockId, RdpCurve>> demand,
              privpack::Tick arrival = 0);
std::vector<const Task*> Pointers(const std::vector<Task>& tasks);

// A fixed set of tasks over fully unlocked blocks with ids 0..n-1.
struct StaticInstance {
  GridPtr grid;
  std::vector<RdpCurve> capacity;
  std::vector<Task> tasks;
};

// Three unit blocks; T1 needs 0.6 of each, T2..T4 need 0.7 of one block.
StaticInstance WideNarrowInstance();
// Two unit blocks, two orders. Per block: one task needing 0.6 at both
// orders and two needing 0.5 at the block's good order and 1.5 at the other.
StaticInstance TwoOrderInstance();

// Runs one batch of `spec` over the instance and returns granted ids.
std::vector<TaskId> RunBatch(const StaticInstance& inst,
                             const privpack::SchedulerSpec& spec);
double WeightOf(const StaticInstance& inst, const std::vector<TaskId>& ids);

privpack::PrivacyKnapsackInstance ToKnapsack(const StaticInstance& inst);

// Oracles. Brute force over all subsets (and, for the privacy knapsack,
// over every per-block order assignment).
double BruteForceScalar(const std::vector<double>& demands,
                        const std::vector<double>& weights, double capacity);
double BruteForcePrivacy(const privpack::PrivacyKnapsackInstance& inst);

// Numerical integration of the subsampled Gaussian moment at order alpha.
long double SubsampledGaussianQuadrature(long double sigma, long double q,
                                         int alpha);
// Direct evaluation of the Laplace Renyi divergence in long double.
long double LaplaceClosedForm(long double scale, long double alpha);

// Random single-block instance with up to `max_orders` orders and
// capacities drawn so that a handful of tasks fit.
StaticInstance RandomSingleBlock(std::mt19937_64& rng, int max_tasks,
                                 int max_orders);
// Random multi-block instance; tasks request a random subset of blocks.
StaticInstance RandomMultiBlock(std::mt19937_64& rng, int max_tasks,
                                int max_blocks, int max_orders);

}  // namespace privpack_test

#endif  // PRIVPACK_TESTS_TEST_UTIL_H_
