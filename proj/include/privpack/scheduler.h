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

#ifndef PRIVPACK_SCHEDULER_H_
#define PRIVPACK_SCHEDULER_H_

#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "privpack/block.h"
#include "privpack/knapsack.h"
#include "privpack/rdp.h"
#include "privpack/task.h"

namespace privpack {

// Efficiency e_i of a task; tasks are granted in decreasing order.
struct EfficiencyScore {
  TaskId task = 0;
  double value = 0;
};

// Sentinel for tasks that demand nothing under the metric; sorted first.
inline constexpr double kUnboundedEfficiency =
    std::numeric_limits<double>::infinity();

// In every function below `capacities` is indexed by block id and holds the
// net remaining capacity c_j(alpha) of each block.

// DPF: w / max over requested (j, alpha) of d/c. Zero-capacity coordinates
// are skipped, unless one requested block has zero capacity and positive
// demand at every order, in which case the task is infeasible and scores 0.
EfficiencyScore DpfEfficiency(const Task& task,
                              std::span<const RdpCurve> capacities);

// Area metric w / sum_j d_j / c_j. Only defined on single-order grids.
absl::StatusOr<EfficiencyScore> AreaEfficiency(
    const Task& task, std::span<const RdpCurve> capacities);

// Order maximizing the approximate single-block knapsack weight over the
// tasks requesting `block` (approximation factor 2/3 * eta). Ties go to the
// smaller order. With no candidates, the order with the most remaining
// capacity.
size_t ComputeBestAlpha(BlockId block, std::span<const Task* const> candidates,
                        const RdpCurve& capacity, double eta);

// DPK: w / sum_j d_{j, best_j} / c_{j, best_j}. `best_alpha` is indexed by
// block id.
EfficiencyScore DpkEfficiency(const Task& task,
                              std::span<const size_t> best_alpha,
                              std::span<const RdpCurve> capacities);

// Sorts tasks by (score desc, arrival asc, id asc).
std::vector<const Task*> SortByEfficiency(
    std::span<const Task* const> tasks,
    std::span<const EfficiencyScore> scores);

// Walks `ordered` and grants every task that all its requested block filters
// accept against `available` (gross unlocked budget per block id), consuming
// on every requested block. Skipped tasks do not stop the walk. Returns the
// granted ids in grant order.
std::vector<TaskId> GreedyAllocate(std::span<const Task* const> ordered,
                                   std::vector<Block>& blocks,
                                   std::span<const RdpCurve> available);

// GreedyAllocate in (arrival, id) order.
std::vector<TaskId> FcfsAllocate(std::span<const Task* const> tasks,
                                 std::vector<Block>& blocks,
                                 std::span<const RdpCurve> available);

// One scheduling invocation: the pending tasks and the block state at `now`.
struct Batch {
  Tick now = 0;
  std::span<const Task* const> pending;
  std::vector<Block>* blocks = nullptr;
  std::span<const RdpCurve> available;  // gross unlocked budget, by block id
  std::span<const RdpCurve> remaining;  // net capacity floored at 0, by id
};

class Scheduler {
 public:
  virtual ~Scheduler() = default;
  virtual std::string name() const = 0;
  // Grants tasks from the batch, consuming block budget. Returns the granted
  // ids in grant order.
  virtual absl::StatusOr<std::vector<TaskId>> Schedule(const Batch& batch) = 0;
};

enum class SchedulerKind { kDpk, kDpf, kFcfs, kOptimal };

struct SchedulerSpec {
  SchedulerKind kind = SchedulerKind::kDpk;
  double eta = 0.05;          // dpk
  double fair_share = 50;     // dpf: N_share, reporting only
  ExactLimits limits;         // optimal
};

std::string SchedulerName(SchedulerKind kind);
absl::StatusOr<SchedulerKind> ParseSchedulerKind(std::string_view name);

std::unique_ptr<Scheduler> MakeScheduler(const SchedulerSpec& spec);

}  // namespace privpack

#endif  // PRIVPACK_SCHEDULER_H_
