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

#ifndef PRIVPACK_SIMULATOR_H_
#define PRIVPACK_SIMULATOR_H_

#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"
#include "privpack/block.h"
#include "privpack/rdp.h"
#include "privpack/scheduler.h"
#include "privpack/task.h"

namespace privpack {

// Blocks 0..initial_blocks-1 arrive at tick 0; the rest arrive one every
// `interval` ticks until `count` blocks exist.
struct BlockStreamSpec {
  int64_t count = 1;
  int64_t initial_blocks = 1;
  Tick interval = 1;
  DpGuarantee global{10.0, 1e-7};
  int unlock_steps = 1;  // N

  Tick ArrivalOf(BlockId id) const;
};

absl::Status ValidateBlockStream(const BlockStreamSpec& spec);

struct SimulationConfig {
  BlockStreamSpec blocks;
  Tick period = 1;   // T; kUnboundedPeriod runs one batch at the horizon
  Tick horizon = -1; // last tick simulated; -1 picks one automatically
  SchedulerSpec scheduler;
};

struct DelayStats {
  double mean = 0;
  double median = 0;
  double p95 = 0;
};

// Linear interpolation between order statistics. Empty input gives zeros.
DelayStats SummarizeDelays(std::vector<double> delays);

struct MetricsReport {
  int64_t allocated_count = 0;
  double allocated_weight = 0;
  std::vector<double> delays;  // block inter-arrival periods, grant order
  DelayStats delay;
  double runtime_seconds = 0;
  int64_t evicted_count = 0;
  int64_t pending_at_end = 0;
  // Fair-share tasks among the granted ones, and the share of all
  // fair-share tasks that got granted. Zero when the denominator is zero.
  double fair_share_of_allocated = 0;
  double fair_share_allocated = 0;
  int64_t safety_violations = 0;
};

struct StepRecord {
  Tick tick = 0;
  int64_t pending = 0;
  std::vector<TaskId> granted;
  double runtime_seconds = 0;
};

struct SimulationResult {
  MetricsReport metrics;
  std::vector<StepRecord> steps;
  std::vector<TaskId> granted;  // grant order
  std::vector<Tick> grant_ticks;
  std::vector<TaskId> evicted;
  std::vector<Block> blocks;    // final state
};

// True when every requested block sees a normalized demand of at most
// 1 / n_share against the full block capacity.
bool IsFairShareTask(const Task& task, const std::vector<Block>& blocks,
                     double n_share);

// Online run with batching every T and unlocking over N steps.
absl::StatusOr<SimulationResult> RunOnline(const Workload& workload,
                                           const SimulationConfig& config);

// One batch over all tasks with every block present and fully unlocked.
// Arrival ticks only break ties; every delay is zero.
absl::StatusOr<SimulationResult> RunOffline(const Workload& workload,
                                            const BlockStreamSpec& blocks,
                                            const SchedulerSpec& scheduler);

}  // namespace privpack

#endif  // PRIVPACK_SIMULATOR_H_
