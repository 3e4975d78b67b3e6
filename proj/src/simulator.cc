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

#include "privpack/simulator.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "privpack/status_macros.h"

namespace privpack {
namespace {

int64_t BlocksArrivedBy(const BlockStreamSpec& spec, Tick t) {
  if (t < 0) return 0;
  const int64_t later = spec.count - spec.initial_blocks;
  return spec.initial_blocks + std::min(later, t / spec.interval);
}

absl::Status ValidateWorkload(const Workload& workload) {
  if (workload.tasks.empty()) return absl::OkStatus();
  if (workload.grid == nullptr) {
    return absl::InvalidArgumentError("workload has tasks but no grid");
  }
  std::unordered_set<TaskId> seen;
  for (const TaskTemplate& t : workload.tasks) {
    if (!seen.insert(t.id).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate task id ", t.id));
    }
    if (!(t.weight > 0) || !std::isfinite(t.weight)) {
      return absl::InvalidArgumentError(
          absl::StrCat("task ", t.id, ": weight must be positive"));
    }
    if (t.arrival < 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("task ", t.id, ": negative arrival"));
    }
    if (t.timeout <= 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("task ", t.id, ": timeout must be positive"));
    }
    if (!SameGrid(t.demand.grid(), workload.grid)) {
      return absl::InvalidArgumentError(
          absl::StrCat("task ", t.id, ": demand is not on the workload grid"));
    }
  }
  return absl::OkStatus();
}

// Tasks sorted by (arrival, id); the workload order is not trusted.
std::vector<const TaskTemplate*> ArrivalOrder(const Workload& workload) {
  std::vector<const TaskTemplate*> order;
  order.reserve(workload.tasks.size());
  for (const TaskTemplate& t : workload.tasks) order.push_back(&t);
  std::stable_sort(order.begin(), order.end(),
                   [](const TaskTemplate* a, const TaskTemplate* b) {
                     if (a->arrival != b->arrival) {
                       return a->arrival < b->arrival;
                     }
                     return a->id < b->id;
                   });
  return order;
}

Task MakeTask(const TaskTemplate& t, DemandVector demand) {
  Task task;
  task.id = t.id;
  task.weight = t.weight;
  task.arrival = t.arrival;
  task.timeout = t.timeout;
  task.mechanism = t.mechanism;
  task.demand = std::move(demand);
  return task;
}

int64_t CountViolations(const std::vector<Block>& blocks) {
  int64_t violations = 0;
  for (const Block& b : blocks) {
    if (!b.HasSurvivingOrder()) ++violations;
  }
  return violations;
}

// Shared bookkeeping for online and offline runs.
class Run {
 public:
  // A zero `delay_unit` records every delay as zero (offline runs).
  Run(const SchedulerSpec& spec, Tick delay_unit)
      : scheduler_(MakeScheduler(spec)),
        n_share_(spec.fair_share),
        delay_unit_(delay_unit) {}

  std::vector<Block>& blocks() { return blocks_; }
  SimulationResult& result() { return result_; }

  void AddTask(Task task) {
    tasks_.push_back(std::make_unique<Task>(std::move(task)));
    pending_.push_back(tasks_.back().get());
  }

  void Evict(Tick now) {
    auto expired = [&](const Task* t) {
      if (!t->ExpiredAt(now)) return false;
      result_.evicted.push_back(t->id);
      return true;
    };
    pending_.erase(std::remove_if(pending_.begin(), pending_.end(), expired),
                   pending_.end());
  }

  absl::Status Schedule(Tick now, std::span<const RdpCurve> available,
                        std::span<const RdpCurve> remaining) {
    if (pending_.empty()) return absl::OkStatus();
    Batch batch;
    batch.now = now;
    batch.pending = pending_;
    batch.blocks = &blocks_;
    batch.available = available;
    batch.remaining = remaining;
    const auto start = std::chrono::steady_clock::now();
    absl::StatusOr<std::vector<TaskId>> granted = scheduler_->Schedule(batch);
    const double seconds = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start)
                               .count();
    RETURN_IF_ERROR(granted.status());
    result_.metrics.runtime_seconds += seconds;

    StepRecord step;
    step.tick = now;
    step.pending = static_cast<int64_t>(pending_.size());
    step.granted = *granted;
    step.runtime_seconds = seconds;
    result_.steps.push_back(std::move(step));

    std::unordered_set<TaskId> ids(granted->begin(), granted->end());
    std::unordered_map<TaskId, const Task*> by_id;
    for (const Task* t : pending_) by_id[t->id] = t;
    for (TaskId id : *granted) {
      const Task* t = by_id.at(id);
      result_.granted.push_back(id);
      result_.grant_ticks.push_back(now);
      granted_tasks_.push_back(t);
      result_.metrics.delays.push_back(
          delay_unit_ == 0 ? 0.0
                           : static_cast<double>(now - t->arrival) /
                                 static_cast<double>(delay_unit_));
    }
    pending_.erase(std::remove_if(pending_.begin(), pending_.end(),
                                  [&](const Task* t) {
                                    return ids.contains(t->id);
                                  }),
                   pending_.end());
    result_.metrics.safety_violations += CountViolations(blocks_);
    if (result_.metrics.safety_violations > 0) {
      return absl::InternalError(
          absl::StrCat("filter safety violated at tick ", now));
    }
    return absl::OkStatus();
  }

  SimulationResult Finish() {
    MetricsReport& m = result_.metrics;
    m.allocated_count = static_cast<int64_t>(granted_tasks_.size());
    for (const Task* t : granted_tasks_) m.allocated_weight += t->weight;
    m.delay = SummarizeDelays(m.delays);
    m.evicted_count = static_cast<int64_t>(result_.evicted.size());
    m.pending_at_end = static_cast<int64_t>(pending_.size());

    int64_t fair_total = 0;
    for (const auto& t : tasks_) {
      if (IsFairShareTask(*t, blocks_, n_share_)) ++fair_total;
    }
    int64_t fair_granted = 0;
    for (const Task* t : granted_tasks_) {
      if (IsFairShareTask(*t, blocks_, n_share_)) ++fair_granted;
    }
    if (m.allocated_count > 0) {
      m.fair_share_of_allocated =
          static_cast<double>(fair_granted) / m.allocated_count;
    }
    if (fair_total > 0) {
      m.fair_share_allocated = static_cast<double>(fair_granted) / fair_total;
    }
    result_.blocks = std::move(blocks_);
    return std::move(result_);
  }

 private:
  std::unique_ptr<Scheduler> scheduler_;
  double n_share_;
  Tick delay_unit_;
  std::vector<Block> blocks_;
  std::vector<std::unique_ptr<Task>> tasks_;
  std::vector<const Task*> pending_;
  std::vector<const Task*> granted_tasks_;
  SimulationResult result_;
};

Tick AutoHorizon(const Workload& workload, const SimulationConfig& config) {
  const BlockStreamSpec& b = config.blocks;
  Tick last = b.count > 0 ? b.ArrivalOf(b.count - 1) : 0;
  for (const TaskTemplate& t : workload.tasks) last = std::max(last, t.arrival);
  if (config.period == kUnboundedPeriod) return last;
  const Tick end = last + static_cast<Tick>(b.unlock_steps) * config.period;
  return (end + config.period - 1) / config.period * config.period;
}

}  // namespace

Tick BlockStreamSpec::ArrivalOf(BlockId id) const {
  if (id < initial_blocks) return 0;
  return (id - initial_blocks + 1) * interval;
}

absl::Status ValidateBlockStream(const BlockStreamSpec& spec) {
  if (spec.count < 0) {
    return absl::InvalidArgumentError("blocks.count must be >= 0");
  }
  if (spec.initial_blocks < 0 || spec.initial_blocks > spec.count) {
    return absl::InvalidArgumentError(
        "blocks.initial must lie in [0, blocks.count]");
  }
  if (spec.interval <= 0) {
    return absl::InvalidArgumentError("blocks.interval must be positive");
  }
  if (spec.unlock_steps < 1) {
    return absl::InvalidArgumentError("blocks.unlock_steps must be >= 1");
  }
  return DpGuarantee::Create(spec.global.epsilon, spec.global.delta).status();
}

DelayStats SummarizeDelays(std::vector<double> delays) {
  DelayStats out;
  if (delays.empty()) return out;
  std::sort(delays.begin(), delays.end());
  double sum = 0;
  for (double d : delays) sum += d;
  out.mean = sum / static_cast<double>(delays.size());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(delays.size() - 1);
    const size_t lo = static_cast<size_t>(std::floor(pos));
    const size_t hi = std::min(lo + 1, delays.size() - 1);
    return delays[lo] + (pos - static_cast<double>(lo)) * (delays[hi] - delays[lo]);
  };
  out.median = quantile(0.5);
  out.p95 = quantile(0.95);
  return out;
}

bool IsFairShareTask(const Task& task, const std::vector<Block>& blocks,
                     double n_share) {
  if (!(n_share > 0)) return false;
  for (const auto& [block, demand] : task.demand.entries()) {
    absl::StatusOr<NormalizedDemand> n =
        NormalizeDemand(demand, blocks[block].capacity());
    if (!n.ok() || n->min_fraction > 1.0 / n_share) return false;
  }
  return true;
}

absl::StatusOr<SimulationResult> RunOnline(const Workload& workload,
                                           const SimulationConfig& config) {
  RETURN_IF_ERROR(ValidateBlockStream(config.blocks));
  RETURN_IF_ERROR(ValidateWorkload(workload));
  if (config.period <= 0) {
    return absl::InvalidArgumentError("T must be positive");
  }
  const BlockStreamSpec& stream = config.blocks;
  GridPtr grid = workload.grid != nullptr ? workload.grid : AlphaGrid::Default();
  ASSIGN_OR_RETURN(RdpCurve capacity, BlockCapacityCurve(stream.global, grid));
  const Tick horizon =
      config.horizon >= 0 ? config.horizon : AutoHorizon(workload, config);

  Run run(config.scheduler, stream.interval);
  std::vector<Block>& blocks = run.blocks();
  const std::vector<const TaskTemplate*> order = ArrivalOrder(workload);
  size_t next_task = 0;
  std::vector<const TaskTemplate*> held;

  for (Tick now = 0; now <= horizon; ++now) {
    while (static_cast<int64_t>(blocks.size()) < stream.count &&
           stream.ArrivalOf(static_cast<BlockId>(blocks.size())) <= now) {
      const BlockId id = static_cast<BlockId>(blocks.size());
      blocks.emplace_back(id, stream.ArrivalOf(id), capacity,
                          stream.unlock_steps);
    }
    while (next_task < order.size() && order[next_task]->arrival <= now) {
      held.push_back(order[next_task++]);
    }
    std::vector<const TaskTemplate*> still_held;
    for (const TaskTemplate* t : held) {
      absl::StatusOr<DemandVector> demand =
          ResolveDemand(*t, static_cast<int64_t>(blocks.size()));
      if (demand.ok()) {
        run.AddTask(MakeTask(*t, *std::move(demand)));
      } else if (absl::IsFailedPrecondition(demand.status())) {
        if (t->timeout != kNoTimeout && now - t->arrival >= t->timeout) {
          run.result().evicted.push_back(t->id);
        } else {
          still_held.push_back(t);
        }
      } else {
        return demand.status();
      }
    }
    held = std::move(still_held);
    run.Evict(now);

    const bool scheduling = config.period == kUnboundedPeriod
                                ? now == horizon
                                : now % config.period == 0;
    if (!scheduling) continue;
    std::vector<RdpCurve> available;
    std::vector<RdpCurve> remaining;
    available.reserve(blocks.size());
    remaining.reserve(blocks.size());
    for (const Block& b : blocks) {
      ASSIGN_OR_RETURN(RdpCurve budget, UnlockedBudget(b, now, config.period));
      ASSIGN_OR_RETURN(RdpCurve net, UnlockedCapacity(b, now, config.period));
      available.push_back(std::move(budget));
      remaining.push_back(std::move(net));
    }
    RETURN_IF_ERROR(run.Schedule(now, available, remaining));
  }
  for (const TaskTemplate* t : held) run.result().evicted.push_back(t->id);
  return run.Finish();
}

absl::StatusOr<SimulationResult> RunOffline(const Workload& workload,
                                            const BlockStreamSpec& stream,
                                            const SchedulerSpec& scheduler) {
  RETURN_IF_ERROR(ValidateBlockStream(stream));
  RETURN_IF_ERROR(ValidateWorkload(workload));
  GridPtr grid = workload.grid != nullptr ? workload.grid : AlphaGrid::Default();
  ASSIGN_OR_RETURN(RdpCurve capacity, BlockCapacityCurve(stream.global, grid));

  Run run(scheduler, /*delay_unit=*/0);
  std::vector<Block>& blocks = run.blocks();
  for (BlockId id = 0; id < stream.count; ++id) {
    blocks.emplace_back(id, 0, capacity, 1);
  }
  const Tick first_block = stream.count > 0 ? stream.ArrivalOf(0) : 0;
  for (const TaskTemplate* t : ArrivalOrder(workload)) {
    // "Most recent" means most recent at arrival, as in the online run.
    const int64_t visible =
        t->blocks.uses_ids()
            ? stream.count
            : BlocksArrivedBy(stream, std::max(t->arrival, first_block));
    ASSIGN_OR_RETURN(DemandVector demand, ResolveDemand(*t, visible));
    run.AddTask(MakeTask(*t, std::move(demand)));
  }
  std::vector<RdpCurve> available(blocks.size(), capacity);
  RETURN_IF_ERROR(run.Schedule(0, available, available));
  return run.Finish();
}

}  // namespace privpack
