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
#include <map>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "privpack/status_macros.h"

namespace privpack {
namespace {

// Ratio d / c with the conventions shared by the area and DPK metrics.
double NormalizedTerm(double demand, double capacity) {
  if (demand == 0.0) return 0.0;
  if (!(capacity > 0.0)) return std::numeric_limits<double>::infinity();
  return demand / capacity;
}

EfficiencyScore FromDenominator(const Task& task, double denominator) {
  if (denominator == 0.0) return {task.id, kUnboundedEfficiency};
  return {task.id, task.weight / denominator};
}

bool Precedes(const Task& a, double score_a, const Task& b, double score_b) {
  if (score_a != score_b) return score_a > score_b;
  if (a.arrival != b.arrival) return a.arrival < b.arrival;
  return a.id < b.id;
}

class GreedyScheduler : public Scheduler {
 public:
  absl::StatusOr<std::vector<TaskId>> Schedule(const Batch& batch) override {
    ASSIGN_OR_RETURN(std::vector<EfficiencyScore> scores, Score(batch));
    const std::vector<const Task*> ordered =
        SortByEfficiency(batch.pending, scores);
    return GreedyAllocate(ordered, *batch.blocks, batch.available);
  }

 protected:
  virtual absl::StatusOr<std::vector<EfficiencyScore>> Score(
      const Batch& batch) = 0;
};

class DpkScheduler : public GreedyScheduler {
 public:
  explicit DpkScheduler(double eta) : eta_(eta) {}
  std::string name() const override { return "dpk"; }

 protected:
  absl::StatusOr<std::vector<EfficiencyScore>> Score(
      const Batch& batch) override {
    // Best orders are computed once per batch, before any grant.
    std::map<BlockId, std::vector<const Task*>> requesters;
    for (const Task* task : batch.pending) {
      for (const auto& [block, demand] : task->demand.entries()) {
        requesters[block].push_back(task);
      }
    }
    std::vector<size_t> best_alpha(batch.remaining.size(), 0);
    for (const auto& [block, candidates] : requesters) {
      best_alpha[block] = ComputeBestAlpha(block, candidates,
                                           batch.remaining[block], eta_);
    }
    std::vector<EfficiencyScore> scores;
    scores.reserve(batch.pending.size());
    for (const Task* task : batch.pending) {
      scores.push_back(DpkEfficiency(*task, best_alpha, batch.remaining));
    }
    return scores;
  }

 private:
  double eta_;
};

class DpfScheduler : public GreedyScheduler {
 public:
  std::string name() const override { return "dpf"; }

 protected:
  absl::StatusOr<std::vector<EfficiencyScore>> Score(
      const Batch& batch) override {
    std::vector<EfficiencyScore> scores;
    scores.reserve(batch.pending.size());
    for (const Task* task : batch.pending) {
      scores.push_back(DpfEfficiency(*task, batch.remaining));
    }
    return scores;
  }
};

class FcfsScheduler : public Scheduler {
 public:
  std::string name() const override { return "fcfs"; }
  absl::StatusOr<std::vector<TaskId>> Schedule(const Batch& batch) override {
    return FcfsAllocate(batch.pending, *batch.blocks, batch.available);
  }
};

// Solves the batch exactly. Capacities are gross budget minus consumption,
// left negative where a block already overshoots an order so that no
// requester can be placed there.
class OptimalScheduler : public Scheduler {
 public:
  explicit OptimalScheduler(ExactLimits limits) : limits_(limits) {}
  std::string name() const override { return "optimal"; }

  absl::StatusOr<std::vector<TaskId>> Schedule(const Batch& batch) override {
    std::vector<Block>& blocks = *batch.blocks;
    std::map<BlockId, size_t> dense;
    PrivacyKnapsackInstance inst;
    for (const Task* task : batch.pending) {
      KnapsackItem item;
      item.weight = task->weight;
      for (const auto& [block, demand] : task->demand.entries()) {
        auto [it, inserted] = dense.emplace(block, inst.capacities.size());
        if (inserted) {
          RdpCurve cap = batch.available[block] - blocks[block].consumed();
          const RdpCurve& full = blocks[block].capacity();
          for (size_t a = 0; a < cap.size(); ++a) {
            if (!(full[a] > 0.0)) cap[a] = -1.0;  // never usable
          }
          inst.capacities.push_back(std::move(cap));
        }
        item.demands.push_back({it->second, demand});
      }
      inst.items.push_back(std::move(item));
    }
    ASSIGN_OR_RETURN(PrivacyKnapsackSolution solution,
                     ExactPrivacyKnapsack(inst, limits_));
    std::vector<TaskId> granted;
    for (size_t i : solution.selected) {
      const Task& task = *batch.pending[i];
      for (const auto& [block, demand] : task.demand.entries()) {
        RETURN_IF_ERROR(blocks[block].Consume(demand, batch.available[block]));
      }
      granted.push_back(task.id);
    }
    return granted;
  }

 private:
  ExactLimits limits_;
};

}  // namespace

EfficiencyScore DpfEfficiency(const Task& task,
                              std::span<const RdpCurve> capacities) {
  double share = 0;
  for (const auto& [block, demand] : task.demand.entries()) {
    if (demand.IsZero()) continue;
    const RdpCurve& cap = capacities[block];
    bool infeasible = true;
    for (size_t a = 0; a < demand.size(); ++a) {
      if (cap[a] > 0.0) {
        infeasible = false;
        share = std::max(share, demand[a] / cap[a]);
      }
    }
    if (infeasible) return {task.id, 0.0};
  }
  return FromDenominator(task, share);
}

absl::StatusOr<EfficiencyScore> AreaEfficiency(
    const Task& task, std::span<const RdpCurve> capacities) {
  double denominator = 0;
  for (const auto& [block, demand] : task.demand.entries()) {
    if (demand.size() != 1) {
      return absl::FailedPreconditionError(
          "area efficiency needs a single-order grid; use the DPK metric");
    }
    denominator += NormalizedTerm(demand[0], capacities[block][0]);
  }
  return FromDenominator(task, denominator);
}

size_t ComputeBestAlpha(BlockId block, std::span<const Task* const> candidates,
                        const RdpCurve& capacity, double eta) {
  if (candidates.empty()) {
    size_t best = 0;
    for (size_t a = 1; a < capacity.size(); ++a) {
      if (capacity[a] > capacity[best]) best = a;
    }
    return best;
  }
  SingleBlockInstance inst;
  inst.capacity = capacity;
  for (const Task* task : candidates) {
    const RdpCurve* demand = task->demand.Find(block);
    PRIVPACK_CHECK(demand != nullptr);
    inst.demands.push_back(*demand);
    inst.weights.push_back(task->weight);
  }
  return SingleBlockPrivacyKnapsack(inst, 2.0 / 3.0 * eta).best_alpha_index;
}

EfficiencyScore DpkEfficiency(const Task& task,
                              std::span<const size_t> best_alpha,
                              std::span<const RdpCurve> capacities) {
  double denominator = 0;
  for (const auto& [block, demand] : task.demand.entries()) {
    const size_t a = best_alpha[block];
    denominator += NormalizedTerm(demand[a], capacities[block][a]);
  }
  return FromDenominator(task, denominator);
}

std::vector<const Task*> SortByEfficiency(
    std::span<const Task* const> tasks,
    std::span<const EfficiencyScore> scores) {
  PRIVPACK_CHECK(tasks.size() == scores.size());
  std::vector<size_t> order(tasks.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return Precedes(*tasks[a], scores[a].value, *tasks[b], scores[b].value);
  });
  std::vector<const Task*> out;
  out.reserve(order.size());
  for (size_t i : order) out.push_back(tasks[i]);
  return out;
}

std::vector<TaskId> GreedyAllocate(std::span<const Task* const> ordered,
                                   std::vector<Block>& blocks,
                                   std::span<const RdpCurve> available) {
  std::vector<TaskId> granted;
  for (const Task* task : ordered) {
    bool all_grant = true;
    for (const auto& [block, demand] : task->demand.entries()) {
      if (!FilterGrant(blocks[block], demand, available[block])) {
        all_grant = false;
        break;
      }
    }
    if (!all_grant) continue;
    for (const auto& [block, demand] : task->demand.entries()) {
      PRIVPACK_CHECK(blocks[block].Consume(demand, available[block]).ok());
    }
    granted.push_back(task->id);
  }
  return granted;
}

std::vector<TaskId> FcfsAllocate(std::span<const Task* const> tasks,
                                 std::vector<Block>& blocks,
                                 std::span<const RdpCurve> available) {
  std::vector<const Task*> ordered(tasks.begin(), tasks.end());
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const Task* a, const Task* b) {
                     if (a->arrival != b->arrival) return a->arrival < b->arrival;
                     return a->id < b->id;
                   });
  return GreedyAllocate(ordered, blocks, available);
}

std::string SchedulerName(SchedulerKind kind) {
  switch (kind) {
    case SchedulerKind::kDpk:
      return "dpk";
    case SchedulerKind::kDpf:
      return "dpf";
    case SchedulerKind::kFcfs:
      return "fcfs";
    case SchedulerKind::kOptimal:
      return "optimal";
  }
  return "unknown";
}

absl::StatusOr<SchedulerKind> ParseSchedulerKind(std::string_view name) {
  for (SchedulerKind kind : {SchedulerKind::kDpk, SchedulerKind::kDpf,
                             SchedulerKind::kFcfs, SchedulerKind::kOptimal}) {
    if (SchedulerName(kind) == name) return kind;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown scheduler '", std::string(name),
                   "'; expected one of dpk, dpf, fcfs, optimal"));
}

std::unique_ptr<Scheduler> MakeScheduler(const SchedulerSpec& spec) {
  switch (spec.kind) {
    case SchedulerKind::kDpk:
      return std::make_unique<DpkScheduler>(spec.eta);
    case SchedulerKind::kDpf:
      return std::make_unique<DpfScheduler>();
    case SchedulerKind::kFcfs:
      return std::make_unique<FcfsScheduler>();
    case SchedulerKind::kOptimal:
      return std::make_unique<OptimalScheduler>(spec.limits);
  }
  return nullptr;
}

}  // namespace privpack
