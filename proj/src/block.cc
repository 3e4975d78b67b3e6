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

#include "privpack/block.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_format.h"
#include "privpack/status_macros.h"

namespace privpack {

bool FitsWithin(double lhs, double rhs) {
  return lhs <= rhs + kFeasibilityTolerance *
                          std::max(std::abs(lhs), std::abs(rhs));
}

Block::Block(BlockId id, Tick arrival, RdpCurve capacity, int unlock_steps)
    : id_(id),
      arrival_(arrival),
      capacity_(std::move(capacity)),
      consumed_(RdpCurve::Zero(capacity_.grid())),
      unlock_steps_(unlock_steps) {
  PRIVPACK_CHECK(unlock_steps_ >= 1);
}

bool Block::HasSurvivingOrder() const {
  if (consumed_.IsZero()) return true;
  for (size_t i = 0; i < capacity_.size(); ++i) {
    if (capacity_[i] > 0.0 && FitsWithin(consumed_[i], capacity_[i])) {
      return true;
    }
  }
  return false;
}

absl::Status Block::Consume(const RdpCurve& demand,
                            const RdpCurve& available) {
  if (!SameGrid(demand.grid(), capacity_.grid())) {
    return absl::InvalidArgumentError("demand grid differs from block grid");
  }
  if (!FilterGrant(*this, demand, available)) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "block %d: consume without a successful filter grant", id_));
  }
  consumed_ += demand;
  return absl::OkStatus();
}

absl::StatusOr<int> UnlockedSteps(const Block& block, Tick now, Tick period) {
  if (now < block.arrival()) {
    return absl::FailedPreconditionError(
        absl::StrFormat("block %d arrives at %d, not yet arrived at %d",
                        block.id(), block.arrival(), now));
  }
  if (period <= 0) {
    return absl::InvalidArgumentError("batch period must be positive");
  }
  const Tick elapsed = now - block.arrival();
  Tick steps = period == kUnboundedPeriod ? 0 : (elapsed + period - 1) / period;
  steps = std::clamp<Tick>(steps, 1, block.unlock_steps());
  return static_cast<int>(steps);
}

absl::StatusOr<RdpCurve> UnlockedBudget(const Block& block, Tick now,
                                        Tick period) {
  ASSIGN_OR_RETURN(int steps, UnlockedSteps(block, now, period));
  if (steps == block.unlock_steps()) return block.capacity();
  return block.capacity().Scaled(static_cast<double>(steps) /
                                 block.unlock_steps());
}

absl::StatusOr<RdpCurve> UnlockedCapacity(const Block& block, Tick now,
                                          Tick period) {
  ASSIGN_OR_RETURN(RdpCurve net, UnlockedBudget(block, now, period));
  net -= block.consumed();
  for (size_t i = 0; i < net.size(); ++i) net[i] = std::max(0.0, net[i]);
  return net;
}

bool FilterGrant(const Block& block, const RdpCurve& demand,
                 const RdpCurve& available) {
  if (demand.IsZero()) return true;
  const RdpCurve& consumed = block.consumed();
  const RdpCurve& capacity = block.capacity();
  for (size_t i = 0; i < demand.size(); ++i) {
    // A clamped order certifies nothing, even for a zero demand there.
    if (!(capacity[i] > 0.0)) continue;
    if (FitsWithin(consumed[i] + demand[i], available[i])) return true;
  }
  return false;
}

bool CapacityCertifies(const Block& block, const DpGuarantee& global,
                       double tolerance) {
  const RdpCurve& capacity = block.capacity();
  const AlphaGrid& grid = *capacity.grid();
  const double log_inv_delta = std::log(1.0 / global.delta);
  bool any_usable = false;
  for (size_t i = 0; i < grid.size(); ++i) {
    if (capacity[i] <= 0.0) continue;
    any_usable = true;
    const double translated = capacity[i] + log_inv_delta / (grid[i] - 1.0);
    if (std::abs(translated - global.epsilon) > tolerance) return false;
  }
  return any_usable;
}

absl::StatusOr<DemandVector> DemandVector::Create(
    std::vector<std::pair<BlockId, RdpCurve>> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (size_t i = 0; i < entries.size(); ++i) {
    if (i > 0 && entries[i].first == entries[i - 1].first) {
      return absl::InvalidArgumentError(
          absl::StrFormat("block %d requested twice", entries[i].first));
    }
    if (!SameGrid(entries[i].second.grid(), entries.front().second.grid())) {
      return absl::InvalidArgumentError("demand curves use different grids");
    }
    for (double v : entries[i].second.values()) {
      if (!(v >= 0.0)) {
        return absl::InvalidArgumentError("demands must be non-negative");
      }
    }
  }
  DemandVector out;
  out.entries_ = std::move(entries);
  return out;
}

const RdpCurve* DemandVector::Find(BlockId block) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), block,
      [](const auto& entry, BlockId id) { return entry.first < id; });
  if (it == entries_.end() || it->first != block) return nullptr;
  return &it->second;
}

}  // namespace privpack
