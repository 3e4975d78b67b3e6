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

#ifndef PRIVPACK_BLOCK_H_
#define PRIVPACK_BLOCK_H_

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "privpack/rdp.h"

namespace privpack {

using Tick = int64_t;
using BlockId = int64_t;

// Batch period meaning "never reschedule": the whole run is one batch.
inline constexpr Tick kUnboundedPeriod = std::numeric_limits<Tick>::max();

// Relative slack used by every feasibility comparison, so demands built to
// exactly exhaust a budget are not rejected by rounding.
inline constexpr double kFeasibilityTolerance = 1e-9;

// lhs <= rhs up to kFeasibilityTolerance.
bool FitsWithin(double lhs, double rhs);

// A disjoint data partition with its own privacy filter. The filter holds a
// per-order capacity eps_j(alpha) and the running sum of granted demands.
class Block {
 public:
  Block(BlockId id, Tick arrival, RdpCurve capacity, int unlock_steps);

  BlockId id() const { return id_; }
  Tick arrival() const { return arrival_; }
  const RdpCurve& capacity() const { return capacity_; }
  const RdpCurve& consumed() const { return consumed_; }
  int unlock_steps() const { return unlock_steps_; }

  // True while some order with positive capacity still has
  // consumed(alpha) <= capacity(alpha), or nothing was consumed.
  bool HasSurvivingOrder() const;

  // Adds `demand` to the consumption at every order. Fails without touching
  // the block unless FilterGrant(*this, demand, available) holds.
  absl::Status Consume(const RdpCurve& demand, const RdpCurve& available);

 private:
  BlockId id_;
  Tick arrival_;
  RdpCurve capacity_;
  RdpCurve consumed_;
  int unlock_steps_;
};

// Number of scheduling steps a block has witnessed at `now`, counting the
// current one, clamped to [1, unlock_steps].
absl::StatusOr<int> UnlockedSteps(const Block& block, Tick now, Tick period);

// Gross unlocked budget (steps / N) * eps_j(alpha), before subtracting
// consumption. This is the bound the filter checks grants against.
absl::StatusOr<RdpCurve> UnlockedBudget(const Block& block, Tick now,
                                        Tick period);

// Net capacity c_j(alpha) at `now`: unlocked budget minus everything already
// granted on the block, floored at zero per order.
absl::StatusOr<RdpCurve> UnlockedCapacity(const Block& block, Tick now,
                                          Tick period);

// True iff the demand is zero or some order with positive block capacity has
// consumed(alpha) + demand(alpha) <= available(alpha).
bool FilterGrant(const Block& block, const RdpCurve& demand,
                 const RdpCurve& available);

// True iff translating the block's capacity curve back to (epsilon, delta)
// with `global.delta` gives exactly `global.epsilon` at every order with
// non-zero capacity (up to `tolerance`).
bool CapacityCertifies(const Block& block, const DpGuarantee& global,
                       double tolerance = 1e-9);

// Per-block demand d_j(alpha) of one task, sorted by block id.
class DemandVector {
 public:
  DemandVector() = default;

  // Fails on duplicate blocks, negative values or mixed grids.
  static absl::StatusOr<DemandVector> Create(
      std::vector<std::pair<BlockId, RdpCurve>> entries);

  const std::vector<std::pair<BlockId, RdpCurve>>& entries() const {
    return entries_;
  }
  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // nullptr when the block is not requested.
  const RdpCurve* Find(BlockId block) const;

 private:
  std::vector<std::pair<BlockId, RdpCurve>> entries_;
};

}  // namespace privpack

#endif  // PRIVPACK_BLOCK_H_
