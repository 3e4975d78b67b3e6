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

#ifndef PRIVPACK_KNAPSACK_H_
#define PRIVPACK_KNAPSACK_H_

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "privpack/rdp.h"

namespace privpack {

// 0-1 knapsack with real demands and positive weights (profits).
struct ScalarKnapsackInstance {
  std::vector<double> demands;
  std::vector<double> weights;
  double capacity = 0;
};

struct ScalarKnapsackSolution {
  std::vector<size_t> selected;  // increasing item indices
  double total_weight = 0;
};

// Profit-scaling FPTAS: returns a feasible selection with weight at least
// (1 - eta) * OPT. Scaled profits are floor(w / K) with K = eta * w_max / n;
// when every weight is integral and K < 1 the profits are used unscaled,
// which makes the result exact.
ScalarKnapsackSolution ScalarKnapsackFptas(const ScalarKnapsackInstance& inst,
                                           double eta);

// Single-block privacy knapsack: one scalar knapsack per order, over the
// tasks whose demand at that order is positive.
struct SingleBlockInstance {
  std::vector<RdpCurve> demands;  // one curve per task
  std::vector<double> weights;
  RdpCurve capacity;
};

struct SingleBlockSolution {
  std::vector<ScalarKnapsackSolution> per_alpha;
  size_t best_alpha_index = 0;  // arg-max of per-alpha weight, ties to smaller
  double best_weight = 0;
};

SingleBlockSolution SingleBlockPrivacyKnapsack(const SingleBlockInstance& inst,
                                               double eta);

// Multi-block privacy knapsack: select items so that every block has one
// order under which the selected items requesting it fit.
struct KnapsackItem {
  double weight = 1;
  std::vector<std::pair<size_t, RdpCurve>> demands;  // block index -> demand
};

struct PrivacyKnapsackInstance {
  std::vector<RdpCurve> capacities;  // one curve per block; may be negative
  std::vector<KnapsackItem> items;
};

struct ExactLimits {
  size_t max_items = 20;
  uint64_t max_alpha_combinations = uint64_t{1} << 20;
  uint64_t max_nodes = 500'000'000;
};

struct PrivacyKnapsackSolution {
  std::vector<size_t> selected;  // lexicographically smallest optimal set
  double total_weight = 0;
  std::vector<size_t> alpha_choice;  // per block, smallest order that fits
  uint64_t nodes_explored = 0;
};

// True iff every block requested by a selected item has an order where the
// selected demands fit. Blocks nobody selected requests are unconstrained.
bool IsFeasibleSelection(const PrivacyKnapsackInstance& inst,
                         const std::vector<size_t>& selected);

// Exact solver: enumerates one order per block (after dropping dominated
// orders) and solves each resulting multidimensional knapsack by depth-first
// branch and bound with a fractional bound. Returns ResourceExhausted when
// the instance exceeds `limits`.
absl::StatusOr<PrivacyKnapsackSolution> ExactPrivacyKnapsack(
    const PrivacyKnapsackInstance& inst, const ExactLimits& limits = {});

}  // namespace privpack

#endif  // PRIVPACK_KNAPSACK_H_
