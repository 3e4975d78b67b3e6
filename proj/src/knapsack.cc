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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "privpack/block.h"
#include "privpack/status_macros.h"

namespace privpack {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool AllIntegral(const std::vector<double>& values) {
  return std::all_of(values.begin(), values.end(), [](double v) {
    return v == std::floor(v) && v < 1e12;
  });
}

// Fractional-relaxation value of filling `capacity` with items ordered by
// decreasing profit density.
double FractionalBound(const std::vector<double>& profits,
                       const std::vector<double>& demands, double capacity) {
  std::vector<size_t> order(profits.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    // a/da > b/db without dividing by zero.
    return profits[a] * demands[b] > profits[b] * demands[a];
  });
  double value = 0;
  double room = capacity;
  for (size_t i : order) {
    if (demands[i] <= room) {
      room -= demands[i];
      value += profits[i];
    } else {
      if (demands[i] > 0) value += profits[i] * room / demands[i];
      break;
    }
  }
  return value;
}

}  // namespace

ScalarKnapsackSolution ScalarKnapsackFptas(const ScalarKnapsackInstance& inst,
                                           double eta) {
  PRIVPACK_CHECK(eta > 0);
  PRIVPACK_CHECK(inst.demands.size() == inst.weights.size());

  std::vector<size_t> items;
  for (size_t i = 0; i < inst.demands.size(); ++i) {
    if (inst.demands[i] >= 0 && FitsWithin(inst.demands[i], inst.capacity)) {
      items.push_back(i);
    }
  }
  ScalarKnapsackSolution solution;
  if (items.empty()) return solution;

  const size_t n = items.size();
  std::vector<double> weights(n), demands(n);
  for (size_t k = 0; k < n; ++k) {
    weights[k] = inst.weights[items[k]];
    demands[k] = inst.demands[items[k]];
  }
  const double w_max = *std::max_element(weights.begin(), weights.end());
  double scale = eta * w_max / n;
  if (scale < 1.0 && AllIntegral(weights)) scale = 1.0;

  std::vector<double> profits(n);
  std::vector<size_t> int_profits(n);
  for (size_t k = 0; k < n; ++k) {
    int_profits[k] = static_cast<size_t>(std::floor(weights[k] / scale));
    profits[k] = static_cast<double>(int_profits[k]);
  }
  // No feasible set can exceed the fractional bound, so the profit table
  // stops there.
  const double slack_capacity =
      inst.capacity + kFeasibilityTolerance * std::abs(inst.capacity);
  const size_t total_profit =
      std::accumulate(int_profits.begin(), int_profits.end(), size_t{0});
  const size_t profit_cap = std::min(
      total_profit,
      static_cast<size_t>(FractionalBound(profits, demands, slack_capacity) +
                          1e-9));

  // min_demand[p]: least demand reaching scaled profit exactly p.
  std::vector<double> min_demand(profit_cap + 1, kInf);
  min_demand[0] = 0;
  std::vector<std::vector<bool>> took(n, std::vector<bool>(profit_cap + 1));
  for (size_t k = 0; k < n; ++k) {
    const size_t p_k = int_profits[k];
    if (p_k == 0 || p_k > profit_cap) continue;
    for (size_t p = profit_cap; p >= p_k; --p) {
      const double candidate = min_demand[p - p_k] + demands[k];
      if (candidate < min_demand[p]) {
        min_demand[p] = candidate;
        took[k][p] = true;
      }
      if (p == p_k) break;
    }
  }
  size_t best = 0;
  for (size_t p = profit_cap; p > 0; --p) {
    if (min_demand[p] < kInf && FitsWithin(min_demand[p], inst.capacity)) {
      best = p;
      break;
    }
  }
  std::vector<bool> chosen(n, false);
  for (size_t k = n; k-- > 0 && best > 0;) {
    if (took[k][best]) {
      chosen[k] = true;
      best -= int_profits[k];
    }
  }
  // Items whose scaled profit rounded to zero (or that simply still fit) are
  // added afterwards; this only increases the weight.
  double used = 0;
  for (size_t k = 0; k < n; ++k) {
    if (chosen[k]) used += demands[k];
  }
  for (size_t k = 0; k < n; ++k) {
    if (!chosen[k] && FitsWithin(used + demands[k], inst.capacity)) {
      chosen[k] = true;
      used += demands[k];
    }
  }
  for (size_t k = 0; k < n; ++k) {
    if (chosen[k]) {
      solution.selected.push_back(items[k]);
      solution.total_weight += weights[k];
    }
  }
  return solution;
}

SingleBlockSolution SingleBlockPrivacyKnapsack(const SingleBlockInstance& inst,
                                               double eta) {
  PRIVPACK_CHECK(inst.demands.size() == inst.weights.size());
  SingleBlockSolution out;
  const size_t num_orders = inst.capacity.size();
  out.per_alpha.reserve(num_orders);
  for (size_t a = 0; a < num_orders; ++a) {
    ScalarKnapsackInstance scalar;
    scalar.capacity = inst.capacity[a];
    std::vector<size_t> original;
    for (size_t i = 0; i < inst.demands.size(); ++i) {
      if (!(inst.demands[i][a] > 0)) continue;
      original.push_back(i);
      scalar.demands.push_back(inst.demands[i][a]);
      scalar.weights.push_back(inst.weights[i]);
    }
    ScalarKnapsackSolution solved = ScalarKnapsackFptas(scalar, eta);
    for (size_t& k : solved.selected) k = original[k];
    out.per_alpha.push_back(std::move(solved));
    if (out.per_alpha.back().total_weight > out.best_weight || a == 0) {
      out.best_weight = out.per_alpha.back().total_weight;
      out.best_alpha_index = a;
    }
  }
  return out;
}

bool IsFeasibleSelection(const PrivacyKnapsackInstance& inst,
                         const std::vector<size_t>& selected) {
  const size_t num_blocks = inst.capacities.size();
  for (size_t j = 0; j < num_blocks; ++j) {
    const RdpCurve& cap = inst.capacities[j];
    std::vector<double> used(cap.size(), 0.0);
    bool requested = false;
    for (size_t i : selected) {
      for (const auto& [block, demand] : inst.items[i].demands) {
        if (block != j) continue;
        requested = true;
        for (size_t a = 0; a < cap.size(); ++a) used[a] += demand[a];
      }
    }
    if (!requested) continue;
    bool fits = false;
    for (size_t a = 0; a < cap.size() && !fits; ++a) {
      fits = FitsWithin(used[a], cap[a]);
    }
    if (!fits) return false;
  }
  return true;
}

namespace {

// One multidimensional knapsack per choice of order, searched depth-first in
// item-index order with include-first branching. Because the incumbent is
// shared across orders and replaced on ties only by lexicographically greater
// inclusion vectors, the final set is the lexicographically smallest optimal
// index set.
class ExactSearch {
 public:
  ExactSearch(const PrivacyKnapsackInstance& inst, const ExactLimits& limits)
      : inst_(inst),
        limits_(limits),
        n_(inst.items.size()),
        num_blocks_(inst.capacities.size()),
        integral_(true) {
    std::vector<double> weights;
    for (const KnapsackItem& item : inst.items) weights.push_back(item.weight);
    integral_ = AllIntegral(weights);
    requesters_.resize(num_blocks_);
    for (size_t i = 0; i < n_; ++i) {
      for (const auto& [block, demand] : inst.items[i].demands) {
        requesters_[block].push_back({i, &demand});
      }
    }
  }

  absl::StatusOr<PrivacyKnapsackSolution> Run() {
    if (n_ > limits_.max_items) {
      return absl::ResourceExhaustedError(absl::StrFormat(
          "exact solver limited to %d items, instance has %d",
          limits_.max_items, n_));
    }
    RETURN_IF_ERROR(BuildOptions());
    incumbent_.assign(n_, 0);
    incumbent_weight_ = 0;

    std::vector<size_t> odometer(active_blocks_.size(), 0);
    while (true) {
      RETURN_IF_ERROR(SearchCombination(odometer));
      size_t pos = 0;
      while (pos < odometer.size()) {
        if (++odometer[pos] < options_[active_blocks_[pos]].size()) break;
        odometer[pos] = 0;
        ++pos;
      }
      if (pos == odometer.size()) break;
    }

    PrivacyKnapsackSolution out;
    out.nodes_explored = nodes_;
    for (size_t i = 0; i < n_; ++i) {
      if (incumbent_[i]) {
        out.selected.push_back(i);
        out.total_weight += inst_.items[i].weight;
      }
    }
    out.alpha_choice = ChooseOrders(out.selected);
    return out;
  }

 private:
  struct Requester {
    size_t item;
    const RdpCurve* demand;
  };

  // Drops orders that are dominated (no more capacity, no less demand from
  // every requester) by another order of the same block.
  absl::Status BuildOptions() {
    options_.assign(num_blocks_, {});
    uint64_t combinations = 1;
    for (size_t j = 0; j < num_blocks_; ++j) {
      if (requesters_[j].empty()) continue;
      const RdpCurve& cap = inst_.capacities[j];
      for (size_t a = 0; a < cap.size(); ++a) {
        bool dominated = false;
        for (size_t b = 0; b < cap.size() && !dominated; ++b) {
          if (b == a || cap[b] < cap[a]) continue;
          bool all_le = true;
          bool identical = cap[b] == cap[a];
          for (const Requester& r : requesters_[j]) {
            const double db = (*r.demand)[b];
            const double da = (*r.demand)[a];
            if (db > da) {
              all_le = false;
              break;
            }
            if (db != da) identical = false;
          }
          dominated = all_le && (!identical || b < a);
        }
        if (!dominated) options_[j].push_back(a);
      }
      active_blocks_.push_back(j);
      combinations *= options_[j].size();
      if (combinations > limits_.max_alpha_combinations) {
        return absl::ResourceExhaustedError(absl::StrFormat(
            "more than %d order combinations", limits_.max_alpha_combinations));
      }
    }
    return absl::OkStatus();
  }

  absl::Status SearchCombination(const std::vector<size_t>& odometer) {
    capacity_.assign(num_blocks_, 0.0);
    demand_.assign(n_, {});
    forced_out_.assign(n_, false);
    chosen_alpha_.assign(num_blocks_, 0);
    for (size_t k = 0; k < active_blocks_.size(); ++k) {
      const size_t j = active_blocks_[k];
      chosen_alpha_[j] = options_[j][odometer[k]];
      capacity_[j] = inst_.capacities[j][chosen_alpha_[j]];
    }
    for (size_t i = 0; i < n_; ++i) {
      for (const auto& [block, curve] : inst_.items[i].demands) {
        const size_t a = chosen_alpha_[block];
        demand_[i].push_back({block, curve[a]});
        if (!FitsWithin(curve[a], capacity_[block])) forced_out_[i] = true;
      }
    }
    // Requesters per block by decreasing weight density, for the bound.
    density_order_.assign(num_blocks_, {});
    for (size_t j : active_blocks_) {
      for (const Requester& r : requesters_[j]) {
        if (!forced_out_[r.item]) density_order_[j].push_back(r.item);
      }
      std::stable_sort(density_order_[j].begin(), density_order_[j].end(),
                       [&](size_t x, size_t y) {
                         return inst_.items[x].weight * DemandOn(y, j) >
                                inst_.items[y].weight * DemandOn(x, j);
                       });
    }
    suffix_weight_.assign(n_ + 1, 0.0);
    for (size_t i = n_; i-- > 0;) {
      suffix_weight_[i] =
          suffix_weight_[i + 1] + (forced_out_[i] ? 0.0 : inst_.items[i].weight);
    }
    used_.assign(num_blocks_, 0.0);
    current_.assign(n_, 0);
    return Dfs(0, 0.0);
  }

  double DemandOn(size_t item, size_t block) const {
    for (const auto& [j, d] : demand_[item]) {
      if (j == block) return d;
    }
    return 0.0;
  }

  double Bound(size_t depth, double weight) const {
    double best = weight + suffix_weight_[depth];
    for (size_t j : active_blocks_) {
      double requested_weight = 0;
      double frac = 0;
      double room = capacity_[j] - used_[j];
      bool filling = true;
      for (size_t i : density_order_[j]) {
        if (i < depth) continue;
        requested_weight += inst_.items[i].weight;
        if (!filling) continue;
        const double d = DemandOn(i, j);
        if (FitsWithin(d, room)) {
          room -= d;
          frac += inst_.items[i].weight;
        } else {
          if (d > 0 && room > 0) frac += inst_.items[i].weight * room / d;
          filling = false;
        }
      }
      const double free_weight = suffix_weight_[depth] - requested_weight;
      best = std::min(best, weight + free_weight + frac);
    }
    if (integral_) best = std::floor(best + 1e-6);
    return best;
  }

  // -1, 0, +1 comparing current_[0, depth) with incumbent_[0, depth), where a
  // 1 (included) ranks above a 0.
  int ComparePrefix(size_t depth) const {
    for (size_t i = 0; i < depth; ++i) {
      if (current_[i] != incumbent_[i]) return current_[i] > incumbent_[i] ? 1 : -1;
    }
    return 0;
  }

  double Tolerance() const {
    return 1e-9 * std::max(1.0, std::abs(incumbent_weight_));
  }

  absl::Status Dfs(size_t depth, double weight) {
    if (++nodes_ > limits_.max_nodes) {
      return absl::ResourceExhaustedError(absl::StrFormat(
          "exact solver exceeded %d search nodes", limits_.max_nodes));
    }
    if (depth == n_) {
      const double tol = Tolerance();
      if (weight > incumbent_weight_ + tol ||
          (weight >= incumbent_weight_ - tol && ComparePrefix(n_) > 0)) {
        incumbent_ = current_;
        incumbent_weight_ = weight;
      }
      return absl::OkStatus();
    }
    const double bound = Bound(depth, weight);
    const double tol = Tolerance();
    if (bound < incumbent_weight_ - tol) return absl::OkStatus();
    if (bound <= incumbent_weight_ + tol && ComparePrefix(depth) < 0) {
      return absl::OkStatus();
    }

    if (!forced_out_[depth] && CanInclude(depth)) {
      for (const auto& [j, d] : demand_[depth]) used_[j] += d;
      current_[depth] = 1;
      const absl::Status status =
          Dfs(depth + 1, weight + inst_.items[depth].weight);
      current_[depth] = 0;
      for (const auto& [j, d] : demand_[depth]) used_[j] -= d;
      RETURN_IF_ERROR(status);
    }
    return Dfs(depth + 1, weight);
  }

  bool CanInclude(size_t item) const {
    for (const auto& [j, d] : demand_[item]) {
      if (!FitsWithin(used_[j] + d, capacity_[j])) return false;
    }
    return true;
  }

  std::vector<size_t> ChooseOrders(const std::vector<size_t>& selected) const {
    std::vector<size_t> choice(num_blocks_, 0);
    for (size_t j = 0; j < num_blocks_; ++j) {
      const RdpCurve& cap = inst_.capacities[j];
      std::vector<double> used(cap.size(), 0.0);
      for (size_t i : selected) {
        for (const auto& [block, demand] : inst_.items[i].demands) {
          if (block != j) continue;
          for (size_t a = 0; a < cap.size(); ++a) used[a] += demand[a];
        }
      }
      for (size_t a = 0; a < cap.size(); ++a) {
        if (FitsWithin(used[a], cap[a])) {
          choice[j] = a;
          break;
        }
      }
    }
    return choice;
  }

  const PrivacyKnapsackInstance& inst_;
  const ExactLimits& limits_;
  const size_t n_;
  const size_t num_blocks_;
  bool integral_;
  std::vector<std::vector<Requester>> requesters_;
  std::vector<std::vector<size_t>> options_;
  std::vector<size_t> active_blocks_;

  // Per-combination state.
  std::vector<size_t> chosen_alpha_;
  std::vector<double> capacity_;
  std::vector<std::vector<std::pair<size_t, double>>> demand_;
  std::vector<bool> forced_out_;
  std::vector<std::vector<size_t>> density_order_;
  std::vector<double> suffix_weight_;
  std::vector<double> used_;
  std::vector<char> current_;

  std::vector<char> incumbent_;
  double incumbent_weight_ = 0;
  uint64_t nodes_ = 0;
};

}  // namespace

absl::StatusOr<PrivacyKnapsackSolution> ExactPrivacyKnapsack(
    const PrivacyKnapsackInstance& inst, const ExactLimits& limits) {
  for (const KnapsackItem& item : inst.items) {
    if (!(item.weight > 0)) {
      return absl::InvalidArgumentError("item weights must be positive");
    }
    for (const auto& [block, demand] : item.demands) {
      if (block >= inst.capacities.size()) {
        return absl::InvalidArgumentError("item demands an unknown block");
      }
      if (!SameGrid(demand.grid(), inst.capacities[block].grid())) {
        return absl::InvalidArgumentError("grid mismatch in knapsack item");
      }
    }
  }
  ExactSearch search(inst, limits);
  return search.Run();
}

}  // namespace privpack
