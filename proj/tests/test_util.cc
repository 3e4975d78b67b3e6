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

#include "test_util.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <unordered_map>

#include "privpack/status_macros.h"

namespace privpack_test {

using privpack::AlphaGrid;
using privpack::DemandVector;
using privpack::FitsWithin;
using privpack::KnapsackItem;
using privpack::PrivacyKnapsackInstance;

GridPtr MakeGrid(std::vector<double> orders) {
  auto grid = AlphaGrid::Create(std::move(orders));
  PRIVPACK_CHECK(grid.ok());
  return *grid;
}

RdpCurve Curve(const GridPtr& grid, std::vector<double> values) {
  auto curve = RdpCurve::FromValues(grid, std::move(values));
  PRIVPACK_CHECK(curve.ok());
  return *curve;
}

Task MakeTask(TaskId id, double weight,
              std::vector<std::pair<BlockId, RdpCurve>> demand,
              privpack::Tick arrival) {
  auto d = DemandVector::Create(std::move(demand));
  PRIVPACK_CHECK(d.ok());
  Task t;
  t.id = id;
  t.weight = weight;
  t.arrival = arrival;
  t.demand = *std::move(d);
  return t;
}

std::vector<const Task*> Pointers(const std::vector<Task>& tasks) {
  std::vector<const Task*> out;
  for (const Task& t : tasks) out.push_back(&t);
  return out;
}

StaticInstance WideNarrowInstance() {
  StaticInstance inst;
  inst.grid = MakeGrid({2.0});
  inst.capacity.assign(3, Curve(inst.grid, {1.0}));
  const RdpCurve big = Curve(inst.grid, {0.6});
  const RdpCurve small = Curve(inst.grid, {0.7});
  inst.tasks.push_back(MakeTask(1, 1, {{0, big}, {1, big}, {2, big}}));
  for (BlockId b = 0; b < 3; ++b) {
    inst.tasks.push_back(MakeTask(2 + b, 1, {{b, small}}));
  }
  return inst;
}

StaticInstance TwoOrderInstance() {
  StaticInstance inst;
  inst.grid = MakeGrid({2.0, 4.0});
  inst.capacity.assign(2, Curve(inst.grid, {1.0, 1.0}));
  const RdpCurve flat = Curve(inst.grid, {0.6, 0.6});
  const RdpCurve good_first = Curve(inst.grid, {0.5, 1.5});
  const RdpCurve good_second = Curve(inst.grid, {1.5, 0.5});
  inst.tasks.push_back(MakeTask(1, 1, {{0, flat}}));
  inst.tasks.push_back(MakeTask(2, 1, {{1, flat}}));
  inst.tasks.push_back(MakeTask(3, 1, {{0, good_first}}));
  inst.tasks.push_back(MakeTask(4, 1, {{1, good_second}}));
  inst.tasks.push_back(MakeTask(5, 1, {{0, good_first}}));
  inst.tasks.push_back(MakeTask(6, 1, {{1, good_second}}));
  return inst;
}

std::vector<TaskId> RunBatch(const StaticInstance& inst,
                             const privpack::SchedulerSpec& spec) {
  std::vector<Block> blocks;
  for (size_t j = 0; j < inst.capacity.size(); ++j) {
    blocks.emplace_back(static_cast<BlockId>(j), 0, inst.capacity[j], 1);
  }
  std::vector<const Task*> pending = Pointers(inst.tasks);
  privpack::Batch batch;
  batch.pending = pending;
  batch.blocks = &blocks;
  batch.available = inst.capacity;
  batch.remaining = inst.capacity;
  auto scheduler = privpack::MakeScheduler(spec);
  auto granted = scheduler->Schedule(batch);
  PRIVPACK_CHECK(granted.ok());
  return *granted;
}

double WeightOf(const StaticInstance& inst, const std::vector<TaskId>& ids) {
  double w = 0;
  for (TaskId id : ids) {
    for (const Task& t : inst.tasks) {
      if (t.id == id) w += t.weight;
    }
  }
  return w;
}

PrivacyKnapsackInstance ToKnapsack(const StaticInstance& inst) {
  PrivacyKnapsackInstance out;
  out.capacities = inst.capacity;
  for (const Task& t : inst.tasks) {
    KnapsackItem item;
    item.weight = t.weight;
    for (const auto& [block, demand] : t.demand.entries()) {
      item.demands.push_back({static_cast<size_t>(block), demand});
    }
    out.items.push_back(std::move(item));
  }
  return out;
}

double BruteForceScalar(const std::vector<double>& demands,
                        const std::vector<double>& weights, double capacity) {
  const size_t n = demands.size();
  PRIVPACK_CHECK(n < 31);
  double best = 0;
  for (uint32_t mask = 0; mask < (1u << n); ++mask) {
    double d = 0;
    double w = 0;
    for (size_t i = 0; i < n; ++i) {
      if (mask >> i & 1) {
        d += demands[i];
        w += weights[i];
      }
    }
    if (FitsWithin(d, capacity)) best = std::max(best, w);
  }
  return best;
}

double BruteForcePrivacy(const PrivacyKnapsackInstance& inst) {
  const size_t n = inst.items.size();
  const size_t m = inst.capacities.size();
  PRIVPACK_CHECK(n < 25);
  const size_t orders = m > 0 ? inst.capacities[0].size() : 1;
  size_t combos = 1;
  for (size_t j = 0; j < m; ++j) combos *= orders;
  double best = 0;
  std::vector<size_t> alpha(m);
  for (size_t c = 0; c < combos; ++c) {
    size_t rest = c;
    for (size_t j = 0; j < m; ++j) {
      alpha[j] = rest % orders;
      rest /= orders;
    }
    for (uint32_t mask = 0; mask < (1u << n); ++mask) {
      std::vector<double> used(m, 0.0);
      std::vector<bool> touched(m, false);
      double w = 0;
      for (size_t i = 0; i < n; ++i) {
        if (!(mask >> i & 1)) continue;
        w += inst.items[i].weight;
        for (const auto& [j, d] : inst.items[i].demands) {
          used[j] += d[alpha[j]];
          touched[j] = true;
        }
      }
      bool ok = true;
      for (size_t j = 0; j < m && ok; ++j) {
        ok = !touched[j] || FitsWithin(used[j], inst.capacities[j][alpha[j]]);
      }
      if (ok) best = std::max(best, w);
    }
  }
  return best;
}

long double SubsampledGaussianQuadrature(long double sigma, long double q,
                                         int alpha) {
  // E_{x ~ N(0, s^2)} [((1 - q) + q exp((2x - 1) / (2 s^2)))^alpha]
  const long double s2 = sigma * sigma;
  const long double lo = -30 * sigma;
  const long double hi = alpha * 1.0L + 30 * sigma + 1;
  const int steps = 400000;  // even, for Simpson
  const long double h = (hi - lo) / steps;
  const long double pi = std::acos(-1.0L);
  auto log_f = [&](long double x) {
    const long double log_density =
        -x * x / (2 * s2) - std::log(sigma * std::sqrt(2 * pi));
    const long double ratio = (1 - q) + q * std::exp((2 * x - 1) / (2 * s2));
    return log_density + alpha * std::log(ratio);
  };
  // Integrate exp(log_f - shift) to keep the sum in range.
  long double shift = -1e300L;
  for (int i = 0; i <= steps; i += 100) shift = std::max(shift, log_f(lo + i * h));
  long double sum = 0;
  for (int i = 0; i <= steps; ++i) {
    const long double coef = (i == 0 || i == steps) ? 1 : (i % 2 ? 4 : 2);
    sum += coef * std::exp(log_f(lo + i * h) - shift);
  }
  const long double log_moment = std::log(sum * h / 3) + shift;
  return log_moment / (alpha - 1);
}

long double LaplaceClosedForm(long double b, long double a) {
  const long double v = a / (2 * a - 1) * std::exp((a - 1) / b) +
                        (a - 1) / (2 * a - 1) * std::exp(-a / b);
  return std::log(v) / (a - 1);
}

namespace {

GridPtr RandomGrid(std::mt19937_64& rng, int max_orders) {
  static const double kPool[] = {2, 3, 4, 5, 8, 16, 32, 64};
  std::uniform_int_distribution<int> count(1, max_orders);
  const int k = count(rng);
  std::vector<double> pool(std::begin(kPool), std::end(kPool));
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return MakeGrid(pool);
}

RdpCurve RandomDemand(std::mt19937_64& rng, const GridPtr& grid,
                      double zero_prob) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(grid->size());
  for (double& x : v) x = u(rng) < zero_prob ? 0.0 : 0.05 + 0.45 * u(rng);
  return Curve(grid, v);
}

}  // namespace

StaticInstance RandomSingleBlock(std::mt19937_64& rng, int max_tasks,
                                 int max_orders) {
  StaticInstance inst;
  inst.grid = RandomGrid(rng, max_orders);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> cap(inst.grid->size());
  for (double& c : cap) c = 0.5 + 1.5 * u(rng);
  inst.capacity.push_back(Curve(inst.grid, cap));
  std::uniform_int_distribution<int> count(1, max_tasks);
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    const double w = 1 + std::floor(10 * u(rng));
    inst.tasks.push_back(MakeTask(i, w, {{0, RandomDemand(rng, inst.grid, 0.1)}}));
  }
  return inst;
}

StaticInstance RandomMultiBlock(std::mt19937_64& rng, int max_tasks,
                                int max_blocks, int max_orders) {
  StaticInstance inst;
  inst.grid = RandomGrid(rng, max_orders);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> block_count(1, max_blocks);
  const int m = block_count(rng);
  for (int j = 0; j < m; ++j) {
    std::vector<double> cap(inst.grid->size());
    for (double& c : cap) c = 0.5 + 1.5 * u(rng);
    inst.capacity.push_back(Curve(inst.grid, cap));
  }
  std::uniform_int_distribution<int> count(1, max_tasks);
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    std::vector<std::pair<BlockId, RdpCurve>> demand;
    for (int j = 0; j < m; ++j) {
      if (u(rng) < 0.5 || (j == m - 1 && demand.empty())) {
        demand.push_back({j, RandomDemand(rng, inst.grid, 0.1)});
      }
    }
    const double w = 1 + std::floor(10 * u(rng));
    inst.tasks.push_back(MakeTask(i, w, std::move(demand)));
  }
  return inst;
}

}  // namespace privpack_test
