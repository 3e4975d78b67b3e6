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

#include "privpack/rdp.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "privpack/status_macros.h"

namespace privpack {
namespace {

double LogAddExp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double LogBinomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
         std::lgamma(n - k + 1.0);
}

// Cumulant log E[(p/p')^alpha] of the Poisson-subsampled mechanism at an
// integer order, divided by (alpha - 1). `base_cumulant(k)` must return
// (k - 1) * eps_base(k) for k >= 2.
template <typename BaseCumulant>
double SubsampledIntegerOrder(double q, int alpha,
                              const BaseCumulant& base_cumulant) {
  const double log_q = std::log(q);
  const double log_1mq = std::log1p(-q);
  double log_sum = -std::numeric_limits<double>::infinity();
  for (int k = 0; k <= alpha; ++k) {
    double term = LogBinomial(alpha, k);
    if (alpha - k > 0) term += (alpha - k) * log_1mq;
    if (k > 0) term += k * log_q;
    if (k >= 2) term += base_cumulant(k);
    log_sum = LogAddExp(log_sum, term);
  }
  return std::max(0.0, log_sum / (alpha - 1));
}

// Evaluates an integer-order bound on every grid order. Fractional orders are
// linearly interpolated between their integer neighbours; orders below 2 take
// the order-2 value, which upper-bounds them because the cumulant
// (alpha - 1) eps(alpha) is convex and vanishes at alpha = 1.
template <typename IntegerOrderFn>
RdpCurve TabulateFromIntegerOrders(const GridPtr& grid,
                                   const IntegerOrderFn& at_integer) {
  RdpCurve curve = RdpCurve::Zero(grid);
  for (size_t i = 0; i < grid->size(); ++i) {
    const double alpha = (*grid)[i];
    if (alpha <= 2.0) {
      curve[i] = at_integer(2);
      continue;
    }
    const double lo = std::floor(alpha);
    const double hi = std::ceil(alpha);
    if (lo == hi) {
      curve[i] = at_integer(static_cast<int>(lo));
    } else {
      const double lo_value = at_integer(static_cast<int>(lo));
      const double hi_value = at_integer(static_cast<int>(hi));
      curve[i] = lo_value + (alpha - lo) * (hi_value - lo_value);
    }
  }
  return curve;
}

absl::Status ValidateSubsampling(double q, int steps) {
  if (!(q > 0.0 && q <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("sampling rate must be in (0, 1], got %g", q));
  }
  if (steps <= 0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("steps must be positive, got %d", steps));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<GridPtr> AlphaGrid::Create(std::vector<double> orders) {
  if (orders.empty()) {
    return absl::InvalidArgumentError("alpha grid must not be empty");
  }
  for (size_t i = 0; i < orders.size(); ++i) {
    if (!std::isfinite(orders[i]) || orders[i] <= 1.0) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "alpha grid orders must be finite and > 1, got %g", orders[i]));
    }
    if (i > 0 && orders[i] <= orders[i - 1]) {
      return absl::InvalidArgumentError(
          "alpha grid orders must be strictly increasing");
    }
  }
  return GridPtr(new AlphaGrid(std::move(orders)));
}

GridPtr AlphaGrid::Default() {
  static const GridPtr* const kDefault = new GridPtr(new AlphaGrid(
      {1.5, 1.75, 2, 2.5, 3, 4, 5, 6, 8, 16, 32, 64}));
  return *kDefault;
}

bool SameGrid(const GridPtr& a, const GridPtr& b) {
  if (a == b) return true;
  if (a == nullptr || b == nullptr) return false;
  return *a == *b;
}

RdpCurve RdpCurve::Zero(GridPtr grid) {
  const size_t n = grid->size();
  return RdpCurve(std::move(grid), std::vector<double>(n, 0.0));
}

RdpCurve RdpCurve::Constant(GridPtr grid, double value) {
  const size_t n = grid->size();
  return RdpCurve(std::move(grid), std::vector<double>(n, value));
}

absl::StatusOr<RdpCurve> RdpCurve::FromValues(GridPtr grid,
                                              std::vector<double> values) {
  if (grid == nullptr) return absl::InvalidArgumentError("null alpha grid");
  if (values.size() != grid->size()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("curve has %d values but the grid has %d orders",
                        values.size(), grid->size()));
  }
  for (double v : values) {
    if (!std::isfinite(v)) {
      return absl::InvalidArgumentError("curve values must be finite");
    }
  }
  return RdpCurve(std::move(grid), std::move(values));
}

RdpCurve& RdpCurve::operator+=(const RdpCurve& other) {
  PRIVPACK_CHECK(SameGrid(grid_, other.grid_));
  for (size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

RdpCurve& RdpCurve::operator-=(const RdpCurve& other) {
  PRIVPACK_CHECK(SameGrid(grid_, other.grid_));
  for (size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

RdpCurve RdpCurve::Scaled(double factor) const {
  RdpCurve out = *this;
  for (double& v : out.values_) v *= factor;
  return out;
}

bool RdpCurve::IsZero() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return v == 0.0; });
}

bool RdpCurve::operator==(const RdpCurve& other) const {
  return SameGrid(grid_, other.grid_) && values_ == other.values_;
}

absl::StatusOr<DpGuarantee> DpGuarantee::Create(double epsilon, double delta) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("epsilon must be positive, got %g", epsilon));
  }
  if (!(delta >= 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("delta must be in [0, 1), got %g", delta));
  }
  return DpGuarantee{epsilon, delta};
}

absl::StatusOr<RdpCurve> GaussianCurve(double sigma, GridPtr grid) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("sigma must be positive, got %g", sigma));
  }
  RdpCurve curve = RdpCurve::Zero(grid);
  for (size_t i = 0; i < grid->size(); ++i) {
    curve[i] = (*grid)[i] / (2.0 * sigma * sigma);
  }
  return curve;
}

double LaplaceDivergence(double scale, double alpha) {
  const double a = std::log(alpha / (2 * alpha - 1)) + (alpha - 1) / scale;
  const double b = std::log((alpha - 1) / (2 * alpha - 1)) - alpha / scale;
  return std::max(0.0, LogAddExp(a, b) / (alpha - 1));
}

absl::StatusOr<RdpCurve> LaplaceCurve(double scale, GridPtr grid) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("laplace scale must be positive, got %g", scale));
  }
  RdpCurve curve = RdpCurve::Zero(grid);
  for (size_t i = 0; i < grid->size(); ++i) {
    curve[i] = LaplaceDivergence(scale, (*grid)[i]);
  }
  return curve;
}

double SubsampledGaussianIntegerOrder(double sigma, double q, int alpha) {
  if (q == 1.0) return alpha / (2.0 * sigma * sigma);
  const double inv_two_var = 1.0 / (2.0 * sigma * sigma);
  return SubsampledIntegerOrder(q, alpha, [inv_two_var](int k) {
    return (static_cast<double>(k) * k - k) * inv_two_var;
  });
}

absl::StatusOr<RdpCurve> SubsampledGaussianCurve(double sigma, double q,
                                                 int steps, GridPtr grid) {
  RETURN_IF_ERROR(ValidateSubsampling(q, steps));
  if (q == 1.0) {
    ASSIGN_OR_RETURN(RdpCurve per_step, GaussianCurve(sigma, grid));
    return per_step.Scaled(steps);
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("sigma must be positive, got %g", sigma));
  }
  const RdpCurve per_step = TabulateFromIntegerOrders(grid, [&](int alpha) {
    return SubsampledGaussianIntegerOrder(sigma, q, alpha);
  });
  return per_step.Scaled(steps);
}

absl::StatusOr<RdpCurve> SubsampledLaplaceCurve(double scale, double q,
                                                int steps, GridPtr grid) {
  RETURN_IF_ERROR(ValidateSubsampling(q, steps));
  if (q == 1.0) {
    ASSIGN_OR_RETURN(RdpCurve per_step, LaplaceCurve(scale, grid));
    return per_step.Scaled(steps);
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("laplace scale must be positive, got %g", scale));
  }
  const RdpCurve per_step = TabulateFromIntegerOrders(grid, [&](int alpha) {
    return SubsampledIntegerOrder(q, alpha, [scale](int k) {
      return (k - 1) * LaplaceDivergence(scale, k);
    });
  });
  return per_step.Scaled(steps);
}

absl::StatusOr<RdpCurve> Compose(std::span<const RdpCurve> curves) {
  if (curves.empty()) {
    return absl::InvalidArgumentError("cannot compose an empty curve list");
  }
  RdpCurve total = curves.front();
  for (size_t i = 1; i < curves.size(); ++i) {
    if (!SameGrid(total.grid(), curves[i].grid())) {
      return absl::InvalidArgumentError(
          absl::StrFormat("grid mismatch composing curve %d", i));
    }
    total += curves[i];
  }
  return total;
}

absl::StatusOr<DpConversion> RdpToDp(const RdpCurve& curve, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("delta must be in (0, 1), got %g", delta));
  }
  const AlphaGrid& grid = *curve.grid();
  const double log_inv_delta = std::log(1.0 / delta);
  DpConversion best{std::numeric_limits<double>::infinity(), 0, grid[0]};
  for (size_t i = 0; i < grid.size(); ++i) {
    const double eps = curve[i] + log_inv_delta / (grid[i] - 1.0);
    if (eps < best.epsilon) best = {eps, i, grid[i]};
  }
  return best;
}

absl::StatusOr<DpGuarantee> BasicDpCompose(
    std::span<const DpGuarantee> guarantees) {
  DpGuarantee total;
  for (const DpGuarantee& g : guarantees) {
    total.epsilon += g.epsilon;
    total.delta += g.delta;
  }
  if (total.delta >= 1.0) {
    return absl::OutOfRangeError(absl::StrFormat(
        "composed delta %g >= 1: the guarantee is vacuous", total.delta));
  }
  return total;
}

absl::StatusOr<RdpCurve> BlockCapacityCurve(const DpGuarantee& global,
                                            GridPtr grid) {
  if (!(global.delta > 0.0 && global.delta < 1.0)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "block capacity requires delta in (0, 1), got %g", global.delta));
  }
  if (!(global.epsilon > 0.0)) {
    return absl::InvalidArgumentError("block capacity requires epsilon > 0");
  }
  const double log_inv_delta = std::log(1.0 / global.delta);
  RdpCurve capacity = RdpCurve::Zero(grid);
  for (size_t i = 0; i < grid->size(); ++i) {
    capacity[i] =
        std::max(0.0, global.epsilon - log_inv_delta / ((*grid)[i] - 1.0));
  }
  return capacity;
}

absl::StatusOr<NormalizedDemand> NormalizeDemand(const RdpCurve& demand,
                                                 const RdpCurve& capacity) {
  if (!SameGrid(demand.grid(), capacity.grid())) {
    return absl::InvalidArgumentError("grid mismatch normalizing demand");
  }
  NormalizedDemand best{std::numeric_limits<double>::infinity(), 0};
  bool any_usable = false;
  for (size_t i = 0; i < demand.size(); ++i) {
    if (!(capacity[i] > 0.0)) continue;
    const double fraction = demand[i] / capacity[i];
    if (!any_usable || fraction < best.min_fraction) {
      best = {fraction, i};
      any_usable = true;
    }
  }
  if (!any_usable) {
    return absl::FailedPreconditionError(
        "capacity curve has no usable order");
  }
  return best;
}

}  // namespace privpack
