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

#ifndef PRIVPACK_RDP_H_
#define PRIVPACK_RDP_H_

#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"

namespace privpack {

// Ordered set of Renyi orders on which every curve of an experiment is
// tabulated. Orders are strictly increasing and > 1, except that a
// single-order grid may be used to model traditional (epsilon, delta)
// accounting, in which case the lone order is only a label.
class AlphaGrid {
 public:
  static absl::StatusOr<std::shared_ptr<const AlphaGrid>> Create(
      std::vector<double> orders);

  // {1.5, 1.75, 2, 2.5, 3, 4, 5, 6, 8, 16, 32, 64}.
  static std::shared_ptr<const AlphaGrid> Default();

  size_t size() const { return orders_.size(); }
  double operator[](size_t i) const { return orders_[i]; }
  std::span<const double> orders() const { return orders_; }

  bool operator==(const AlphaGrid& other) const {
    return orders_ == other.orders_;
  }

 private:
  explicit AlphaGrid(std::vector<double> orders) : orders_(std::move(orders)) {}

  std::vector<double> orders_;
};

using GridPtr = std::shared_ptr<const AlphaGrid>;

bool SameGrid(const GridPtr& a, const GridPtr& b);

// Privacy-loss bound epsilon(alpha) tabulated on an AlphaGrid. Used both for
// task demands and for block capacities.
class RdpCurve {
 public:
  RdpCurve() = default;

  static RdpCurve Zero(GridPtr grid);
  static RdpCurve Constant(GridPtr grid, double value);
  // Values must have one entry per grid order. Negative entries are allowed
  // here so that net capacities (budget minus consumption) can be represented;
  // mechanism curves are always non-negative.
  static absl::StatusOr<RdpCurve> FromValues(GridPtr grid,
                                             std::vector<double> values);

  const GridPtr& grid() const { return grid_; }
  size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  double operator[](size_t i) const { return values_[i]; }
  double& operator[](size_t i) { return values_[i]; }
  std::span<const double> values() const { return values_; }

  // Pointwise arithmetic. Both operands must share a grid.
  RdpCurve& operator+=(const RdpCurve& other);
  RdpCurve& operator-=(const RdpCurve& other);
  RdpCurve Scaled(double factor) const;

  bool IsZero() const;

  friend RdpCurve operator+(RdpCurve a, const RdpCurve& b) { return a += b; }
  friend RdpCurve operator-(RdpCurve a, const RdpCurve& b) { return a -= b; }

  bool operator==(const RdpCurve& other) const;

 private:
  RdpCurve(GridPtr grid, std::vector<double> values)
      : grid_(std::move(grid)), values_(std::move(values)) {}

  GridPtr grid_;
  std::vector<double> values_;
};

// Traditional (epsilon, delta)-DP guarantee.
struct DpGuarantee {
  double epsilon = 0;
  double delta = 0;

  static absl::StatusOr<DpGuarantee> Create(double epsilon, double delta);
};

// epsilon(alpha) = alpha / (2 sigma^2), sensitivity 1.
absl::StatusOr<RdpCurve> GaussianCurve(double sigma, GridPtr grid);

// Renyi divergence between Laplace(0, scale) and Laplace(1, scale).
absl::StatusOr<RdpCurve> LaplaceCurve(double scale, GridPtr grid);

// Poisson-subsampled Gaussian with sampling rate q, composed over `steps`
// iterations. Integer orders use the binomial expansion of the mixture
// divergence; fractional orders interpolate between integer neighbours.
absl::StatusOr<RdpCurve> SubsampledGaussianCurve(double sigma, double q,
                                                 int steps, GridPtr grid);

// Same amplification applied to the Laplace divergence. Documented as an
// upper bound, not a tight accountant.
absl::StatusOr<RdpCurve> SubsampledLaplaceCurve(double scale, double q,
                                                int steps, GridPtr grid);

// Per-step Renyi divergence at an integer order >= 2, exposed for tests.
double SubsampledGaussianIntegerOrder(double sigma, double q, int alpha);
double LaplaceDivergence(double scale, double alpha);

// Pointwise sum. All curves must share one grid.
absl::StatusOr<RdpCurve> Compose(std::span<const RdpCurve> curves);

struct DpConversion {
  double epsilon = 0;
  size_t best_alpha_index = 0;
  double best_alpha = 0;
};

// min over grid orders of eps(alpha) + log(1/delta) / (alpha - 1); ties go to
// the smaller order.
absl::StatusOr<DpConversion> RdpToDp(const RdpCurve& curve, double delta);

// Basic composition: componentwise sums. Fails if the summed delta reaches 1.
absl::StatusOr<DpGuarantee> BasicDpCompose(
    std::span<const DpGuarantee> guarantees);

// Per-order budget of a privacy filter certifying `global`:
// max(0, eps_G - log(1/delta_G) / (alpha - 1)).
absl::StatusOr<RdpCurve> BlockCapacityCurve(const DpGuarantee& global,
                                            GridPtr grid);

// Budget-relative view of a demand against a reference capacity curve.
// Orders where the capacity is zero are unusable and skipped.
struct NormalizedDemand {
  // min over usable orders of demand / capacity.
  double min_fraction = 0;
  size_t best_alpha_index = 0;
};

absl::StatusOr<NormalizedDemand> NormalizeDemand(const RdpCurve& demand,
                                                 const RdpCurve& capacity);

}  // namespace privpack

#endif  // PRIVPACK_RDP_H_
