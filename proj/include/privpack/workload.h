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

#ifndef PRIVPACK_WORKLOAD_H_
#define PRIVPACK_WORKLOAD_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "privpack/block.h"
#include "privpack/rdp.h"
#include "privpack/task.h"

namespace privpack {

// Workload file:
//   {"grid": [orders...],
//    "tasks": [{"id", "arrival", "weight", "timeout" (optional),
//               "mechanism", "blocks": {"most_recent": m} | {"ids": [...]},
//               "demand": [eps per order]}]}
absl::StatusOr<Workload> ParseWorkload(std::string_view text);
absl::StatusOr<Workload> LoadWorkload(const std::filesystem::path& path);
std::string SerializeWorkload(const Workload& workload);

// Budget every generator normalizes against.
inline constexpr DpGuarantee kReferenceBudget{10.0, 1e-7};

struct CorpusCurve {
  std::string name;
  RdpCurve curve;
  size_t best_alpha_index = 0;  // under normalization by the reference budget
  double eps_min = 0;           // normalized minimum
};

struct CorpusOptions {
  int points_per_axis = 20;
  double outlier_floor = 0.05;
  DpGuarantee reference = kReferenceBudget;
};

// Orders at which the reference capacity is positive; best alphas always
// land on one of them. For the default grid: 3, 4, 5, 6, 8, 16, 32, 64.
absl::StatusOr<std::vector<size_t>> BucketOrders(const GridPtr& grid,
                                                 const DpGuarantee& reference);

// Sweeps Laplace, subsampled Laplace, Gaussian, subsampled Gaussian and
// Laplace+Gaussian compositions. Fails if some bucket ends up empty.
absl::StatusOr<std::vector<CorpusCurve>> BuildCurveCorpus(
    const GridPtr& grid, const CorpusOptions& options = {});

// How a curve is moved onto a target normalized minimum. kShift adds a
// constant to the normalized curve d(a) / c(a); kScale multiplies the curve.
// Both keep the best order.
enum class RescaleMode { kShift, kScale };

struct MicrobenchKnobs {
  int64_t task_count = 100;
  int64_t block_count = 10;  // blocks available to sample from
  double mu_blocks = 10;
  double sigma_blocks = 0;
  double sigma_alpha = 0;
  double eps_min = 0.1;  // normalized demand at the best order
  RescaleMode rescale = RescaleMode::kShift;
  uint64_t seed = 0;
};

absl::Status ValidateKnobs(const MicrobenchKnobs& knobs);

// Offline microbenchmark: every task arrives at tick 0 and names explicit
// block ids in [0, block_count).
absl::StatusOr<Workload> GenerateMicrobenchmark(
    const MicrobenchKnobs& knobs, const std::vector<CorpusCurve>& corpus);

// Moves `curve` so that its normalized minimum equals `eps_min`. Fails if
// the result does not re-verify (same best order, minimum within 1e-6).
absl::StatusOr<RdpCurve> RescaleToEpsMin(const RdpCurve& curve,
                                         const RdpCurve& reference_capacity,
                                         double eps_min, RescaleMode mode);

enum class MachineClass { kCpu, kGpu };

struct TraceRecord {
  Tick timestamp = 0;
  MachineClass machine = MachineClass::kCpu;
  double memory_gb_hours = 0;
  double network_bytes = 0;
};

// Comma-separated with the header
//   timestamp,machine_class,memory_gb_hours,network_bytes
absl::StatusOr<std::vector<TraceRecord>> ParseTraceCsv(std::string_view text);
std::string SerializeTraceCsv(const std::vector<TraceRecord>& records);

struct TraceMappingParams {
  double eps_slope = 0.01;  // eps = slope * memory + intercept
  double eps_intercept = 0.001;
  double blocks_slope = 2e-9;  // blocks = ceil(slope * bytes + intercept)
  double blocks_intercept = 0;
  int64_t max_blocks = 100;
  double eps_floor = 0.001;
  double eps_cap = 1.0;
  Tick window_start = 0;
  Tick window_end = -1;  // exclusive; -1 means no end
  Tick timeout = kNoTimeout;
};

absl::Status ValidateTraceParams(const TraceMappingParams& params);

inline constexpr const char* kCpuMechanisms[] = {"laplace", "gaussian",
                                                 "subsampled_laplace"};
inline constexpr const char* kGpuMechanisms[] = {
    "composed_subsampled_gaussian", "composed_gaussian"};

// Records outside the window, or whose eps or block count falls outside the
// truncation bounds, are dropped. Task ids follow record order.
absl::StatusOr<Workload> MapTrace(const std::vector<TraceRecord>& records,
                                  const TraceMappingParams& params,
                                  const GridPtr& grid, uint64_t seed);

struct SyntheticTraceOptions {
  int64_t record_count = 1000;
  double arrival_rate = 1.0;  // records per tick
  double gpu_fraction = 0.3;
  double memory_log_mean = 1.0;  // log of GB-hours
  double memory_log_std = 1.5;
  double network_log_mean = 20.0;  // log of bytes
  double network_log_std = 1.5;
};

std::vector<TraceRecord> GenerateSyntheticTrace(
    const SyntheticTraceOptions& options, uint64_t seed);

struct TwoCategoryParams {
  double arrival_rate = 1.0;  // tasks per tick, Poisson
  Tick duration = 100;
  int large_templates = 24;
  int small_templates = 18;
  int64_t large_blocks = 10;  // most recent blocks requested
  int64_t small_blocks = 1;
  Tick timeout = kNoTimeout;
};

inline constexpr double kLargeWeights[] = {10, 50, 100, 500};
inline constexpr double kSmallWeights[] = {1, 5, 10, 50};

// "large" tasks carry composed subsampled Gaussian curves, "small" tasks
// Laplace curves.
absl::StatusOr<Workload> GenerateWeightedTwoCategory(
    const TwoCategoryParams& params, const GridPtr& grid, uint64_t seed);

}  // namespace privpack

#endif  // PRIVPACK_WORKLOAD_H_
