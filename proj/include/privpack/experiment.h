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

#ifndef PRIVPACK_EXPERIMENT_H_
#define PRIVPACK_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "privpack/scheduler.h"
#include "privpack/simulator.h"
#include "privpack/workload.h"

namespace privpack {

enum class WorkloadKind { kMicrobenchmark, kTrace, kTwoCategory, kFile };
enum class RunMode { kOffline, kOnline };

struct WorkloadSpec {
  WorkloadKind kind = WorkloadKind::kMicrobenchmark;
  // microbenchmark; block_count comes from the block stream.
  MicrobenchKnobs micro;
  int corpus_points = 20;
  // trace: a CSV path, or a synthetic trace when the path is empty.
  std::string trace_path;
  SyntheticTraceOptions synthetic;
  TraceMappingParams mapping;
  // two_category
  TwoCategoryParams two_category;
  // file
  std::string path;
};

struct ExperimentConfig {
  std::string name = "experiment";
  WorkloadSpec workload;
  BlockStreamSpec blocks;
  std::vector<SchedulerSpec> schedulers;
  RunMode mode = RunMode::kOffline;
  Tick period = 1;  // T, online only; kUnboundedPeriod serializes as "inf"
  Tick horizon = -1;
  std::vector<uint64_t> seeds = {0};
  std::string output_dir = "results";
  int parallelism = 1;
};

// Strict JSON: unknown keys and wrong types fail with the field path.
absl::StatusOr<ExperimentConfig> ParseConfig(std::string_view text);
absl::StatusOr<ExperimentConfig> LoadConfig(const std::filesystem::path& path);
std::string SerializeConfig(const ExperimentConfig& config);
absl::Status ValidateConfig(const ExperimentConfig& config);

// PRIVPACK_OUTPUT_DIR and PRIVPACK_JOBS override the output directory and
// the number of worker threads.
absl::Status ApplyEnvOverrides(ExperimentConfig& config);

// Hash of the serialized config, excluding output_dir and parallelism.
uint64_t ConfigHash(const ExperimentConfig& config);

// The workload a seed produces. Every scheduler in the config sees it.
absl::StatusOr<Workload> BuildWorkload(const ExperimentConfig& config,
                                       uint64_t seed);

enum class CellStatus { kOk, kSkipped, kError };

struct ResultRow {
  std::string scheduler;
  std::string workload;
  uint64_t seed = 0;
  CellStatus status = CellStatus::kOk;
  std::string message;  // why a cell was skipped or failed
  MetricsReport metrics;
};

struct ExperimentOutcome {
  std::vector<ResultRow> rows;  // seed-major, then config scheduler order
  bool any_error = false;
};

absl::StatusOr<ExperimentOutcome> RunExperiment(const ExperimentConfig& config);

// Deterministic table: no wall-clock fields.
std::string FormatResultsCsv(const std::vector<ResultRow>& rows);
std::string FormatRuntimeCsv(const std::vector<ResultRow>& rows);
std::string FormatSummaryJson(const ExperimentConfig& config,
                              const ExperimentOutcome& outcome);

// Writes results.csv, runtime.csv and summary.json under config.output_dir.
absl::Status WriteOutcome(const ExperimentConfig& config,
                          const ExperimentOutcome& outcome);

inline constexpr const char* kSweepParameters[] = {
    "task_count", "block_count", "T", "sigma_blocks", "sigma_alpha"};

// Sets one sweep parameter on a copy of `config`.
absl::StatusOr<ExperimentConfig> WithParameter(const ExperimentConfig& config,
                                               std::string_view parameter,
                                               double value);

struct SweepOutcome {
  std::vector<double> values;
  std::vector<ExperimentOutcome> outcomes;
  bool any_error = false;
};

// One experiment per value, each written under
// <output_dir>/<parameter>=<value>/, plus <output_dir>/sweep.csv in long
// format.
absl::StatusOr<SweepOutcome> RunSweep(const ExperimentConfig& config,
                                      std::string_view parameter,
                                      const std::vector<double>& values);

std::string FormatSweepCsv(std::string_view parameter,
                           const SweepOutcome& outcome);

// Human-readable digest of a result directory.
absl::StatusOr<std::string> DescribeResult(const std::filesystem::path& dir);

const char* Version();

}  // namespace privpack

#endif  // PRIVPACK_EXPERIMENT_H_
