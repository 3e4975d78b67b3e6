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

// Command-line front end: validate, run, sweep, gen-workload,
// describe-result.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "privpack/experiment.h"
#include "privpack/file_util.h"
#include "privpack/status_macros.h"
#include "privpack/workload.h"

namespace privpack {
namespace {

absl::StatusOr<ExperimentConfig> LoadValidated(const std::string& path) {
  ASSIGN_OR_RETURN(ExperimentConfig config, LoadConfig(path));
  RETURN_IF_ERROR(ApplyEnvOverrides(config));
  RETURN_IF_ERROR(ValidateConfig(config));
  return config;
}

int Report(const absl::Status& status) {
  if (status.ok()) return 0;
  std::fprintf(stderr, "error: %s\n", status.ToString().c_str());
  return 2;
}

int Validate(const std::string& path) {
  absl::StatusOr<ExperimentConfig> config = LoadValidated(path);
  if (!config.ok()) return Report(config.status());
  std::printf("ok: %s (config %016llx)\n", config->name.c_str(),
              static_cast<unsigned long long>(ConfigHash(*config)));
  return 0;
}

int Run(const std::string& path) {
  absl::StatusOr<ExperimentConfig> config = LoadValidated(path);
  if (!config.ok()) return Report(config.status());
  absl::StatusOr<ExperimentOutcome> outcome = RunExperiment(*config);
  if (!outcome.ok()) return Report(outcome.status());
  if (absl::Status s = WriteOutcome(*config, *outcome); !s.ok()) {
    return Report(s);
  }
  for (const ResultRow& r : outcome->rows) {
    if (r.status != CellStatus::kOk) {
      std::fprintf(stderr, "%s seed %llu: %s\n", r.scheduler.c_str(),
                   static_cast<unsigned long long>(r.seed), r.message.c_str());
    }
  }
  std::printf("wrote %s\n", config->output_dir.c_str());
  return outcome->any_error ? 1 : 0;
}

int Sweep(const std::string& path, const std::string& parameter,
          const std::vector<double>& values) {
  absl::StatusOr<ExperimentConfig> config = LoadValidated(path);
  if (!config.ok()) return Report(config.status());
  absl::StatusOr<SweepOutcome> outcome = RunSweep(*config, parameter, values);
  if (!outcome.ok()) return Report(outcome.status());
  std::printf("wrote %s/sweep.csv\n", config->output_dir.c_str());
  return outcome->any_error ? 1 : 0;
}

int GenWorkload(const std::string& path, uint64_t seed,
                const std::string& output, const std::string& trace_output) {
  absl::StatusOr<ExperimentConfig> config = LoadValidated(path);
  if (!config.ok()) return Report(config.status());
  if (!trace_output.empty()) {
    if (config->workload.kind != WorkloadKind::kTrace ||
        !config->workload.trace_path.empty()) {
      return Report(absl::InvalidArgumentError(
          "--trace-output needs a trace workload with a synthetic trace"));
    }
    if (absl::Status s = WriteFileAtomic(
            trace_output, SerializeTraceCsv(GenerateSyntheticTrace(
                              config->workload.synthetic, seed)));
        !s.ok()) {
      return Report(s);
    }
  }
  absl::StatusOr<Workload> workload = BuildWorkload(*config, seed);
  if (!workload.ok()) return Report(workload.status());
  if (absl::Status s = WriteFileAtomic(output, SerializeWorkload(*workload));
      !s.ok()) {
    return Report(s);
  }
  std::printf("wrote %zu tasks to %s\n", workload->tasks.size(),
              output.c_str());
  return 0;
}

int Describe(const std::string& dir) {
  absl::StatusOr<std::string> text = DescribeResult(dir);
  if (!text.ok()) return Report(text.status());
  std::fputs(text->c_str(), stdout);
  return 0;
}

}  // namespace
}  // namespace privpack

int main(int argc, char** argv) {
  CLI::App app{"Privacy-budget scheduling experiments"};
  app.set_version_flag("--version", std::string(privpack::Version()));
  app.require_subcommand(1);

  std::string config;
  auto* validate = app.add_subcommand("validate", "Check a config file");
  validate->add_option("config", config, "Experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);

  auto* run = app.add_subcommand("run", "Run every scheduler x seed cell");
  run->add_option("config", config, "Experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);

  std::string parameter;
  std::vector<double> values;
  auto* sweep = app.add_subcommand("sweep", "Run one experiment per value");
  sweep->add_option("config", config, "Experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  sweep->add_option("--parameter", parameter,
                    "task_count, block_count, T, sigma_blocks or sigma_alpha")
      ->required();
  sweep->add_option("--values", values, "Comma-separated values")
      ->required()
      ->delimiter(',');

  uint64_t seed = 0;
  std::string output;
  std::string trace_output;
  auto* gen = app.add_subcommand("gen-workload", "Write the workload a seed produces");
  gen->add_option("config", config, "Experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  gen->add_option("--seed", seed, "Workload seed");
  gen->add_option("--output", output, "Workload file to write")->required();
  gen->add_option("--trace-output", trace_output,
                  "Also write the synthetic trace as CSV");

  std::string dir;
  auto* describe =
      app.add_subcommand("describe-result", "Summarize a result directory");
  describe->add_option("dir", dir, "Directory holding summary.json")
      ->required()
      ->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  if (*validate) return privpack::Validate(config);
  if (*run) return privpack::Run(config);
  if (*sweep) return privpack::Sweep(config, parameter, values);
  if (*gen) return privpack::GenWorkload(config, seed, output, trace_output);
  if (*describe) return privpack::Describe(dir);
  return 2;
}
