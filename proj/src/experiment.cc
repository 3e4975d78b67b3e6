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

#include "privpack/experiment.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <thread>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/string_view.h"
#include "json.hpp"
#include "privpack/file_util.h"
#include "privpack/status_macros.h"

#ifndef PRIVPACK_VERSION
#define PRIVPACK_VERSION "0.0.0"
#endif

namespace privpack {
namespace {

using json = nlohmann::ordered_json;

absl::Status FieldError(const std::string& path, absl::string_view what) {
  return absl::InvalidArgumentError(absl::StrCat(path, ": ", what));
}

// Reads one JSON object, remembering which keys were consumed so that
// leftovers can be reported as unknown.
class Fields {
 public:
  Fields(const json& obj, std::string path)
      : obj_(obj), path_(std::move(path)) {}

  absl::Status Check() const {
    if (!obj_.is_object()) return FieldError(path_, "expected an object");
    return absl::OkStatus();
  }

  std::string Path(const char* key) const {
    return path_.empty() ? key : absl::StrCat(path_, ".", key);
  }

  bool Has(const char* key) {
    used_.push_back(key);
    return obj_.contains(key);
  }

  const json& Get(const char* key) const { return obj_[key]; }

  template <typename T>
  absl::Status Int(const char* key, T& out) {
    if (!Has(key)) return absl::OkStatus();
    const json& v = obj_[key];
    if (!v.is_number_integer()) return FieldError(Path(key), "expected an integer");
    if (std::is_unsigned_v<T> && v.is_number_integer() && !v.is_number_unsigned() &&
        v.get<int64_t>() < 0) {
      return FieldError(Path(key), "expected a non-negative integer");
    }
    out = v.get<T>();
    return absl::OkStatus();
  }

  absl::Status Number(const char* key, double& out) {
    if (!Has(key)) return absl::OkStatus();
    const json& v = obj_[key];
    if (!v.is_number()) return FieldError(Path(key), "expected a number");
    out = v.get<double>();
    return absl::OkStatus();
  }

  absl::Status String(const char* key, std::string& out) {
    if (!Has(key)) return absl::OkStatus();
    const json& v = obj_[key];
    if (!v.is_string()) return FieldError(Path(key), "expected a string");
    out = v.get<std::string>();
    return absl::OkStatus();
  }

  // Tick field that also accepts the string "none" for no timeout.
  absl::Status Timeout(const char* key, Tick& out) {
    if (!Has(key)) return absl::OkStatus();
    const json& v = obj_[key];
    if (v.is_string() && v.get<std::string>() == "none") {
      out = kNoTimeout;
      return absl::OkStatus();
    }
    if (!v.is_number_integer()) {
      return FieldError(Path(key), "expected an integer or \"none\"");
    }
    out = v.get<Tick>();
    return absl::OkStatus();
  }

  absl::Status Finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (std::find(used_.begin(), used_.end(), key) == used_.end()) {
        return FieldError(Path(key.c_str()), "unknown key");
      }
    }
    return absl::OkStatus();
  }

 private:
  const json& obj_;
  std::string path_;
  std::vector<std::string> used_;
};

const char* WorkloadKindName(WorkloadKind kind) {
  switch (kind) {
    case WorkloadKind::kMicrobenchmark:
      return "microbenchmark";
    case WorkloadKind::kTrace:
      return "trace";
    case WorkloadKind::kTwoCategory:
      return "two_category";
    case WorkloadKind::kFile:
      return "file";
  }
  return "unknown";
}

json TimeoutJson(Tick t) {
  if (t == kNoTimeout) return "none";
  return t;
}

absl::Status ParseScheduler(const json& obj, const std::string& path,
                            SchedulerSpec& spec) {
  Fields f(obj, path);
  RETURN_IF_ERROR(f.Check());
  std::string kind;
  RETURN_IF_ERROR(f.String("kind", kind));
  absl::StatusOr<SchedulerKind> parsed = ParseSchedulerKind(kind);
  if (!parsed.ok()) return FieldError(f.Path("kind"), parsed.status().message());
  spec.kind = *parsed;
  RETURN_IF_ERROR(f.Number("fair_share", spec.fair_share));
  if (spec.kind == SchedulerKind::kDpk) {
    RETURN_IF_ERROR(f.Number("eta", spec.eta));
  }
  if (spec.kind == SchedulerKind::kOptimal) {
    RETURN_IF_ERROR(f.Int("max_items", spec.limits.max_items));
    RETURN_IF_ERROR(
        f.Int("max_alpha_combinations", spec.limits.max_alpha_combinations));
    RETURN_IF_ERROR(f.Int("max_nodes", spec.limits.max_nodes));
  }
  return f.Finish();
}

json SchedulerJson(const SchedulerSpec& spec) {
  json out;
  out["kind"] = SchedulerName(spec.kind);
  out["fair_share"] = spec.fair_share;
  if (spec.kind == SchedulerKind::kDpk) out["eta"] = spec.eta;
  if (spec.kind == SchedulerKind::kOptimal) {
    out["max_items"] = spec.limits.max_items;
    out["max_alpha_combinations"] = spec.limits.max_alpha_combinations;
    out["max_nodes"] = spec.limits.max_nodes;
  }
  return out;
}

absl::Status ParseWorkloadSpec(const json& obj, const std::string& path,
                               WorkloadSpec& spec) {
  Fields f(obj, path);
  RETURN_IF_ERROR(f.Check());
  std::string generator;
  RETURN_IF_ERROR(f.String("generator", generator));
  bool found = false;
  for (WorkloadKind k : {WorkloadKind::kMicrobenchmark, WorkloadKind::kTrace,
                         WorkloadKind::kTwoCategory, WorkloadKind::kFile}) {
    if (generator == WorkloadKindName(k)) {
      spec.kind = k;
      found = true;
    }
  }
  if (!found) {
    return FieldError(f.Path("generator"),
                      "expected microbenchmark, trace, two_category or file");
  }
  const char* section = WorkloadKindName(spec.kind);
  if (!f.Has(section)) return f.Finish();
  Fields s(f.Get(section), f.Path(section));
  RETURN_IF_ERROR(s.Check());
  switch (spec.kind) {
    case WorkloadKind::kMicrobenchmark: {
      MicrobenchKnobs& k = spec.micro;
      RETURN_IF_ERROR(s.Int("task_count", k.task_count));
      RETURN_IF_ERROR(s.Number("mu_blocks", k.mu_blocks));
      RETURN_IF_ERROR(s.Number("sigma_blocks", k.sigma_blocks));
      RETURN_IF_ERROR(s.Number("sigma_alpha", k.sigma_alpha));
      RETURN_IF_ERROR(s.Number("eps_min", k.eps_min));
      RETURN_IF_ERROR(s.Int("corpus_points", spec.corpus_points));
      std::string rescale = "shift";
      RETURN_IF_ERROR(s.String("rescale", rescale));
      if (rescale == "scale") {
        k.rescale = RescaleMode::kScale;
      } else if (rescale != "shift") {
        return FieldError(s.Path("rescale"), "expected shift or scale");
      }
      break;
    }
    case WorkloadKind::kTrace: {
      RETURN_IF_ERROR(s.String("path", spec.trace_path));
      if (s.Has("synthetic")) {
        Fields y(s.Get("synthetic"), s.Path("synthetic"));
        RETURN_IF_ERROR(y.Check());
        SyntheticTraceOptions& o = spec.synthetic;
        RETURN_IF_ERROR(y.Int("record_count", o.record_count));
        RETURN_IF_ERROR(y.Number("arrival_rate", o.arrival_rate));
        RETURN_IF_ERROR(y.Number("gpu_fraction", o.gpu_fraction));
        RETURN_IF_ERROR(y.Number("memory_log_mean", o.memory_log_mean));
        RETURN_IF_ERROR(y.Number("memory_log_std", o.memory_log_std));
        RETURN_IF_ERROR(y.Number("network_log_mean", o.network_log_mean));
        RETURN_IF_ERROR(y.Number("network_log_std", o.network_log_std));
        RETURN_IF_ERROR(y.Finish());
      }
      if (s.Has("mapping")) {
        Fields m(s.Get("mapping"), s.Path("mapping"));
        RETURN_IF_ERROR(m.Check());
        TraceMappingParams& p = spec.mapping;
        RETURN_IF_ERROR(m.Number("eps_slope", p.eps_slope));
        RETURN_IF_ERROR(m.Number("eps_intercept", p.eps_intercept));
        RETURN_IF_ERROR(m.Number("blocks_slope", p.blocks_slope));
        RETURN_IF_ERROR(m.Number("blocks_intercept", p.blocks_intercept));
        RETURN_IF_ERROR(m.Int("max_blocks", p.max_blocks));
        RETURN_IF_ERROR(m.Number("eps_floor", p.eps_floor));
        RETURN_IF_ERROR(m.Number("eps_cap", p.eps_cap));
        RETURN_IF_ERROR(m.Int("window_start", p.window_start));
        RETURN_IF_ERROR(m.Int("window_end", p.window_end));
        RETURN_IF_ERROR(m.Timeout("timeout", p.timeout));
        RETURN_IF_ERROR(m.Finish());
      }
      break;
    }
    case WorkloadKind::kTwoCategory: {
      TwoCategoryParams& p = spec.two_category;
      RETURN_IF_ERROR(s.Number("arrival_rate", p.arrival_rate));
      RETURN_IF_ERROR(s.Int("duration", p.duration));
      RETURN_IF_ERROR(s.Int("large_templates", p.large_templates));
      RETURN_IF_ERROR(s.Int("small_templates", p.small_templates));
      RETURN_IF_ERROR(s.Int("large_blocks", p.large_blocks));
      RETURN_IF_ERROR(s.Int("small_blocks", p.small_blocks));
      RETURN_IF_ERROR(s.Timeout("timeout", p.timeout));
      break;
    }
    case WorkloadKind::kFile:
      RETURN_IF_ERROR(s.String("path", spec.path));
      break;
  }
  RETURN_IF_ERROR(s.Finish());
  return f.Finish();
}

json WorkloadJson(const WorkloadSpec& spec) {
  json out;
  out["generator"] = WorkloadKindName(spec.kind);
  json s;
  switch (spec.kind) {
    case WorkloadKind::kMicrobenchmark:
      s["task_count"] = spec.micro.task_count;
      s["mu_blocks"] = spec.micro.mu_blocks;
      s["sigma_blocks"] = spec.micro.sigma_blocks;
      s["sigma_alpha"] = spec.micro.sigma_alpha;
      s["eps_min"] = spec.micro.eps_min;
      s["corpus_points"] = spec.corpus_points;
      s["rescale"] =
          spec.micro.rescale == RescaleMode::kShift ? "shift" : "scale";
      break;
    case WorkloadKind::kTrace: {
      s["path"] = spec.trace_path;
      const SyntheticTraceOptions& o = spec.synthetic;
      s["synthetic"] = {{"record_count", o.record_count},
                        {"arrival_rate", o.arrival_rate},
                        {"gpu_fraction", o.gpu_fraction},
                        {"memory_log_mean", o.memory_log_mean},
                        {"memory_log_std", o.memory_log_std},
                        {"network_log_mean", o.network_log_mean},
                        {"network_log_std", o.network_log_std}};
      const TraceMappingParams& p = spec.mapping;
      s["mapping"] = {{"eps_slope", p.eps_slope},
                      {"eps_intercept", p.eps_intercept},
                      {"blocks_slope", p.blocks_slope},
                      {"blocks_intercept", p.blocks_intercept},
                      {"max_blocks", p.max_blocks},
                      {"eps_floor", p.eps_floor},
                      {"eps_cap", p.eps_cap},
                      {"window_start", p.window_start},
                      {"window_end", p.window_end},
                      {"timeout", TimeoutJson(p.timeout)}};
      break;
    }
    case WorkloadKind::kTwoCategory: {
      const TwoCategoryParams& p = spec.two_category;
      s["arrival_rate"] = p.arrival_rate;
      s["duration"] = p.duration;
      s["large_templates"] = p.large_templates;
      s["small_templates"] = p.small_templates;
      s["large_blocks"] = p.large_blocks;
      s["small_blocks"] = p.small_blocks;
      s["timeout"] = TimeoutJson(p.timeout);
      break;
    }
    case WorkloadKind::kFile:
      s["path"] = spec.path;
      break;
  }
  out[WorkloadKindName(spec.kind)] = std::move(s);
  return out;
}

json ConfigJson(const ExperimentConfig& c, bool include_environment) {
  json out;
  out["name"] = c.name;
  out["mode"] = c.mode == RunMode::kOnline ? "online" : "offline";
  if (c.period == kUnboundedPeriod) {
    out["T"] = "inf";
  } else {
    out["T"] = c.period;
  }
  out["horizon"] = c.horizon;
  out["seeds"] = c.seeds;
  if (include_environment) {
    out["output_dir"] = c.output_dir;
    out["parallelism"] = c.parallelism;
  }
  out["blocks"] = {{"count", c.blocks.count},
                   {"initial", c.blocks.initial_blocks},
                   {"interval", c.blocks.interval},
                   {"epsilon", c.blocks.global.epsilon},
                   {"delta", c.blocks.global.delta},
                   {"unlock_steps", c.blocks.unlock_steps}};
  out["schedulers"] = json::array();
  for (const SchedulerSpec& s : c.schedulers) {
    out["schedulers"].push_back(SchedulerJson(s));
  }
  out["workload"] = WorkloadJson(c.workload);
  return out;
}

std::string Num(double v) { return absl::StrFormat("%.10g", v); }

const char* StatusName(CellStatus s) {
  switch (s) {
    case CellStatus::kOk:
      return "ok";
    case CellStatus::kSkipped:
      return "skipped";
    case CellStatus::kError:
      return "error";
  }
  return "error";
}

// Quotes a CSV field when it holds a separator, quote or newline.
std::string CsvField(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

constexpr char kResultsHeader[] =
    "scheduler,workload,seed,status,allocated_count,allocated_weight,"
    "delay_mean,delay_median,delay_p95,fair_share_of_allocated,"
    "fair_share_allocated,evicted,pending_at_end,message";

std::string ResultFields(const ResultRow& r) {
  const MetricsReport& m = r.metrics;
  return absl::StrJoin(
      {CsvField(r.scheduler), CsvField(r.workload), absl::StrCat(r.seed),
       std::string(StatusName(r.status)), absl::StrCat(m.allocated_count),
       Num(m.allocated_weight), Num(m.delay.mean), Num(m.delay.median),
       Num(m.delay.p95), Num(m.fair_share_of_allocated),
       Num(m.fair_share_allocated), absl::StrCat(m.evicted_count),
       absl::StrCat(m.pending_at_end), CsvField(r.message)},
      ",");
}

absl::StatusOr<Workload> BuildWorkloadWithCorpus(
    const ExperimentConfig& config, uint64_t seed,
    const std::vector<CorpusCurve>* corpus) {
  const WorkloadSpec& spec = config.workload;
  GridPtr grid = AlphaGrid::Default();
  switch (spec.kind) {
    case WorkloadKind::kMicrobenchmark: {
      MicrobenchKnobs knobs = spec.micro;
      knobs.block_count = config.blocks.count;
      knobs.seed = seed;
      if (corpus != nullptr) return GenerateMicrobenchmark(knobs, *corpus);
      CorpusOptions options;
      options.points_per_axis = spec.corpus_points;
      ASSIGN_OR_RETURN(std::vector<CorpusCurve> built,
                       BuildCurveCorpus(grid, options));
      return GenerateMicrobenchmark(knobs, built);
    }
    case WorkloadKind::kTrace: {
      std::vector<TraceRecord> records;
      if (spec.trace_path.empty()) {
        records = GenerateSyntheticTrace(spec.synthetic, seed);
      } else {
        ASSIGN_OR_RETURN(std::string text, ReadFile(spec.trace_path));
        ASSIGN_OR_RETURN(records, ParseTraceCsv(text));
      }
      return MapTrace(records, spec.mapping, grid, seed);
    }
    case WorkloadKind::kTwoCategory:
      return GenerateWeightedTwoCategory(spec.two_category, grid, seed);
    case WorkloadKind::kFile:
      return LoadWorkload(spec.path);
  }
  return absl::InternalError("unknown workload kind");
}

ResultRow RunCell(const ExperimentConfig& config, const Workload& workload,
                  const SchedulerSpec& spec, uint64_t seed) {
  ResultRow row;
  row.scheduler = SchedulerName(spec.kind);
  row.workload = absl::StrCat(config.name, "/", WorkloadKindName(config.workload.kind));
  row.seed = seed;
  absl::StatusOr<SimulationResult> result;
  if (config.mode == RunMode::kOffline) {
    result = RunOffline(workload, config.blocks, spec);
  } else {
    SimulationConfig sim;
    sim.blocks = config.blocks;
    sim.period = config.period;
    sim.horizon = config.horizon;
    sim.scheduler = spec;
    result = RunOnline(workload, sim);
  }
  if (result.ok()) {
    row.metrics = result->metrics;
  } else if (absl::IsResourceExhausted(result.status())) {
    row.status = CellStatus::kSkipped;
    row.message = std::string(result.status().message());
  } else {
    row.status = CellStatus::kError;
    row.message = result.status().ToString();
  }
  return row;
}

}  // namespace

const char* Version() { return PRIVPACK_VERSION; }

absl::StatusOr<ExperimentConfig> ParseConfig(std::string_view text) {
  json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) {
    return absl::InvalidArgumentError("config: not valid JSON");
  }
  ExperimentConfig c;
  Fields f(doc, "");
  RETURN_IF_ERROR(f.Check());
  RETURN_IF_ERROR(f.String("name", c.name));
  std::string mode = "offline";
  RETURN_IF_ERROR(f.String("mode", mode));
  if (mode == "online") {
    c.mode = RunMode::kOnline;
  } else if (mode != "offline") {
    return FieldError("mode", "expected offline or online");
  }
  if (f.Has("T")) {
    const json& t = f.Get("T");
    if (t.is_string() && t.get<std::string>() == "inf") {
      c.period = kUnboundedPeriod;
    } else if (t.is_number_integer()) {
      c.period = t.get<Tick>();
    } else {
      return FieldError("T", "expected a positive integer or \"inf\"");
    }
  }
  RETURN_IF_ERROR(f.Int("horizon", c.horizon));
  if (f.Has("seeds")) {
    const json& s = f.Get("seeds");
    if (!s.is_array()) return FieldError("seeds", "expected an array");
    c.seeds.clear();
    for (size_t i = 0; i < s.size(); ++i) {
      if (!s[i].is_number_unsigned()) {
        return FieldError(absl::StrFormat("seeds[%d]", i),
                          "expected a non-negative integer");
      }
      c.seeds.push_back(s[i].get<uint64_t>());
    }
  }
  RETURN_IF_ERROR(f.String("output_dir", c.output_dir));
  RETURN_IF_ERROR(f.Int("parallelism", c.parallelism));
  if (f.Has("blocks")) {
    Fields b(f.Get("blocks"), "blocks");
    RETURN_IF_ERROR(b.Check());
    RETURN_IF_ERROR(b.Int("count", c.blocks.count));
    RETURN_IF_ERROR(b.Int("initial", c.blocks.initial_blocks));
    RETURN_IF_ERROR(b.Int("interval", c.blocks.interval));
    RETURN_IF_ERROR(b.Number("epsilon", c.blocks.global.epsilon));
    RETURN_IF_ERROR(b.Number("delta", c.blocks.global.delta));
    RETURN_IF_ERROR(b.Int("unlock_steps", c.blocks.unlock_steps));
    RETURN_IF_ERROR(b.Finish());
  }
  if (f.Has("schedulers")) {
    const json& s = f.Get("schedulers");
    if (!s.is_array()) return FieldError("schedulers", "expected an array");
    for (size_t i = 0; i < s.size(); ++i) {
      SchedulerSpec spec;
      RETURN_IF_ERROR(
          ParseScheduler(s[i], absl::StrFormat("schedulers[%d]", i), spec));
      c.schedulers.push_back(spec);
    }
  }
  if (f.Has("workload")) {
    RETURN_IF_ERROR(ParseWorkloadSpec(f.Get("workload"), "workload", c.workload));
  }
  RETURN_IF_ERROR(f.Finish());
  return c;
}

absl::StatusOr<ExperimentConfig> LoadConfig(const std::filesystem::path& path) {
  ASSIGN_OR_RETURN(std::string text, ReadFile(path));
  return ParseConfig(text);
}

std::string SerializeConfig(const ExperimentConfig& config) {
  return ConfigJson(config, /*include_environment=*/true).dump(2) + "\n";
}

uint64_t ConfigHash(const ExperimentConfig& config) {
  return Fingerprint(ConfigJson(config, /*include_environment=*/false).dump());
}

absl::Status ValidateConfig(const ExperimentConfig& c) {
  if (c.name.empty()) return FieldError("name", "must not be empty");
  if (c.mode == RunMode::kOnline && c.period <= 0) {
    return FieldError("T", "must be positive");
  }
  if (c.seeds.empty()) return FieldError("seeds", "must not be empty");
  if (c.parallelism < 1) return FieldError("parallelism", "must be >= 1");
  if (absl::Status s = ValidateBlockStream(c.blocks); !s.ok()) {
    return FieldError("blocks", s.message());
  }
  if (c.schedulers.empty()) {
    return FieldError("schedulers", "must list at least one scheduler");
  }
  for (size_t i = 0; i < c.schedulers.size(); ++i) {
    const SchedulerSpec& s = c.schedulers[i];
    const std::string path = absl::StrFormat("schedulers[%d]", i);
    for (size_t j = 0; j < i; ++j) {
      if (c.schedulers[j].kind == s.kind) {
        return FieldError(path, "duplicate scheduler kind");
      }
    }
    if (!(s.eta > 0 && s.eta < 1)) {
      return FieldError(path + ".eta", "must lie in (0, 1)");
    }
    if (!(s.fair_share > 0)) {
      return FieldError(path + ".fair_share", "must be positive");
    }
  }
  const WorkloadSpec& w = c.workload;
  switch (w.kind) {
    case WorkloadKind::kMicrobenchmark: {
      MicrobenchKnobs knobs = w.micro;
      knobs.block_count = c.blocks.count;
      if (absl::Status s = ValidateKnobs(knobs); !s.ok()) {
        return FieldError("workload.microbenchmark", s.message());
      }
      if (w.corpus_points < 2) {
        return FieldError("workload.microbenchmark.corpus_points",
                          "must be >= 2");
      }
      break;
    }
    case WorkloadKind::kTrace:
      if (absl::Status s = ValidateTraceParams(w.mapping); !s.ok()) {
        return FieldError("workload.trace.mapping", s.message());
      }
      if (w.trace_path.empty() && (w.synthetic.record_count < 0 ||
                                   !(w.synthetic.arrival_rate > 0))) {
        return FieldError("workload.trace.synthetic",
                          "need record_count >= 0 and arrival_rate > 0");
      }
      break;
    case WorkloadKind::kTwoCategory:
      if (w.two_category.duration < 0 || !(w.two_category.arrival_rate >= 0)) {
        return FieldError("workload.two_category",
                          "need duration >= 0 and arrival_rate >= 0");
      }
      break;
    case WorkloadKind::kFile:
      if (w.path.empty()) {
        return FieldError("workload.file.path", "must not be empty");
      }
      break;
  }
  return absl::OkStatus();
}

absl::Status ApplyEnvOverrides(ExperimentConfig& config) {
  if (const char* dir = std::getenv("PRIVPACK_OUTPUT_DIR");
      dir != nullptr && *dir != '\0') {
    config.output_dir = dir;
  }
  if (const char* jobs = std::getenv("PRIVPACK_JOBS");
      jobs != nullptr && *jobs != '\0') {
    int n = 0;
    if (!absl::SimpleAtoi(jobs, &n) || n < 1) {
      return absl::InvalidArgumentError(
          "PRIVPACK_JOBS must be a positive integer");
    }
    config.parallelism = n;
  }
  return absl::OkStatus();
}

absl::StatusOr<Workload> BuildWorkload(const ExperimentConfig& config,
                                       uint64_t seed) {
  return BuildWorkloadWithCorpus(config, seed, nullptr);
}

absl::StatusOr<ExperimentOutcome> RunExperiment(const ExperimentConfig& config) {
  RETURN_IF_ERROR(ValidateConfig(config));
  std::optional<std::vector<CorpusCurve>> corpus;
  if (config.workload.kind == WorkloadKind::kMicrobenchmark) {
    CorpusOptions options;
    options.points_per_axis = config.workload.corpus_points;
    ASSIGN_OR_RETURN(corpus, BuildCurveCorpus(AlphaGrid::Default(), options));
  }
  std::vector<Workload> workloads;
  for (uint64_t seed : config.seeds) {
    ASSIGN_OR_RETURN(
        Workload w,
        BuildWorkloadWithCorpus(config, seed, corpus ? &*corpus : nullptr));
    workloads.push_back(std::move(w));
  }

  const size_t per_seed = config.schedulers.size();
  const size_t cells = workloads.size() * per_seed;
  ExperimentOutcome outcome;
  outcome.rows.resize(cells);
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < cells; i = next++) {
      const size_t s = i / per_seed;
      outcome.rows[i] = RunCell(config, workloads[s],
                                config.schedulers[i % per_seed],
                                config.seeds[s]);
    }
  };
  const size_t threads =
      std::min(cells, static_cast<size_t>(std::max(config.parallelism, 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (const ResultRow& r : outcome.rows) {
    outcome.any_error = outcome.any_error || r.status == CellStatus::kError;
  }
  return outcome;
}

std::string FormatResultsCsv(const std::vector<ResultRow>& rows) {
  std::string out = absl::StrCat(kResultsHeader, "\n");
  for (const ResultRow& r : rows) absl::StrAppend(&out, ResultFields(r), "\n");
  return out;
}

std::string FormatRuntimeCsv(const std::vector<ResultRow>& rows) {
  std::string out = "scheduler,workload,seed,runtime_seconds\n";
  for (const ResultRow& r : rows) {
    absl::StrAppend(&out, CsvField(r.scheduler), ",", CsvField(r.workload), ",",
                    r.seed, ",", Num(r.metrics.runtime_seconds), "\n");
  }
  return out;
}

std::string FormatSummaryJson(const ExperimentConfig& config,
                              const ExperimentOutcome& outcome) {
  json out;
  out["version"] = Version();
  out["config_hash"] = absl::StrFormat("%016x", ConfigHash(config));
  out["name"] = config.name;
  out["cells"] = outcome.rows.size();
  int64_t errors = 0;
  int64_t skipped = 0;
  for (const ResultRow& r : outcome.rows) {
    errors += r.status == CellStatus::kError;
    skipped += r.status == CellStatus::kSkipped;
  }
  out["errors"] = errors;
  out["skipped"] = skipped;
  out["schedulers"] = json::array();
  for (const SchedulerSpec& spec : config.schedulers) {
    const std::string name = SchedulerName(spec.kind);
    int64_t n = 0;
    double count = 0;
    double weight = 0;
    for (const ResultRow& r : outcome.rows) {
      if (r.scheduler != name || r.status != CellStatus::kOk) continue;
      ++n;
      count += static_cast<double>(r.metrics.allocated_count);
      weight += r.metrics.allocated_weight;
    }
    json s;
    s["name"] = name;
    s["ok_cells"] = n;
    s["mean_allocated_count"] = n > 0 ? count / n : 0.0;
    s["mean_allocated_weight"] = n > 0 ? weight / n : 0.0;
    out["schedulers"].push_back(std::move(s));
  }
  return out.dump(2) + "\n";
}

absl::Status WriteOutcome(const ExperimentConfig& config,
                          const ExperimentOutcome& outcome) {
  const std::filesystem::path dir(config.output_dir);
  RETURN_IF_ERROR(
      WriteFileAtomic(dir / "results.csv", FormatResultsCsv(outcome.rows)));
  RETURN_IF_ERROR(
      WriteFileAtomic(dir / "runtime.csv", FormatRuntimeCsv(outcome.rows)));
  return WriteFileAtomic(dir / "summary.json",
                         FormatSummaryJson(config, outcome));
}

absl::StatusOr<ExperimentConfig> WithParameter(const ExperimentConfig& config,
                                               std::string_view parameter,
                                               double value) {
  ExperimentConfig c = config;
  const bool micro = c.workload.kind == WorkloadKind::kMicrobenchmark;
  auto integral = [&](const char* what) -> absl::StatusOr<int64_t> {
    if (!std::isfinite(value) || value != std::floor(value)) {
      return absl::InvalidArgumentError(
          absl::StrCat(what, " takes integer values"));
    }
    return static_cast<int64_t>(value);
  };
  if (parameter == "task_count") {
    if (!micro) {
      return absl::InvalidArgumentError(
          "task_count applies to the microbenchmark generator only");
    }
    ASSIGN_OR_RETURN(c.workload.micro.task_count, integral("task_count"));
  } else if (parameter == "block_count") {
    ASSIGN_OR_RETURN(c.blocks.count, integral("block_count"));
    c.blocks.initial_blocks = std::min(c.blocks.initial_blocks, c.blocks.count);
  } else if (parameter == "T") {
    if (c.mode != RunMode::kOnline) {
      return absl::InvalidArgumentError("T applies to online runs only");
    }
    if (std::isinf(value) && value > 0) {
      c.period = kUnboundedPeriod;
    } else {
      ASSIGN_OR_RETURN(c.period, integral("T"));
    }
  } else if (parameter == "sigma_blocks" || parameter == "sigma_alpha") {
    if (!micro) {
      return absl::InvalidArgumentError(absl::StrCat(
          std::string(parameter),
          " applies to the microbenchmark generator only"));
    }
    (parameter == "sigma_blocks" ? c.workload.micro.sigma_blocks
                                 : c.workload.micro.sigma_alpha) = value;
  } else {
    return absl::InvalidArgumentError(absl::StrCat(
        "unknown sweep parameter '", std::string(parameter), "'; expected one of ",
        absl::StrJoin(kSweepParameters, ", ")));
  }
  RETURN_IF_ERROR(ValidateConfig(c));
  return c;
}

absl::StatusOr<SweepOutcome> RunSweep(const ExperimentConfig& config,
                                      std::string_view parameter,
                                      const std::vector<double>& values) {
  if (values.empty()) {
    return absl::InvalidArgumentError("sweep needs at least one value");
  }
  // Validate every point before running any.
  std::vector<ExperimentConfig> configs;
  for (double v : values) {
    ASSIGN_OR_RETURN(ExperimentConfig c, WithParameter(config, parameter, v));
    c.output_dir = (std::filesystem::path(config.output_dir) /
                    absl::StrCat(std::string(parameter), "=", Num(v)))
                       .string();
    configs.push_back(std::move(c));
  }
  SweepOutcome out;
  out.values = values;
  for (const ExperimentConfig& c : configs) {
    ASSIGN_OR_RETURN(ExperimentOutcome o, RunExperiment(c));
    RETURN_IF_ERROR(WriteOutcome(c, o));
    out.any_error = out.any_error || o.any_error;
    out.outcomes.push_back(std::move(o));
  }
  RETURN_IF_ERROR(WriteFileAtomic(
      std::filesystem::path(config.output_dir) / "sweep.csv",
      FormatSweepCsv(parameter, out)));
  return out;
}

std::string FormatSweepCsv(std::string_view parameter,
                           const SweepOutcome& outcome) {
  std::string out = absl::StrCat("parameter,value,", kResultsHeader, "\n");
  for (size_t i = 0; i < outcome.outcomes.size(); ++i) {
    for (const ResultRow& r : outcome.outcomes[i].rows) {
      absl::StrAppend(&out, std::string(parameter), ",", Num(outcome.values[i]),
                      ",", ResultFields(r), "\n");
    }
  }
  return out;
}

absl::StatusOr<std::string> DescribeResult(const std::filesystem::path& dir) {
  ASSIGN_OR_RETURN(std::string summary_text, ReadFile(dir / "summary.json"));
  json summary = json::parse(summary_text, nullptr, false);
  if (summary.is_discarded() || !summary.is_object()) {
    return absl::InvalidArgumentError("summary.json is not a JSON object");
  }
  ASSIGN_OR_RETURN(std::string results, ReadFile(dir / "results.csv"));
  size_t lines = 0;
  for (char ch : results) lines += ch == '\n';
  std::string out = absl::StrFormat(
      "experiment %s (version %s, config %s)\ncells: %d, errors: %d, "
      "skipped: %d, result rows: %d\n",
      summary.value("name", "?"), summary.value("version", "?"),
      summary.value("config_hash", "?"), summary.value("cells", 0),
      summary.value("errors", 0), summary.value("skipped", 0),
      lines > 0 ? lines - 1 : 0);
  absl::StrAppendFormat(&out, "%-10s %8s %16s %16s\n", "scheduler", "cells",
                        "mean count", "mean weight");
  if (summary.contains("schedulers") && summary["schedulers"].is_array()) {
    for (const json& s : summary["schedulers"]) {
      absl::StrAppendFormat(&out, "%-10s %8d %16.4f %16.4f\n",
                            s.value("name", "?"), s.value("ok_cells", 0),
                            s.value("mean_allocated_count", 0.0),
                            s.value("mean_allocated_weight", 0.0));
    }
  }
  return out;
}

}  // namespace privpack
