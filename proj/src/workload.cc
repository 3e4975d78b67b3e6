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

#include "privpack/workload.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "absl/strings/string_view.h"
#include "absl/strings/strip.h"
#include "json.hpp"
#include "privpack/curve_io.h"
#include "privpack/file_util.h"
#include "privpack/status_macros.h"

namespace privpack {
namespace {

using json = nlohmann::ordered_json;

absl::Status CheckKeys(const json& obj, const std::string& where,
                       std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) {
      return absl::InvalidArgumentError(
          absl::StrCat(where, ".", key, ": unknown key"));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<int64_t> GetInt(const json& obj, const std::string& where,
                               const char* key) {
  if (!obj.contains(key) || !obj[key].is_number_integer()) {
    return absl::InvalidArgumentError(
        absl::StrCat(where, ".", key, ": expected an integer"));
  }
  return obj[key].get<int64_t>();
}

absl::StatusOr<double> GetNumber(const json& obj, const std::string& where,
                                 const char* key) {
  if (!obj.contains(key) || !obj[key].is_number()) {
    return absl::InvalidArgumentError(
        absl::StrCat(where, ".", key, ": expected a number"));
  }
  return obj[key].get<double>();
}

absl::StatusOr<std::vector<double>> GetNumbers(const json& value,
                                               const std::string& where) {
  if (!value.is_array()) {
    return absl::InvalidArgumentError(
        absl::StrCat(where, ": expected an array of numbers"));
  }
  std::vector<double> out;
  for (const json& v : value) {
    if (!v.is_number()) {
      return absl::InvalidArgumentError(
          absl::StrCat(where, ": non-numeric entry"));
    }
    out.push_back(v.get<double>());
  }
  return out;
}

absl::StatusOr<TaskTemplate> ParseTask(const json& rec, const GridPtr& grid,
                                       const std::string& where) {
  if (!rec.is_object()) {
    return absl::InvalidArgumentError(absl::StrCat(where, ": expected object"));
  }
  RETURN_IF_ERROR(CheckKeys(rec, where,
                            {"id", "arrival", "weight", "timeout", "mechanism",
                             "blocks", "demand"}));
  TaskTemplate t;
  ASSIGN_OR_RETURN(t.id, GetInt(rec, where, "id"));
  ASSIGN_OR_RETURN(t.arrival, GetInt(rec, where, "arrival"));
  ASSIGN_OR_RETURN(t.weight, GetNumber(rec, where, "weight"));
  if (rec.contains("timeout")) {
    ASSIGN_OR_RETURN(t.timeout, GetInt(rec, where, "timeout"));
  }
  if (rec.contains("mechanism")) {
    if (!rec["mechanism"].is_string()) {
      return absl::InvalidArgumentError(
          absl::StrCat(where, ".mechanism: expected a string"));
    }
    t.mechanism = rec["mechanism"].get<std::string>();
  }
  if (!rec.contains("blocks") || !rec["blocks"].is_object()) {
    return absl::InvalidArgumentError(
        absl::StrCat(where, ".blocks: expected an object"));
  }
  const json& blocks = rec["blocks"];
  const std::string bwhere = absl::StrCat(where, ".blocks");
  RETURN_IF_ERROR(CheckKeys(blocks, bwhere, {"most_recent", "ids"}));
  if (blocks.contains("most_recent") == blocks.contains("ids")) {
    return absl::InvalidArgumentError(
        absl::StrCat(bwhere, ": give exactly one of most_recent, ids"));
  }
  if (blocks.contains("most_recent")) {
    ASSIGN_OR_RETURN(t.blocks.most_recent,
                     GetInt(blocks, bwhere, "most_recent"));
    if (t.blocks.most_recent < 1) {
      return absl::InvalidArgumentError(
          absl::StrCat(bwhere, ".most_recent: must be >= 1"));
    }
  } else {
    if (!blocks["ids"].is_array() || blocks["ids"].empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat(bwhere, ".ids: expected a non-empty array"));
    }
    for (const json& id : blocks["ids"]) {
      if (!id.is_number_integer() || id.get<int64_t>() < 0) {
        return absl::InvalidArgumentError(
            absl::StrCat(bwhere, ".ids: expected non-negative integers"));
      }
      t.blocks.ids.push_back(id.get<int64_t>());
    }
  }
  if (!rec.contains("demand")) {
    return absl::InvalidArgumentError(
        absl::StrCat(where, ".demand: missing"));
  }
  ASSIGN_OR_RETURN(std::vector<double> values,
                   GetNumbers(rec["demand"], absl::StrCat(where, ".demand")));
  for (double v : values) {
    if (!(v >= 0) || !std::isfinite(v)) {
      return absl::InvalidArgumentError(
          absl::StrCat(where, ".demand: entries must be finite and >= 0"));
    }
  }
  absl::StatusOr<RdpCurve> demand = RdpCurve::FromValues(grid, values);
  if (!demand.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat(where, ".demand: ", demand.status().message()));
  }
  t.demand = *std::move(demand);
  return t;
}

// Truncated discrete Gaussian: round a continuous sample, reject outside
// [lo, hi]. A zero deviation returns the rounded mean.
int64_t DiscreteGaussian(std::mt19937_64& rng, double mean, double stddev,
                         int64_t lo, int64_t hi) {
  if (stddev == 0) return std::llround(mean);
  std::normal_distribution<double> normal(mean, stddev);
  while (true) {
    const int64_t x = std::llround(normal(rng));
    if (x >= lo && x <= hi) return x;
  }
}

template <typename T, size_t N>
const T& Pick(std::mt19937_64& rng, const T (&menu)[N]) {
  std::uniform_int_distribution<size_t> dist(0, N - 1);
  return menu[dist(rng)];
}

std::vector<double> Geometric(double lo, double hi, int points) {
  std::vector<double> out;
  if (points <= 1) return {lo};
  for (int i = 0; i < points; ++i) {
    out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1)));
  }
  return out;
}

absl::StatusOr<RdpCurve> ComposedGaussian(double sigma, int steps,
                                          const GridPtr& grid) {
  ASSIGN_OR_RETURN(RdpCurve c, GaussianCurve(sigma, grid));
  return c.Scaled(static_cast<double>(steps));
}

// Shape of a trace mechanism before rescaling; parameters drawn from a small
// per-family menu.
absl::StatusOr<std::pair<std::string, RdpCurve>> MechanismShape(
    std::string_view family, std::mt19937_64& rng, const GridPtr& grid) {
  if (family == "laplace") {
    const double b = Pick(rng, {0.5, 1.0, 2.0, 5.0});
    ASSIGN_OR_RETURN(RdpCurve c, LaplaceCurve(b, grid));
    return std::make_pair(absl::StrFormat("laplace(b=%g)", b), std::move(c));
  }
  if (family == "gaussian") {
    const double s = Pick(rng, {0.5, 1.0, 2.0, 5.0});
    ASSIGN_OR_RETURN(RdpCurve c, GaussianCurve(s, grid));
    return std::make_pair(absl::StrFormat("gaussian(sigma=%g)", s),
                          std::move(c));
  }
  if (family == "subsampled_laplace") {
    const double b = Pick(rng, {0.5, 1.0, 2.0});
    const double q = Pick(rng, {0.01, 0.1});
    const int steps = Pick(rng, {10, 100});
    ASSIGN_OR_RETURN(RdpCurve c, SubsampledLaplaceCurve(b, q, steps, grid));
    return std::make_pair(
        absl::StrFormat("subsampled_laplace(b=%g,q=%g,steps=%d)", b, q, steps),
        std::move(c));
  }
  if (family == "composed_subsampled_gaussian") {
    const double s = Pick(rng, {0.7, 1.0, 1.5});
    const double q = Pick(rng, {0.001, 0.01});
    const int steps = Pick(rng, {1000, 10000});
    ASSIGN_OR_RETURN(RdpCurve c, SubsampledGaussianCurve(s, q, steps, grid));
    return std::make_pair(
        absl::StrFormat("subsampled_gaussian(sigma=%g,q=%g,steps=%d)", s, q,
                        steps),
        std::move(c));
  }
  if (family == "composed_gaussian") {
    const double s = Pick(rng, {2.0, 5.0, 10.0});
    const int steps = Pick(rng, {10, 100});
    ASSIGN_OR_RETURN(RdpCurve c, ComposedGaussian(s, steps, grid));
    return std::make_pair(
        absl::StrFormat("composed_gaussian(sigma=%g,steps=%d)", s, steps),
        std::move(c));
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown mechanism family ", std::string(family)));
}

std::vector<Tick> PoissonArrivals(std::mt19937_64& rng, double rate,
                                  Tick duration) {
  std::vector<Tick> out;
  if (!(rate > 0)) return out;
  std::exponential_distribution<double> gap(rate);
  double t = gap(rng);
  while (t < static_cast<double>(duration)) {
    out.push_back(static_cast<Tick>(std::floor(t)));
    t += gap(rng);
  }
  return out;
}

}  // namespace

absl::StatusOr<Workload> ParseWorkload(std::string_view text) {
  json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    return absl::InvalidArgumentError("workload: not a JSON object");
  }
  RETURN_IF_ERROR(CheckKeys(doc, "workload", {"grid", "tasks"}));
  if (!doc.contains("grid")) {
    return absl::InvalidArgumentError("workload.grid: missing");
  }
  ASSIGN_OR_RETURN(std::vector<double> orders,
                   GetNumbers(doc["grid"], "workload.grid"));
  Workload w;
  absl::StatusOr<GridPtr> grid = AlphaGrid::Create(std::move(orders));
  if (!grid.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat("workload.grid: ", grid.status().message()));
  }
  w.grid = *grid;
  if (!doc.contains("tasks") || !doc["tasks"].is_array()) {
    return absl::InvalidArgumentError("workload.tasks: expected an array");
  }
  const json& tasks = doc["tasks"];
  for (size_t i = 0; i < tasks.size(); ++i) {
    ASSIGN_OR_RETURN(TaskTemplate t,
                     ParseTask(tasks[i], w.grid,
                               absl::StrFormat("workload.tasks[%d]", i)));
    w.tasks.push_back(std::move(t));
  }
  return w;
}

absl::StatusOr<Workload> LoadWorkload(const std::filesystem::path& path) {
  ASSIGN_OR_RETURN(std::string text, ReadFile(path));
  return ParseWorkload(text);
}

std::string SerializeWorkload(const Workload& workload) {
  json doc;
  GridPtr grid = workload.grid != nullptr ? workload.grid : AlphaGrid::Default();
  doc["grid"] = std::vector<double>(grid->orders().begin(),
                                    grid->orders().end());
  doc["tasks"] = json::array();
  for (const TaskTemplate& t : workload.tasks) {
    json rec;
    rec["id"] = t.id;
    rec["arrival"] = t.arrival;
    rec["weight"] = t.weight;
    if (t.timeout != kNoTimeout) rec["timeout"] = t.timeout;
    rec["mechanism"] = t.mechanism;
    if (t.blocks.uses_ids()) {
      rec["blocks"]["ids"] = t.blocks.ids;
    } else {
      rec["blocks"]["most_recent"] = t.blocks.most_recent;
    }
    rec["demand"] = std::vector<double>(t.demand.values().begin(),
                                        t.demand.values().end());
    doc["tasks"].push_back(std::move(rec));
  }
  return doc.dump(1) + "\n";
}

absl::StatusOr<std::vector<size_t>> BucketOrders(
    const GridPtr& grid, const DpGuarantee& reference) {
  ASSIGN_OR_RETURN(RdpCurve capacity, BlockCapacityCurve(reference, grid));
  std::vector<size_t> out;
  for (size_t a = 0; a < capacity.size(); ++a) {
    if (capacity[a] > 0) out.push_back(a);
  }
  if (out.empty()) {
    return absl::FailedPreconditionError(
        "reference budget leaves no usable order on this grid");
  }
  return out;
}

absl::StatusOr<std::vector<CorpusCurve>> BuildCurveCorpus(
    const GridPtr& grid, const CorpusOptions& options) {
  if (options.points_per_axis < 2) {
    return absl::InvalidArgumentError("points_per_axis must be >= 2");
  }
  ASSIGN_OR_RETURN(RdpCurve capacity,
                   BlockCapacityCurve(options.reference, grid));
  ASSIGN_OR_RETURN(std::vector<size_t> buckets,
                   BucketOrders(grid, options.reference));
  const int p = options.points_per_axis;

  std::vector<NamedCurve> raw;
  auto add = [&](std::string name, absl::StatusOr<RdpCurve> c) -> absl::Status {
    RETURN_IF_ERROR(c.status());
    raw.push_back({std::move(name), *std::move(c)});
    return absl::OkStatus();
  };
  for (double b : Geometric(0.05, 20.0, 4 * p)) {
    RETURN_IF_ERROR(
        add(absl::StrFormat("laplace(b=%.4g)", b), LaplaceCurve(b, grid)));
  }
  for (double s : Geometric(0.5, 20.0, p)) {
    RETURN_IF_ERROR(add(absl::StrFormat("gaussian(sigma=%.4g)", s),
                        GaussianCurve(s, grid)));
  }
  for (double s : Geometric(0.6, 4.0, p)) {
    for (double q : {0.001, 0.003, 0.01, 0.03, 0.1, 0.3}) {
      for (int steps : {10, 100, 1000, 10000}) {
        RETURN_IF_ERROR(add(
            absl::StrFormat("subsampled_gaussian(sigma=%.4g,q=%g,steps=%d)", s,
                            q, steps),
            SubsampledGaussianCurve(s, q, steps, grid)));
      }
    }
  }
  for (double b : Geometric(0.1, 5.0, p)) {
    for (double q : {0.01, 0.1, 0.5}) {
      for (int steps : {1, 10, 100}) {
        RETURN_IF_ERROR(add(
            absl::StrFormat("subsampled_laplace(b=%.4g,q=%g,steps=%d)", b, q,
                            steps),
            SubsampledLaplaceCurve(b, q, steps, grid)));
      }
    }
  }
  for (double b : Geometric(0.1, 10.0, p)) {
    for (double s : Geometric(0.5, 10.0, p / 2 + 1)) {
      ASSIGN_OR_RETURN(RdpCurve lap, LaplaceCurve(b, grid));
      ASSIGN_OR_RETURN(RdpCurve gau, GaussianCurve(s, grid));
      RETURN_IF_ERROR(
          add(absl::StrFormat("laplace_gaussian(b=%.4g,sigma=%.4g)", b, s),
              lap + gau));
    }
  }

  std::vector<CorpusCurve> corpus;
  std::set<std::vector<double>> seen;
  for (NamedCurve& nc : raw) {
    bool finite = true;
    for (double v : nc.curve.values()) finite = finite && std::isfinite(v);
    if (!finite) continue;
    absl::StatusOr<NormalizedDemand> n = NormalizeDemand(nc.curve, capacity);
    if (!n.ok() || n->min_fraction < options.outlier_floor) continue;
    std::vector<double> key(nc.curve.values().begin(),
                            nc.curve.values().end());
    if (!seen.insert(std::move(key)).second) continue;
    corpus.push_back(
        {std::move(nc.name), nc.curve, n->best_alpha_index, n->min_fraction});
  }
  for (size_t a : buckets) {
    const bool covered =
        std::any_of(corpus.begin(), corpus.end(),
                    [&](const CorpusCurve& c) { return c.best_alpha_index == a; });
    if (!covered) {
      return absl::FailedPreconditionError(absl::StrFormat(
          "curve corpus has no curve with best alpha %g", (*grid)[a]));
    }
  }
  return corpus;
}

absl::Status ValidateKnobs(const MicrobenchKnobs& k) {
  if (k.task_count < 0) {
    return absl::InvalidArgumentError("task_count must be >= 0");
  }
  if (k.block_count < 1) {
    return absl::InvalidArgumentError("block_count must be >= 1");
  }
  if (!(k.sigma_blocks >= 0) || !(k.sigma_alpha >= 0)) {
    return absl::InvalidArgumentError("sigma_blocks and sigma_alpha must be >= 0");
  }
  if (!(k.mu_blocks >= 1)) {
    return absl::InvalidArgumentError("mu_blocks must be >= 1");
  }
  if (k.sigma_blocks == 0 && std::llround(k.mu_blocks) > k.block_count) {
    return absl::InvalidArgumentError(
        "mu_blocks exceeds block_count with sigma_blocks = 0");
  }
  if (!(k.eps_min > 0) || !std::isfinite(k.eps_min)) {
    return absl::InvalidArgumentError("eps_min must be positive");
  }
  return absl::OkStatus();
}

absl::StatusOr<RdpCurve> RescaleToEpsMin(const RdpCurve& curve,
                                         const RdpCurve& reference_capacity,
                                         double eps_min, RescaleMode mode) {
  ASSIGN_OR_RETURN(NormalizedDemand before,
                   NormalizeDemand(curve, reference_capacity));
  if (!(before.min_fraction > 0)) {
    return absl::FailedPreconditionError("curve has a zero minimum");
  }
  RdpCurve out = curve.Scaled(eps_min / before.min_fraction);
  if (mode == RescaleMode::kShift) {
    // Shift in normalized space; orders the reference budget cannot use keep
    // the scaled value.
    const double shift = eps_min - before.min_fraction;
    for (size_t a = 0; a < out.size(); ++a) {
      const double c = reference_capacity[a];
      if (c > 0) out[a] = std::max(0.0, (curve[a] / c + shift) * c);
    }
  }
  ASSIGN_OR_RETURN(NormalizedDemand after,
                   NormalizeDemand(out, reference_capacity));
  if (after.best_alpha_index != before.best_alpha_index ||
      std::abs(after.min_fraction - eps_min) > 1e-6) {
    return absl::FailedPreconditionError("rescaled curve failed re-verification");
  }
  return out;
}

absl::StatusOr<Workload> GenerateMicrobenchmark(
    const MicrobenchKnobs& knobs, const std::vector<CorpusCurve>& corpus) {
  RETURN_IF_ERROR(ValidateKnobs(knobs));
  if (corpus.empty()) {
    return absl::InvalidArgumentError("empty curve corpus");
  }
  Workload w;
  w.grid = corpus.front().curve.grid();
  ASSIGN_OR_RETURN(RdpCurve capacity,
                   BlockCapacityCurve(kReferenceBudget, w.grid));
  ASSIGN_OR_RETURN(std::vector<size_t> buckets,
                   BucketOrders(w.grid, kReferenceBudget));
  std::vector<std::vector<size_t>> members(buckets.size());
  for (size_t i = 0; i < corpus.size(); ++i) {
    if (!SameGrid(corpus[i].curve.grid(), w.grid)) {
      return absl::InvalidArgumentError("corpus curves use different grids");
    }
    auto it = std::find(buckets.begin(), buckets.end(),
                        corpus[i].best_alpha_index);
    if (it != buckets.end()) members[it - buckets.begin()].push_back(i);
  }
  // Center on the order-5 bucket, or the middle one if the grid lacks it.
  size_t center = buckets.size() / 2;
  for (size_t b = 0; b < buckets.size(); ++b) {
    if ((*w.grid)[buckets[b]] == 5.0) center = b;
  }

  std::mt19937_64 rng(knobs.seed);
  std::vector<BlockId> ids(knobs.block_count);
  for (TaskId id = 0; id < knobs.task_count; ++id) {
    TaskTemplate t;
    t.id = id;
    const int64_t n = DiscreteGaussian(rng, knobs.mu_blocks,
                                       knobs.sigma_blocks, 1, knobs.block_count);
    std::iota(ids.begin(), ids.end(), 0);
    for (int64_t k = 0; k < n; ++k) {
      std::uniform_int_distribution<int64_t> pick(k, knobs.block_count - 1);
      std::swap(ids[k], ids[pick(rng)]);
    }
    t.blocks.ids.assign(ids.begin(), ids.begin() + n);
    std::sort(t.blocks.ids.begin(), t.blocks.ids.end());

    bool done = false;
    for (int attempt = 0; attempt < 1000 && !done; ++attempt) {
      const int64_t b =
          DiscreteGaussian(rng, static_cast<double>(center), knobs.sigma_alpha,
                           0, static_cast<int64_t>(buckets.size()) - 1);
      if (members[b].empty()) {
        return absl::FailedPreconditionError(absl::StrFormat(
            "no corpus curve in the best-alpha %g bucket",
            (*w.grid)[buckets[b]]));
      }
      std::uniform_int_distribution<size_t> pick(0, members[b].size() - 1);
      const CorpusCurve& c = corpus[members[b][pick(rng)]];
      absl::StatusOr<RdpCurve> scaled =
          RescaleToEpsMin(c.curve, capacity, knobs.eps_min, knobs.rescale);
      if (!scaled.ok()) continue;
      t.demand = *std::move(scaled);
      t.mechanism = c.name;
      done = true;
    }
    if (!done) {
      return absl::InternalError("could not draw a valid curve in 1000 tries");
    }
    w.tasks.push_back(std::move(t));
  }
  return w;
}

absl::StatusOr<std::vector<TraceRecord>> ParseTraceCsv(std::string_view text) {
  std::vector<TraceRecord> out;
  bool header = false;
  int64_t index = 0;
  for (absl::string_view line :
       absl::StrSplit(absl::string_view(text.data(), text.size()), '\n')) {
    line = absl::StripAsciiWhitespace(line);
    if (line.empty()) continue;
    if (!header) {
      if (line != "timestamp,machine_class,memory_gb_hours,network_bytes") {
        return absl::InvalidArgumentError(
            "trace: expected header "
            "timestamp,machine_class,memory_gb_hours,network_bytes");
      }
      header = true;
      continue;
    }
    std::vector<absl::string_view> f = absl::StrSplit(line, ',');
    for (absl::string_view& s : f) s = absl::StripAsciiWhitespace(s);
    const std::string where = absl::StrCat("trace record ", index);
    if (f.size() != 4 || std::any_of(f.begin(), f.end(), [](auto s) {
          return s.empty();
        })) {
      return absl::InvalidArgumentError(
          absl::StrCat(where, ": expected 4 non-empty fields"));
    }
    TraceRecord r;
    if (!absl::SimpleAtoi(f[0], &r.timestamp) || r.timestamp < 0) {
      return absl::InvalidArgumentError(absl::StrCat(where, ": bad timestamp"));
    }
    if (f[1] == "cpu") {
      r.machine = MachineClass::kCpu;
    } else if (f[1] == "gpu") {
      r.machine = MachineClass::kGpu;
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat(where, ": machine_class must be cpu or gpu"));
    }
    if (!absl::SimpleAtod(f[2], &r.memory_gb_hours) || r.memory_gb_hours < 0 ||
        !absl::SimpleAtod(f[3], &r.network_bytes) || r.network_bytes < 0) {
      return absl::InvalidArgumentError(
          absl::StrCat(where, ": bad memory_gb_hours or network_bytes"));
    }
    out.push_back(r);
    ++index;
  }
  if (!header) return absl::InvalidArgumentError("trace: missing header");
  return out;
}

std::string SerializeTraceCsv(const std::vector<TraceRecord>& records) {
  std::string out = "timestamp,machine_class,memory_gb_hours,network_bytes\n";
  for (const TraceRecord& r : records) {
    absl::StrAppendFormat(&out, "%d,%s,%.17g,%.17g\n", r.timestamp,
                          r.machine == MachineClass::kGpu ? "gpu" : "cpu",
                          r.memory_gb_hours, r.network_bytes);
  }
  return out;
}

absl::Status ValidateTraceParams(const TraceMappingParams& p) {
  if (!(p.eps_slope > 0) || !(p.blocks_slope > 0)) {
    return absl::InvalidArgumentError("affine slopes must be positive");
  }
  if (!(p.eps_floor > 0) || !(p.eps_floor <= p.eps_cap)) {
    return absl::InvalidArgumentError("need 0 < eps_floor <= eps_cap");
  }
  if (p.max_blocks < 1) {
    return absl::InvalidArgumentError("max_blocks must be >= 1");
  }
  if (p.window_end >= 0 && p.window_end <= p.window_start) {
    return absl::InvalidArgumentError("window_end must exceed window_start");
  }
  if (p.timeout <= 0) {
    return absl::InvalidArgumentError("timeout must be positive");
  }
  return absl::OkStatus();
}

absl::StatusOr<Workload> MapTrace(const std::vector<TraceRecord>& records,
                                  const TraceMappingParams& params,
                                  const GridPtr& grid, uint64_t seed) {
  RETURN_IF_ERROR(ValidateTraceParams(params));
  ASSIGN_OR_RETURN(RdpCurve capacity, BlockCapacityCurve(kReferenceBudget, grid));
  Workload w;
  w.grid = grid;
  std::mt19937_64 rng(seed);
  TaskId next_id = 0;
  for (const TraceRecord& r : records) {
    // Draws happen for every record so that the window and the truncation
    // bounds do not shift the random stream of later records.
    const char* family = r.machine == MachineClass::kGpu
                             ? Pick(rng, kGpuMechanisms)
                             : Pick(rng, kCpuMechanisms);
    ASSIGN_OR_RETURN(auto shape, MechanismShape(family, rng, grid));
    if (r.timestamp < params.window_start ||
        (params.window_end >= 0 && r.timestamp >= params.window_end)) {
      continue;
    }
    const double eps =
        params.eps_slope * r.memory_gb_hours + params.eps_intercept;
    const double raw_blocks =
        std::ceil(params.blocks_slope * r.network_bytes + params.blocks_intercept);
    const int64_t blocks =
        raw_blocks < 1 ? 1 : static_cast<int64_t>(std::min(raw_blocks, 1e18));
    if (eps < params.eps_floor || eps > params.eps_cap ||
        blocks > params.max_blocks) {
      continue;
    }
    TaskTemplate t;
    t.id = next_id++;
    t.arrival = r.timestamp - params.window_start;
    t.timeout = params.timeout;
    t.mechanism = absl::StrCat(family, ":", shape.first);
    t.blocks.most_recent = blocks;
    ASSIGN_OR_RETURN(t.demand, RescaleToEpsMin(shape.second, capacity, eps,
                                               RescaleMode::kScale));
    w.tasks.push_back(std::move(t));
  }
  return w;
}

std::vector<TraceRecord> GenerateSyntheticTrace(
    const SyntheticTraceOptions& options, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> gap(
      options.arrival_rate > 0 ? options.arrival_rate : 1.0);
  std::bernoulli_distribution gpu(options.gpu_fraction);
  std::lognormal_distribution<double> memory(options.memory_log_mean,
                                             options.memory_log_std);
  std::lognormal_distribution<double> network(options.network_log_mean,
                                              options.network_log_std);
  std::vector<TraceRecord> out;
  double t = 0;
  for (int64_t i = 0; i < options.record_count; ++i) {
    t += gap(rng);
    TraceRecord r;
    r.timestamp = static_cast<Tick>(std::floor(t));
    r.machine = gpu(rng) ? MachineClass::kGpu : MachineClass::kCpu;
    r.memory_gb_hours = memory(rng);
    r.network_bytes = network(rng);
    out.push_back(r);
  }
  return out;
}

absl::StatusOr<Workload> GenerateWeightedTwoCategory(
    const TwoCategoryParams& params, const GridPtr& grid, uint64_t seed) {
  if (params.large_templates < 0 || params.small_templates < 0 ||
      params.large_templates + params.small_templates == 0) {
    return absl::InvalidArgumentError("need at least one task template");
  }
  if (params.large_blocks < 1 || params.small_blocks < 1) {
    return absl::InvalidArgumentError("block requests must be >= 1");
  }
  ASSIGN_OR_RETURN(RdpCurve capacity, BlockCapacityCurve(kReferenceBudget, grid));
  std::mt19937_64 rng(seed);

  std::vector<TaskTemplate> templates;
  for (int i = 0; i < params.large_templates + params.small_templates; ++i) {
    const bool large = i < params.large_templates;
    TaskTemplate t;
    std::pair<std::string, RdpCurve> shape;
    double eps;
    if (large) {
      ASSIGN_OR_RETURN(shape,
                       MechanismShape("composed_subsampled_gaussian", rng, grid));
      eps = std::uniform_real_distribution<double>(0.05, 0.2)(rng);
      t.weight = Pick(rng, kLargeWeights);
      t.blocks.most_recent = params.large_blocks;
      t.mechanism = absl::StrCat("large:", shape.first);
    } else {
      ASSIGN_OR_RETURN(shape, MechanismShape("laplace", rng, grid));
      eps = std::uniform_real_distribution<double>(0.005, 0.05)(rng);
      t.weight = Pick(rng, kSmallWeights);
      t.blocks.most_recent = params.small_blocks;
      t.mechanism = absl::StrCat("small:", shape.first);
    }
    ASSIGN_OR_RETURN(t.demand, RescaleToEpsMin(shape.second, capacity, eps,
                                               RescaleMode::kScale));
    t.timeout = params.timeout;
    templates.push_back(std::move(t));
  }

  Workload w;
  w.grid = grid;
  std::uniform_int_distribution<size_t> which(0, templates.size() - 1);
  TaskId next_id = 0;
  for (Tick arrival : PoissonArrivals(rng, params.arrival_rate, params.duration)) {
    TaskTemplate t = templates[which(rng)];
    t.id = next_id++;
    t.arrival = arrival;
    w.tasks.push_back(std::move(t));
  }
  return w;
}

}  // namespace privpack
