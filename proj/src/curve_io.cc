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

#include "privpack/curve_io.h"

#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "json.hpp"
#include "privpack/file_util.h"
#include "privpack/status_macros.h"

namespace privpack {

using json = nlohmann::json;

absl::StatusOr<std::vector<NamedCurve>> ParseCurveFile(std::string_view text,
                                                       const GridPtr& grid) {
  json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("curves") ||
      !doc["curves"].is_array()) {
    return absl::InvalidArgumentError(
        "curve file must be an object with a 'curves' array");
  }
  std::vector<NamedCurve> out;
  const json& records = doc["curves"];
  for (size_t i = 0; i < records.size(); ++i) {
    const json& rec = records[i];
    const std::string where = absl::StrFormat("curves[%d]", i);
    if (!rec.is_object() || !rec.contains("name") || !rec["name"].is_string() ||
        !rec.contains("orders") || !rec["orders"].is_array() ||
        !rec.contains("epsilons") || !rec["epsilons"].is_array()) {
      return absl::InvalidArgumentError(
          absl::StrCat(where, ": expected name, orders and epsilons"));
    }
    std::vector<double> orders;
    std::vector<double> values;
    for (const json& v : rec["orders"]) {
      if (!v.is_number()) {
        return absl::InvalidArgumentError(
            absl::StrCat(where, ".orders: non-numeric entry"));
      }
      orders.push_back(v.get<double>());
    }
    for (const json& v : rec["epsilons"]) {
      if (!v.is_number() || v.get<double>() < 0) {
        return absl::InvalidArgumentError(
            absl::StrCat(where, ".epsilons: entries must be numbers >= 0"));
      }
      values.push_back(v.get<double>());
    }
    if (orders.size() != grid->size() ||
        !std::equal(orders.begin(), orders.end(), grid->orders().begin())) {
      return absl::InvalidArgumentError(absl::StrCat(
          where, ": orders do not match the experiment's alpha grid"));
    }
    auto curve = RdpCurve::FromValues(grid, std::move(values));
    if (!curve.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat(where, ": ", curve.status().message()));
    }
    out.push_back({rec["name"].get<std::string>(), *std::move(curve)});
  }
  return out;
}

absl::StatusOr<std::vector<NamedCurve>> LoadCurveFile(
    const std::filesystem::path& path, const GridPtr& grid) {
  ASSIGN_OR_RETURN(std::string text, ReadFile(path));
  return ParseCurveFile(text, grid);
}

std::string SerializeCurveFile(std::span<const NamedCurve> curves) {
  json records = json::array();
  for (const NamedCurve& c : curves) {
    records.push_back({{"name", c.name},
                       {"orders", std::vector<double>(c.curve.grid()->orders().begin(),
                                                      c.curve.grid()->orders().end())},
                       {"epsilons", std::vector<double>(c.curve.values().begin(),
                                                        c.curve.values().end())}});
  }
  return json{{"curves", records}}.dump(2) + "\n";
}

}  // namespace privpack
