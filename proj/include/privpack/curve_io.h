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

#ifndef PRIVPACK_CURVE_IO_H_
#define PRIVPACK_CURVE_IO_H_

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "privpack/rdp.h"

namespace privpack {

struct NamedCurve {
  std::string name;
  RdpCurve curve;
};

// Tabulated curve file:
//   {"curves": [{"name": "...", "orders": [...], "epsilons": [...]}, ...]}
// Every record's orders must equal `grid` exactly.
absl::StatusOr<std::vector<NamedCurve>> ParseCurveFile(std::string_view text,
                                                       const GridPtr& grid);
absl::StatusOr<std::vector<NamedCurve>> LoadCurveFile(
    const std::filesystem::path& path, const GridPtr& grid);
std::string SerializeCurveFile(std::span<const NamedCurve> curves);

}  // namespace privpack

#endif  // PRIVPACK_CURVE_IO_H_
