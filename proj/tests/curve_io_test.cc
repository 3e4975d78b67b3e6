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

#include <filesystem>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "gtest/gtest.h"
#include "privpack/file_util.h"
#include "test_util.h"

namespace privpack {
namespace {

using privpack_test::Curve;
using privpack_test::MakeGrid;

TEST(CurveFileTest, RoundTrip) {
  const GridPtr grid = AlphaGrid::Default();
  std::vector<NamedCurve> curves;
  curves.push_back({"gauss", *GaussianCurve(1.7, grid)});
  curves.push_back({"lap", *LaplaceCurve(0.3, grid)});
  curves.push_back({"sub", *SubsampledGaussianCurve(0.9, 0.01, 1000, grid)});
  const std::string text = SerializeCurveFile(curves);
  auto parsed = ParseCurveFile(text, grid);
  ASSERT_TRUE(parsed.ok()) << parsed.status();
  ASSERT_EQ(parsed->size(), 3u);
  for (size_t i = 0; i < 3; ++i) {
    EXPECT_EQ((*parsed)[i].name, curves[i].name);
    EXPECT_EQ((*parsed)[i].curve, curves[i].curve);
  }
  EXPECT_EQ(SerializeCurveFile(*parsed), text);
}

TEST(CurveFileTest, GridMismatchFails) {
  const GridPtr grid = MakeGrid({2, 4});
  const std::vector<NamedCurve> curves = {{"c", Curve(grid, {1, 2})}};
  const std::string text = SerializeCurveFile(curves);
  auto other = ParseCurveFile(text, MakeGrid({2, 8}));
  EXPECT_EQ(other.status().code(), absl::StatusCode::kInvalidArgument);
  EXPECT_NE(std::string(other.status().message()).find("grid"),
            std::string::npos);
  EXPECT_FALSE(ParseCurveFile(text, MakeGrid({2, 4, 8})).ok());
}

TEST(CurveFileTest, MalformedInput) {
  const GridPtr grid = MakeGrid({2});
  EXPECT_FALSE(ParseCurveFile("", grid).ok());
  EXPECT_FALSE(ParseCurveFile("{\"curves\": 3}", grid).ok());
  EXPECT_FALSE(
      ParseCurveFile(R"({"curves": [{"name": "x", "orders": [2]}]})", grid)
          .ok());
  EXPECT_FALSE(ParseCurveFile(
                   R"({"curves": [{"name": "x", "orders": [2], "epsilons": [-1]}]})",
                   grid)
                   .ok());
  auto ok = ParseCurveFile(
      R"({"curves": [{"name": "x", "orders": [2], "epsilons": [0.5]}]})", grid);
  ASSERT_TRUE(ok.ok());
  EXPECT_DOUBLE_EQ((*ok)[0].curve[0], 0.5);
}

TEST(CurveFileTest, LoadFromDisk) {
  const GridPtr grid = MakeGrid({2, 3});
  const auto path =
      std::filesystem::path(testing::TempDir()) / "privpack_curves.json";
  const std::vector<NamedCurve> curves = {{"c", Curve(grid, {0.25, 0.5})}};
  ASSERT_TRUE(WriteFileAtomic(path, SerializeCurveFile(curves)).ok());
  auto loaded = LoadCurveFile(path, grid);
  ASSERT_TRUE(loaded.ok());
  EXPECT_EQ((*loaded)[0].curve, curves[0].curve);
  EXPECT_EQ(LoadCurveFile(path.string() + ".missing", grid).status().code(),
            absl::StatusCode::kNotFound);
}

}  // namespace
}  // namespace privpack
