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

#include "privpack/task.h"

#include <algorithm>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace privpack {

absl::StatusOr<DemandVector> ResolveDemand(const TaskTemplate& task,
                                           int64_t block_count) {
  std::vector<std::pair<BlockId, RdpCurve>> entries;
  if (!task.blocks.uses_ids()) {
    if (task.blocks.most_recent < 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("task ", task.id, ": negative most_recent"));
    }
    if (block_count == 0) {
      return absl::FailedPreconditionError(
          absl::StrCat("task ", task.id, ": no block has arrived"));
    }
    const int64_t m = std::min(task.blocks.most_recent, block_count);
    for (BlockId b = block_count - m; b < block_count; ++b) {
      entries.push_back({b, task.demand});
    }
  } else {
    if (task.blocks.ids.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("task ", task.id, ": requests no block"));
    }
    for (BlockId b : task.blocks.ids) {
      if (b < 0) {
        return absl::InvalidArgumentError(
            absl::StrCat("task ", task.id, ": negative block id ", b));
      }
      if (b >= block_count) {
        return absl::FailedPreconditionError(
            absl::StrCat("task ", task.id, ": block ", b, " has not arrived"));
      }
      entries.push_back({b, task.demand});
    }
  }
  return DemandVector::Create(std::move(entries));
}

}  // namespace privpack
