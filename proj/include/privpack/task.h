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

#ifndef PRIVPACK_TASK_H_
#define PRIVPACK_TASK_H_

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "absl/status/statusor.h"

#include "privpack/block.h"
#include "privpack/rdp.h"

namespace privpack {

using TaskId = int64_t;

inline constexpr Tick kNoTimeout = std::numeric_limits<Tick>::max();

// A scheduling request whose block set has been resolved.
struct Task {
  TaskId id = 0;
  double weight = 1;
  Tick arrival = 0;
  Tick timeout = kNoTimeout;  // evicted once now >= arrival + timeout
  std::string mechanism;
  DemandVector demand;

  bool ExpiredAt(Tick now) const {
    return timeout != kNoTimeout && now - arrival >= timeout;
  }
};

// Which blocks a task asks for. Exactly one form is used: either the
// `most_recent` blocks present at arrival, or an explicit id list.
struct BlockRequest {
  int64_t most_recent = 0;
  std::vector<BlockId> ids;

  bool uses_ids() const { return most_recent == 0; }
};

// A task before block resolution, as stored in workload files. The same
// demand curve applies to every requested block.
struct TaskTemplate {
  TaskId id = 0;
  double weight = 1;
  Tick arrival = 0;
  Tick timeout = kNoTimeout;
  std::string mechanism;
  BlockRequest blocks;
  RdpCurve demand;
};

struct Workload {
  GridPtr grid;
  std::vector<TaskTemplate> tasks;
};

// Resolves `request` against the ids [0, block_count). Fails when the request
// names a block that does not exist yet, or when no block exists at all.
absl::StatusOr<DemandVector> ResolveDemand(const TaskTemplate& task,
                                           int64_t block_count);

}  // namespace privpack

#endif  // PRIVPACK_TASK_H_
