// Copyright (c) 2026, The primdraw Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "primdraw/canvas.hpp"
#include "primdraw/scoring.hpp"

namespace primdraw {

inline constexpr int kTrajectoryVersion = 1;

/// Malformed or incompatible trajectory data.
class TrajectoryError : public InputError {
 public:
  using InputError::InputError;
};

struct PrimitiveState {
  int id = 0;
  PrimitiveKind kind = PrimitiveKind::Line;
  Eigen::Matrix2Xd points;
  double opacity = 0.0;
  bool pruned = false;
};

/// State of the whole canvas at one iteration, before that iteration's step.
/// `primitives` holds live and pruned primitives ordered by id; `mask` is
/// aligned with it (pruned entries are always false).
struct SnapshotRecord {
  int iter = 0;
  int num_iter = 0;
  LossBreakdown loss;
  double lr = 0.0;
  std::vector<bool> mask;
  std::vector<PrimitiveState> primitives;
  int width = 224;
  int height = 224;
  double stroke_width = 1.5;

  bool is_final() const { return iter == num_iter; }
};

/// `live_mask` is aligned with canvas.primitives; empty means all active.
SnapshotRecord make_record(const Canvas& canvas, const std::vector<bool>& live_mask, int iter,
                           int num_iter, const LossBreakdown& loss, double lr,
                           double stroke_width);

/// Unpruned primitives of a record, ordered by id.
std::vector<Primitive> live_primitives(const SnapshotRecord& record);

/// One compact JSON object, no trailing newline.
std::string to_json_line(const SnapshotRecord& record);
SnapshotRecord from_json_line(const std::string& line);

/// Appends one line per record and flushes, so an interrupted run leaves every
/// completed record readable.
class TrajectoryWriter {
 public:
  explicit TrajectoryWriter(const std::filesystem::path& path);
  void append(const SnapshotRecord& record);

 private:
  std::filesystem::path path_;
  std::ofstream os_;
};

struct LoadedTrajectory {
  std::vector<SnapshotRecord> records;
  std::vector<std::string> warnings;
  bool complete = false;  // ends with the final-iteration record
};

/// Reads a log. A cut-off last line or a missing final record are reported as
/// warnings; any other malformed content or a version mismatch throws.
LoadedTrajectory read_trajectory(const std::filesystem::path& path);

}  // namespace primdraw
