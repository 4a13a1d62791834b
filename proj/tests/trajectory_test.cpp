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

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "primdraw/trajectory.hpp"
#include "test_util.hpp"

namespace primdraw {
namespace {

Canvas pruned_canvas() {
  Canvas c = testing::target_canvas();
  c.primitives[2].opacity = 0.01;
  c.pruned.push_back(c.primitives[2]);
  c.primitives.erase(c.primitives.begin() + 2);
  return c;
}

std::vector<SnapshotRecord> sample_log() {
  const Canvas c = pruned_canvas();
  std::vector<bool> mask(c.primitives.size(), true);
  mask[4] = false;
  return {make_record(c, mask, 0, 200, {-1.0, -2.0, -3.0}, 1.0, 1.5),
          make_record(c, mask, 100, 200, {-1.5, -2.5, -3.5}, 0.4, 1.5),
          make_record(c, {}, 200, 200, {-2.0, -3.0, -4.0}, 0.1, 1.5)};
}

std::filesystem::path write_log(const std::string& name, const std::vector<SnapshotRecord>& log) {
  const auto path = testing::scratch_dir(name) / "trajectory.jsonl";
  TrajectoryWriter w(path);
  for (const auto& r : log) w.append(r);
  return path;
}

TEST(MakeRecord, SortedByIdWithAlignedMask) {
  const SnapshotRecord r = sample_log()[0];
  ASSERT_EQ(r.primitives.size(), 9u);
  ASSERT_EQ(r.mask.size(), 9u);
  for (std::size_t i = 0; i < 9; ++i) EXPECT_EQ(r.primitives[i].id, static_cast<int>(i));
  EXPECT_TRUE(r.primitives[2].pruned);
  EXPECT_FALSE(r.mask[2]);
  // Live index 4 is primitive id 5 once id 2 is pruned.
  EXPECT_FALSE(r.mask[5]);
  EXPECT_EQ(std::count(r.mask.begin(), r.mask.end(), true), 7);
  EXPECT_EQ(live_primitives(r).size(), 8u);
}

TEST(JsonLine, RoundTripIsExact) {
  for (const auto& r : sample_log()) {
    const std::string line = to_json_line(r);
    EXPECT_EQ(line.find('\n'), std::string::npos);
    const SnapshotRecord back = from_json_line(line);
    EXPECT_EQ(to_json_line(back), line);
    EXPECT_EQ(back.mask, r.mask);
    for (std::size_t i = 0; i < r.primitives.size(); ++i) {
      EXPECT_EQ(back.primitives[i].points, r.primitives[i].points);
      EXPECT_EQ(back.primitives[i].opacity, r.primitives[i].opacity);
    }
  }
}

TEST(JsonLine, RejectsBadRecords) {
  const std::string good = to_json_line(sample_log()[0]);
  std::string v2 = good;
  v2.replace(v2.find("\"v\":1"), 5, "\"v\":2");
  try {
    from_json_line(v2);
    FAIL();
  } catch (const TrajectoryError& e) {
    EXPECT_NE(std::string(e.what()).find("version 2"), std::string::npos);
  }
  EXPECT_THROW(from_json_line("{}"), TrajectoryError);
  EXPECT_THROW(from_json_line("[1,2]"), TrajectoryError);
  EXPECT_THROW(from_json_line(good.substr(0, good.size() / 2)), TrajectoryError);
}

TEST(ReadTrajectory, CompleteLog) {
  const auto path = write_log("traj_ok", sample_log());
  const LoadedTrajectory t = read_trajectory(path);
  EXPECT_TRUE(t.complete);
  EXPECT_TRUE(t.warnings.empty());
  ASSERT_EQ(t.records.size(), 3u);
  EXPECT_TRUE(t.records.back().is_final());
}

TEST(ReadTrajectory, TruncatedLastLineIsAWarning) {
  const auto path = write_log("traj_cut", sample_log());
  std::string text = testing::slurp(path);
  text.resize(text.size() - 40);
  testing::spit(path, text);
  const LoadedTrajectory t = read_trajectory(path);
  EXPECT_FALSE(t.complete);
  EXPECT_EQ(t.records.size(), 2u);
  EXPECT_FALSE(t.warnings.empty());
}

TEST(ReadTrajectory, MissingFinalRecordIsAWarning) {
  auto log = sample_log();
  log.pop_back();
  const LoadedTrajectory t = read_trajectory(write_log("traj_nofinal", log));
  EXPECT_FALSE(t.complete);
  EXPECT_EQ(t.records.size(), 2u);
  EXPECT_FALSE(t.warnings.empty());
}

TEST(ReadTrajectory, TamperedMiddleLineThrows) {
  const auto path = write_log("traj_tamper", sample_log());
  std::string text = testing::slurp(path);
  const auto second = text.find('\n') + 1;
  text.insert(second + 5, "garbage");
  testing::spit(path, text);
  EXPECT_THROW(read_trajectory(path), TrajectoryError);
}

TEST(ReadTrajectory, OutOfOrderRecordsThrow) {
  auto log = sample_log();
  std::swap(log[0], log[1]);
  EXPECT_THROW(read_trajectory(write_log("traj_order", log)), TrajectoryError);
  EXPECT_THROW(read_trajectory(testing::scratch_dir("traj_missing") / "none.jsonl"), TrajectoryError);
}

}  // namespace
}  // namespace primdraw
