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

#include "primdraw/trajectory.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace primdraw {

using json = nlohmann::ordered_json;

SnapshotRecord make_record(const Canvas& canvas, const std::vector<bool>& live_mask, int iter,
                           int num_iter, const LossBreakdown& loss, double lr,
                           double stroke_width) {
  if (!live_mask.empty() && live_mask.size() != canvas.primitives.size()) {
    throw DomainError("mask length does not match live primitive count");
  }
  SnapshotRecord r;
  r.iter = iter;
  r.num_iter = num_iter;
  r.loss = loss;
  r.lr = lr;
  r.width = canvas.width;
  r.height = canvas.height;
  r.stroke_width = stroke_width;

  std::vector<std::pair<PrimitiveState, bool>> all;
  for (std::size_t i = 0; i < canvas.primitives.size(); ++i) {
    const auto& p = canvas.primitives[i];
    all.push_back({{p.id(), p.kind(), p.points, p.opacity, false},
                   live_mask.empty() || live_mask[i]});
  }
  for (const auto& p : canvas.pruned) {
    all.push_back({{p.id(), p.kind(), p.points, p.opacity, true}, false});
  }
  std::sort(all.begin(), all.end(),
            [](const auto& a, const auto& b) { return a.first.id < b.first.id; });
  for (auto& [state, active] : all) {
    r.primitives.push_back(std::move(state));
    r.mask.push_back(active);
  }
  return r;
}

std::vector<Primitive> live_primitives(const SnapshotRecord& record) {
  std::vector<Primitive> out;
  for (const auto& s : record.primitives) {
    if (!s.pruned) out.emplace_back(s.id, s.kind, s.points, s.opacity);
  }
  return out;
}

std::string to_json_line(const SnapshotRecord& r) {
  json j;
  j["v"] = kTrajectoryVersion;
  j["iter"] = r.iter;
  j["num_iter"] = r.num_iter;
  j["loss_sem"] = r.loss.sem;
  j["loss_vis"] = r.loss.vis;
  j["loss_total"] = r.loss.total;
  j["lr"] = r.lr;
  j["width"] = r.width;
  j["height"] = r.height;
  j["stroke_width"] = r.stroke_width;
  j["mask"] = json::array();
  for (bool b : r.mask) j["mask"].push_back(b);
  j["primitives"] = json::array();
  for (const auto& p : r.primitives) {
    json pts = json::array();
    for (Eigen::Index c = 0; c < p.points.cols(); ++c) {
      pts.push_back({p.points(0, c), p.points(1, c)});
    }
    json e;
    e["id"] = p.id;
    e["kind"] = std::string(to_string(p.kind));
    e["control_points"] = std::move(pts);
    e["opacity"] = p.opacity;
    e["pruned"] = p.pruned;
    j["primitives"].push_back(std::move(e));
  }
  return j.dump();
}

namespace {

template <typename T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw TrajectoryError(std::string("record is missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw TrajectoryError(std::string("record field '") + key + "' has the wrong type");
  }
}

void check_record(const SnapshotRecord& r) {
  if (r.iter < 0 || r.num_iter < 0 || r.iter > r.num_iter) {
    throw TrajectoryError("record iteration " + std::to_string(r.iter) + " is outside [0, " +
                          std::to_string(r.num_iter) + "]");
  }
  if (r.width <= 0 || r.height <= 0 || !(r.stroke_width > 0.0)) {
    throw TrajectoryError("record has invalid canvas geometry");
  }
  if (r.mask.size() != r.primitives.size()) {
    throw TrajectoryError("mask length does not match primitive count");
  }
  std::set<int> ids;
  for (std::size_t i = 0; i < r.primitives.size(); ++i) {
    const auto& p = r.primitives[i];
    if (!ids.insert(p.id).second) throw TrajectoryError("duplicate primitive id " + std::to_string(p.id));
    if (p.points.cols() != control_point_count(p.kind)) {
      throw TrajectoryError("primitive " + std::to_string(p.id) + " has the wrong point count");
    }
    if (!p.points.allFinite() || !(p.opacity >= 0.0 && p.opacity <= 1.0)) {
      throw TrajectoryError("primitive " + std::to_string(p.id) + " has invalid parameters");
    }
    if (p.pruned && r.mask[i]) {
      throw TrajectoryError("pruned primitive " + std::to_string(p.id) + " marked active");
    }
  }
}

}  // namespace

SnapshotRecord from_json_line(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw TrajectoryError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw TrajectoryError("record is not a JSON object");
  const int version = field<int>(j, "v");
  if (version != kTrajectoryVersion) {
    throw TrajectoryError("unsupported trajectory schema version " + std::to_string(version) +
                          " (expected " + std::to_string(kTrajectoryVersion) + ")");
  }
  SnapshotRecord r;
  r.iter = field<int>(j, "iter");
  r.num_iter = field<int>(j, "num_iter");
  r.loss.sem = field<double>(j, "loss_sem");
  r.loss.vis = field<double>(j, "loss_vis");
  r.loss.total = field<double>(j, "loss_total");
  r.lr = field<double>(j, "lr");
  r.width = field<int>(j, "width");
  r.height = field<int>(j, "height");
  r.stroke_width = field<double>(j, "stroke_width");
  r.mask = field<std::vector<bool>>(j, "mask");
  const json prims = field<json>(j, "primitives");
  if (!prims.is_array()) throw TrajectoryError("'primitives' is not an array");
  for (const auto& e : prims) {
    PrimitiveState p;
    p.id = field<int>(e, "id");
    try {
      p.kind = kind_from_string(field<std::string>(e, "kind"));
    } catch (const DomainError& err) {
      throw TrajectoryError(err.what());
    }
    const auto pts = field<std::vector<std::vector<double>>>(e, "control_points");
    p.points.resize(2, static_cast<Eigen::Index>(pts.size()));
    for (std::size_t c = 0; c < pts.size(); ++c) {
      if (pts[c].size() != 2) throw TrajectoryError("control point is not an (x, y) pair");
      p.points(0, static_cast<Eigen::Index>(c)) = pts[c][0];
      p.points(1, static_cast<Eigen::Index>(c)) = pts[c][1];
    }
    p.opacity = field<double>(e, "opacity");
    p.pruned = field<bool>(e, "pruned");
    r.primitives.push_back(std::move(p));
  }
  check_record(r);
  return r;
}

TrajectoryWriter::TrajectoryWriter(const std::filesystem::path& path)
    : path_(path), os_(path, std::ios::binary | std::ios::trunc) {
  if (!os_) throw InputError("cannot open trajectory log " + path.string());
}

void TrajectoryWriter::append(const SnapshotRecord& record) {
  os_ << to_json_line(record) << '\n';
  os_.flush();
  if (!os_) throw InputError("failed writing trajectory log " + path_.string());
}

LoadedTrajectory read_trajectory(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw TrajectoryError("cannot open trajectory log " + path.string());
  std::stringstream buf;
  buf << is.rdbuf();
  const std::string text = buf.str();

  LoadedTrajectory out;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const bool terminated = nl != std::string::npos;
    const std::string line = text.substr(pos, terminated ? nl - pos : std::string::npos);
    pos = terminated ? nl + 1 : text.size();
    ++line_no;
    if (line.empty()) continue;
    try {
      SnapshotRecord r = from_json_line(line);
      if (!out.records.empty()) {
        const auto& prev = out.records.back();
        if (r.num_iter != prev.num_iter || r.iter <= prev.iter) {
          throw TrajectoryError("record is out of sequence");
        }
      }
      out.records.push_back(std::move(r));
    } catch (const TrajectoryError& e) {
      // Only an unterminated final line can come from an interrupted write.
      if (!terminated) {
        out.warnings.push_back("ignoring incomplete last line " + std::to_string(line_no));
        break;
      }
      throw TrajectoryError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (out.records.empty()) throw TrajectoryError(path.string() + " contains no records");
  out.complete = out.records.back().is_final();
  if (!out.complete) {
    const auto& last = out.records.back();
    out.warnings.push_back("log stops at iteration " + std::to_string(last.iter) + " of " +
                           std::to_string(last.num_iter) + "; the run did not finish");
  }
  return out;
}

}  // namespace primdraw
