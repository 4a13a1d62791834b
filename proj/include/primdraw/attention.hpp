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

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "primdraw/geometry.hpp"
#include "primdraw/image.hpp"

namespace primdraw {

/// Saliency distribution over canvas pixels (rows = height). Values are
/// non-negative and, once normalized, sum to one.
struct AttentionMap {
  Eigen::MatrixXd values;

  int width() const { return static_cast<int>(values.cols()); }
  int height() const { return static_cast<int>(values.rows()); }
};

/// k distinct canvas positions, each with the saliency it was drawn with.
struct LandmarkSet {
  std::vector<Point2> points;  // (x = column, y = row)
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

/// Bilinear resize with half-pixel centres (align_corners = false).
Eigen::MatrixXd resize_bilinear(const Eigen::MatrixXd& src, int out_height, int out_width);

/// Softmax over every entry of `logits` (temperature 1).
Eigen::MatrixXd softmax(const Eigen::MatrixXd& logits);

/// Resizes each raw cross-attention map to the canvas, sums them and applies a
/// softmax over all pixels.
AttentionMap aggregate(const std::vector<Eigen::MatrixXd>& raw_maps, CanvasSize canvas = {});

/// Draws k pixels without replacement, each draw proportional to the map value
/// among the pixels not yet chosen.
LandmarkSet sample_landmarks(const AttentionMap& map, int k, Rng& rng);

/// Raw (unnormalized) matrix from a grayscale PNG or an ATTN float file.
Eigen::MatrixXd read_raw_map(const std::string& path);

/// Writes the ATTN format: "ATTN", u32 height, u32 width, row-major float32,
/// all little-endian.
void write_attn_file(const Eigen::MatrixXd& values, const std::string& path);

/// Reads a map file, clamps to >= 0, resizes to the canvas and softmax-normalizes.
AttentionMap load_map_from_file(const std::string& path, CanvasSize canvas = {});

/// Everything an attention source hands to canvas initialization.
struct AttentionResult {
  std::vector<Eigen::MatrixXd> raw_maps;
  Raster reference;  // I0, at canvas resolution
};

/// Source of token-conditioned cross-attention maps and the matching
/// reference image. Implementations are called from one worker at a time.
class AttentionProvider {
 public:
  virtual ~AttentionProvider() = default;
  virtual std::string name() const = 0;
  virtual AttentionResult attend(const std::string& prompt, const std::string& focus_token,
                                 std::uint64_t seed) = 0;
};

/// Offline stand-in for the reference image when none is supplied: the
/// saliency drawn as ink (1 - value / max) on white.
Raster reference_from_map(const Eigen::MatrixXd& raw, CanvasSize canvas);

/// Constant attention everywhere.
class UniformAttentionProvider : public AttentionProvider {
 public:
  explicit UniformAttentionProvider(CanvasSize canvas = {},
                                    std::optional<std::string> reference_path = std::nullopt);
  std::string name() const override { return "uniform"; }
  AttentionResult attend(const std::string& prompt, const std::string& focus_token,
                         std::uint64_t seed) override;

 private:
  CanvasSize canvas_;
  std::optional<std::string> reference_path_;
};

/// Attention read from a file (PNG or ATTN).
class FileAttentionProvider : public AttentionProvider {
 public:
  FileAttentionProvider(std::string map_path, CanvasSize canvas = {},
                        std::optional<std::string> reference_path = std::nullopt);
  std::string name() const override { return "file:" + map_path_; }
  AttentionResult attend(const std::string& prompt, const std::string& focus_token,
                         std::uint64_t seed) override;

 private:
  std::string map_path_;
  CanvasSize canvas_;
  std::optional<std::string> reference_path_;
};

}  // namespace primdraw
