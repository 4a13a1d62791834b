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

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/SparseCore>

#include "primdraw/image.hpp"

namespace primdraw {

struct AugmentConfig {
  int M = 4;                           // augmented views per evaluation
  double perspective_distortion = 0.5;
  double crop_scale_lo = 0.7;
  double crop_scale_hi = 0.9;
  double crop_ratio_lo = 3.0 / 4.0;
  double crop_ratio_hi = 4.0 / 3.0;
  double fill = 1.0;                   // value sampled outside the source image
  std::uint64_t seed = 0;

  void validate() const;
};

/// Four corner correspondences: the source corners move to `end`.
struct PerspectiveParams {
  std::array<Point2, 4> start;
  std::array<Point2, 4> end;

  bool is_identity() const { return start == end; }
};

/// Crop window in source pixels, resized back to the full image.
struct CropParams {
  int top = 0;
  int left = 0;
  int height = 0;
  int width = 0;
};

/// One augmentation as an affine map on pixels: out = S * in + f * fill, per
/// channel, with S a bilinear sampling matrix. Gradients pull back through S^T.
class Warp {
 public:
  static Warp identity(int width, int height);
  static Warp compose(int width, int height, const PerspectiveParams& perspective,
                      const CropParams& crop, double fill);

  Raster apply(const Raster& in) const;
  /// Gradient with respect to the input given the gradient of the output.
  Raster pullback(const Raster& grad_out) const;

  bool is_identity() const { return identity_; }

 private:
  int width_ = 0;
  int height_ = 0;
  bool identity_ = true;
  double fill_ = 1.0;
  Eigen::SparseMatrix<double, Eigen::RowMajor> sampler_;
  Eigen::VectorXd fill_weight_;
};

/// 3x3 homography taking each `from[i]` onto `to[i]`.
Eigen::Matrix3d homography(const std::array<Point2, 4>& from, const std::array<Point2, 4>& to);

PerspectiveParams sample_perspective(int width, int height, double distortion, Rng& rng);
CropParams sample_crop(int width, int height, const AugmentConfig& cfg, Rng& rng);

/// M independent perspective-then-crop warps.
std::vector<Warp> sample_warps(int width, int height, const AugmentConfig& cfg, Rng& rng);

/// M augmented views, each back at the input resolution.
std::vector<Raster> augment(const Raster& raster, const AugmentConfig& cfg, Rng& rng);

}  // namespace primdraw
