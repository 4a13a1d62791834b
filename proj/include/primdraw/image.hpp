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

#include <string>

#include "primdraw/types.hpp"

namespace primdraw {

/// H x W x 3 image stored row-major, channels interleaved (HWC).
///
/// Rendered sketches hold values in [0, 1] on a white (1.0) background. The
/// same container carries gradients with respect to pixels, which are not
/// range-bounded.
class Raster {
 public:
  static constexpr int kChannels = 3;

  Raster() = default;
  Raster(int width, int height, double fill = 1.0)
      : width_(width), height_(height), data_(Eigen::VectorXd::Constant(size_of(width, height), fill)) {
    if (width <= 0 || height <= 0) throw DomainError("raster dimensions must be positive");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  Eigen::Index pixel_count() const { return static_cast<Eigen::Index>(width_) * height_; }

  double& operator()(int y, int x, int c) { return data_(index(y, x, c)); }
  double operator()(int y, int x, int c) const { return data_(index(y, x, c)); }

  Eigen::VectorXd& data() { return data_; }
  const Eigen::VectorXd& data() const { return data_; }

  /// Strided view of a single channel (length H * W, row-major).
  auto channel(int c) {
    return Eigen::Map<Eigen::VectorXd, 0, Eigen::InnerStride<kChannels>>(data_.data() + c,
                                                                          pixel_count());
  }
  auto channel(int c) const {
    return Eigen::Map<const Eigen::VectorXd, 0, Eigen::InnerStride<kChannels>>(data_.data() + c,
                                                                                pixel_count());
  }

  bool same_shape(const Raster& o) const { return width_ == o.width_ && height_ == o.height_; }

 private:
  static Eigen::Index size_of(int w, int h) {
    return static_cast<Eigen::Index>(w) * h * kChannels;
  }
  Eigen::Index index(int y, int x, int c) const {
    return (static_cast<Eigen::Index>(y) * width_ + x) * kChannels + c;
  }

  int width_ = 0;
  int height_ = 0;
  Eigen::VectorXd data_;
};

/// Writes an 8-bit RGB PNG; values are clamped to [0, 1] and rounded.
void write_png(const Raster& raster, const std::string& path);

/// Reads any PNG as 8-bit RGB scaled to [0, 1].
Raster read_png_rgb(const std::string& path);

/// Reads an 8- or 16-bit grayscale PNG; values scaled to [0, 1], rows = height.
Eigen::MatrixXd read_png_gray(const std::string& path);

}  // namespace primdraw
