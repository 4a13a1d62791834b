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

#include "primdraw/augment.hpp"

#include <algorithm>
#include <cmath>

namespace primdraw {

void AugmentConfig::validate() const {
  if (M < 1) throw DomainError("augmentation count M must be at least 1");
  if (!(crop_scale_lo > 0.0 && crop_scale_lo <= crop_scale_hi && crop_scale_hi <= 1.0)) {
    throw DomainError("crop scale must satisfy 0 < lo <= hi <= 1");
  }
  if (!(crop_ratio_lo > 0.0 && crop_ratio_lo <= crop_ratio_hi)) {
    throw DomainError("crop aspect ratio range is invalid");
  }
  if (!(perspective_distortion >= 0.0 && perspective_distortion <= 1.0)) {
    throw DomainError("perspective distortion must lie in [0, 1]");
  }
}

Eigen::Matrix3d homography(const std::array<Point2, 4>& from, const std::array<Point2, 4>& to) {
  Eigen::Matrix<double, 8, 8> a;
  Eigen::Matrix<double, 8, 1> b;
  for (int i = 0; i < 4; ++i) {
    const double u = from[i].x(), v = from[i].y(), x = to[i].x(), y = to[i].y();
    a.row(2 * i) << u, v, 1, 0, 0, 0, -u * x, -v * x;
    a.row(2 * i + 1) << 0, 0, 0, u, v, 1, -u * y, -v * y;
    b(2 * i) = x;
    b(2 * i + 1) = y;
  }
  const Eigen::Matrix<double, 8, 1> h = a.fullPivLu().solve(b);
  Eigen::Matrix3d m;
  m << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), 1.0;
  return m;
}

Warp Warp::identity(int width, int height) {
  Warp w;
  w.width_ = width;
  w.height_ = height;
  return w;
}

Warp Warp::compose(int width, int height, const PerspectiveParams& perspective,
                   const CropParams& crop, double fill) {
  const bool full_crop =
      crop.top == 0 && crop.left == 0 && crop.width == width && crop.height == height;
  if (perspective.is_identity() && full_crop) return identity(width, height);

  Warp w;
  w.width_ = width;
  w.height_ = height;
  w.identity_ = false;
  w.fill_ = fill;

  // Output pixels sample the perspective output, which in turn samples the
  // source through the homography taking the moved corners back home.
  const bool warp = !perspective.is_identity();
  const Eigen::Matrix3d g = warp ? homography(perspective.end, perspective.start)
                                 : Eigen::Matrix3d::Identity();

  const Eigen::Index n = static_cast<Eigen::Index>(width) * height;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(4 * n));
  w.fill_weight_ = Eigen::VectorXd::Zero(n);

  const double sx_scale = static_cast<double>(crop.width) / width;
  const double sy_scale = static_cast<double>(crop.height) / height;
  for (int oy = 0; oy < height; ++oy) {
    const double ly = std::clamp((oy + 0.5) * sy_scale - 0.5, 0.0, crop.height - 1.0);
    for (int ox = 0; ox < width; ++ox) {
      const double lx = std::clamp((ox + 0.5) * sx_scale - 0.5, 0.0, crop.width - 1.0);
      double x = crop.left + lx;
      double y = crop.top + ly;
      if (warp) {
        const Eigen::Vector3d s = g * Eigen::Vector3d(x, y, 1.0);
        x = s.x() / s.z();
        y = s.y() / s.z();
      }
      const Eigen::Index row = static_cast<Eigen::Index>(oy) * width + ox;
      const double fx0 = std::floor(x), fy0 = std::floor(y);
      const double ax = x - fx0, ay = y - fy0;
      const int x0 = static_cast<int>(fx0), y0 = static_cast<int>(fy0);
      const double wts[4] = {(1 - ax) * (1 - ay), ax * (1 - ay), (1 - ax) * ay, ax * ay};
      const int xs[4] = {x0, x0 + 1, x0, x0 + 1};
      const int ys[4] = {y0, y0, y0 + 1, y0 + 1};
      for (int k = 0; k < 4; ++k) {
        if (wts[k] == 0.0) continue;
        if (xs[k] < 0 || ys[k] < 0 || xs[k] >= width || ys[k] >= height) {
          w.fill_weight_(row) += wts[k];
        } else {
          triplets.emplace_back(row, static_cast<Eigen::Index>(ys[k]) * width + xs[k], wts[k]);
        }
      }
    }
  }
  w.sampler_.resize(n, n);
  w.sampler_.setFromTriplets(triplets.begin(), triplets.end());
  return w;
}

Raster Warp::apply(const Raster& in) const {
  if (in.width() != width_ || in.height() != height_) throw DomainError("warp/raster size mismatch");
  if (identity_) return in;
  Raster out(width_, height_, 0.0);
  for (int c = 0; c < Raster::kChannels; ++c) {
    out.channel(c) = sampler_ * in.channel(c) + fill_weight_ * fill_;
  }
  return out;
}

Raster Warp::pullback(const Raster& grad_out) const {
  if (identity_) return grad_out;
  Raster g(width_, height_, 0.0);
  for (int c = 0; c < Raster::kChannels; ++c) {
    g.channel(c) = sampler_.transpose() * grad_out.channel(c);
  }
  return g;
}

namespace {

// Uniform integer in [lo, hi).
int randint(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi - 1)(rng);
}

}  // namespace

PerspectiveParams sample_perspective(int width, int height, double distortion, Rng& rng) {
  const int dw = static_cast<int>(distortion * (width / 2));
  const int dh = static_cast<int>(distortion * (height / 2));
  PerspectiveParams p;
  p.start = {Point2(0, 0), Point2(width - 1, 0), Point2(width - 1, height - 1),
             Point2(0, height - 1)};
  const int tlx = randint(rng, 0, dw + 1), tly = randint(rng, 0, dh + 1);
  const int trx = randint(rng, width - dw - 1, width), try_ = randint(rng, 0, dh + 1);
  const int brx = randint(rng, width - dw - 1, width), bry = randint(rng, height - dh - 1, height);
  const int blx = randint(rng, 0, dw + 1), bly = randint(rng, height - dh - 1, height);
  p.end = {Point2(tlx, tly), Point2(trx, try_), Point2(brx, bry), Point2(blx, bly)};
  return p;
}

CropParams sample_crop(int width, int height, const AugmentConfig& cfg, Rng& rng) {
  const double area = static_cast<double>(width) * height;
  std::uniform_real_distribution<double> scale(cfg.crop_scale_lo, cfg.crop_scale_hi);
  std::uniform_real_distribution<double> log_ratio(std::log(cfg.crop_ratio_lo),
                                                   std::log(cfg.crop_ratio_hi));
  for (int attempt = 0; attempt < 10; ++attempt) {
    const double target = area * scale(rng);
    const double ratio = std::exp(log_ratio(rng));
    const int w = static_cast<int>(std::lround(std::sqrt(target * ratio)));
    const int h = static_cast<int>(std::lround(std::sqrt(target / ratio)));
    if (w > 0 && w <= width && h > 0 && h <= height) {
      const int top = randint(rng, 0, height - h + 1);
      const int left = randint(rng, 0, width - w + 1);
      return {top, left, h, w};
    }
  }
  // Fallback: centred crop with the aspect ratio clamped into range.
  const double in_ratio = static_cast<double>(width) / height;
  int w = width, h = height;
  if (in_ratio < cfg.crop_ratio_lo) {
    h = static_cast<int>(std::lround(w / cfg.crop_ratio_lo));
  } else if (in_ratio > cfg.crop_ratio_hi) {
    w = static_cast<int>(std::lround(h * cfg.crop_ratio_hi));
  }
  return {(height - h) / 2, (width - w) / 2, h, w};
}

std::vector<Warp> sample_warps(int width, int height, const AugmentConfig& cfg, Rng& rng) {
  cfg.validate();
  std::vector<Warp> out;
  out.reserve(static_cast<std::size_t>(cfg.M));
  for (int i = 0; i < cfg.M; ++i) {
    const PerspectiveParams p = sample_perspective(width, height, cfg.perspective_distortion, rng);
    const CropParams c = sample_crop(width, height, cfg, rng);
    out.push_back(Warp::compose(width, height, p, c, cfg.fill));
  }
  return out;
}

std::vector<Raster> augment(const Raster& raster, const AugmentConfig& cfg, Rng& rng) {
  std::vector<Raster> views;
  for (const auto& w : sample_warps(raster.width(), raster.height(), cfg, rng)) {
    views.push_back(w.apply(raster));
  }
  return views;
}

}  // namespace primdraw
