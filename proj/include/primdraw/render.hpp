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
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "primdraw/canvas.hpp"
#include "primdraw/image.hpp"

namespace primdraw {

struct RenderSettings {
  int width = 224;
  int height = 224;
  double stroke_width = 1.5;
  double aa_half_width = 0.5;  // half-width of the coverage ramp, in pixels
  int curve_samples = 16;      // polyline vertices per cubic segment

  void validate() const;
};

/// Renders black strokes on a white background, composited source-over in the
/// order given.
class RasterizerBackend {
 public:
  virtual ~RasterizerBackend() = default;
  virtual std::string name() const = 0;
  virtual Raster render(std::span<const Primitive> prims, const RenderSettings& settings) = 0;
  /// d L / d params for every primitive (layout of Primitive::params), given
  /// d L / d pixel. Throws if the backend is not differentiable.
  virtual std::vector<Eigen::VectorXd> gradient(std::span<const Primitive> prims,
                                                const RenderSettings& settings,
                                                const Raster& pixel_grad) = 0;
};

/// Distance-field stroke rasterizer with a smooth, compactly supported
/// coverage ramp. Curves are flattened to polylines; gradients are exact for
/// the flattened geometry.
class SoftRasterizer : public RasterizerBackend {
 public:
  std::string name() const override { return "soft"; }
  Raster render(std::span<const Primitive> prims, const RenderSettings& settings) override;
  std::vector<Eigen::VectorXd> gradient(std::span<const Primitive> prims,
                                        const RenderSettings& settings,
                                        const Raster& pixel_grad) override;
};

/// Hard-edged supersampled rasterizer. Not differentiable.
class ReferenceRasterizer : public RasterizerBackend {
 public:
  explicit ReferenceRasterizer(int supersample = 8) : supersample_(supersample) {}
  std::string name() const override { return "reference"; }
  Raster render(std::span<const Primitive> prims, const RenderSettings& settings) override;
  std::vector<Eigen::VectorXd> gradient(std::span<const Primitive> prims,
                                        const RenderSettings& settings,
                                        const Raster& pixel_grad) override;

 private:
  int supersample_;
};

std::unique_ptr<RasterizerBackend> make_rasterizer(const std::string& name);

/// Live primitives whose mask entry is true (all when the mask is empty).
std::vector<Primitive> active_primitives(const Canvas& canvas, const std::vector<bool>& mask);

Raster rasterize(const Canvas& canvas, const std::vector<bool>& mask, RasterizerBackend& backend,
                 const RenderSettings& settings);

/// Scalar loss over a raster; fills `grad` with d loss / d pixel when non-null.
using PixelObjective = std::function<double(const Raster&, Raster*)>;

struct GradCheckResult {
  Eigen::VectorXd analytic;
  Eigen::VectorXd numeric;
  double max_rel_error = 0.0;
};

/// Compares backend gradients to central differences over every parameter.
/// The relative error of one entry is |a - f| / max(|a|, |f|, floor), where the
/// floor is 1e-8 + 1e-3 * max |f|, so entries that are zero to rounding do not
/// dominate.
GradCheckResult grad_check(RasterizerBackend& backend, std::vector<Primitive> prims,
                           const RenderSettings& settings, const PixelObjective& objective,
                           double coord_step = 1e-2, double opacity_step = 1e-3);

std::string_view layer_color(PrimitiveKind kind);

/// One path per primitive: black stroke, no fill, stroke-opacity = opacity.
std::string export_svg(std::span<const Primitive> prims, const RenderSettings& settings);

inline constexpr std::array<std::string_view, 5> kLayerNames = {
    "composite", "circles", "lines", "semicircles", "overlay"};

/// Writes <out_dir>/layers/iter_<iter>/{composite,circles,lines,semicircles,overlay}.svg
/// and returns the directory.
std::filesystem::path export_layers(std::span<const Primitive> prims,
                                    const RenderSettings& settings,
                                    const std::filesystem::path& out_dir, int iter);

}  // namespace primdraw
