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

#include "primdraw/render.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "primdraw/svg.hpp"

namespace primdraw {

void RenderSettings::validate() const {
  if (width <= 0 || height <= 0) throw DomainError("render size must be positive");
  if (!(stroke_width > 0.0)) throw DomainError("stroke width must be positive");
  if (!(aa_half_width > 0.0)) throw DomainError("anti-aliasing half-width must be positive");
  if (curve_samples < 1) throw DomainError("curve_samples must be at least 1");
}

namespace {

struct Nearest {
  double d2 = std::numeric_limits<double>::infinity();
  int segment = 0;
  double t = 0.0;
  Point2 foot = Point2::Zero();
};

Nearest nearest_on_polyline(const std::vector<Point2>& v, const Point2& q) {
  Nearest best;
  if (v.size() == 1) {
    best.d2 = (q - v[0]).squaredNorm();
    best.foot = v[0];
    return best;
  }
  for (std::size_t s = 0; s + 1 < v.size(); ++s) {
    const Point2 ab = v[s + 1] - v[s];
    const double len2 = ab.squaredNorm();
    const double t = len2 > 0.0 ? std::clamp((q - v[s]).dot(ab) / len2, 0.0, 1.0) : 0.0;
    const Point2 p = v[s] + t * ab;
    const double d2 = (q - p).squaredNorm();
    if (d2 < best.d2) {
      best = {d2, static_cast<int>(s), t, p};
    }
  }
  return best;
}

// One pixel touched by a stroke.
struct Touch {
  Eigen::Index pixel;
  double coverage;
  double dcov_dd;  // d coverage / d distance
  int segment;
  double t;
  Point2 dir;  // d distance / d foot point, zero at the centreline
};

struct Footprint {
  Outline outline;
  std::vector<Touch> touches;
};

// Quintic smootherstep and its derivative on [0, 1].
double smooth(double z) { return z * z * z * (z * (6.0 * z - 15.0) + 10.0); }
double smooth_deriv(double z) { return 30.0 * z * z * (1.0 - z) * (1.0 - z); }

Footprint footprint(const Primitive& prim, const RenderSettings& s) {
  Footprint f;
  f.outline = sample_outline(prim, s.curve_samples);
  const auto& v = f.outline.vertices;
  const double h = s.aa_half_width;
  const double reach = 0.5 * s.stroke_width + h;

  double x0 = v[0].x(), x1 = x0, y0 = v[0].y(), y1 = y0;
  for (const auto& p : v) {
    x0 = std::min(x0, p.x());
    x1 = std::max(x1, p.x());
    y0 = std::min(y0, p.y());
    y1 = std::max(y1, p.y());
  }
  const int px0 = std::max(0, static_cast<int>(std::floor(x0 - reach - 0.5)));
  const int px1 = std::min(s.width - 1, static_cast<int>(std::ceil(x1 + reach - 0.5)));
  const int py0 = std::max(0, static_cast<int>(std::floor(y0 - reach - 0.5)));
  const int py1 = std::min(s.height - 1, static_cast<int>(std::ceil(y1 + reach - 0.5)));

  for (int y = py0; y <= py1; ++y) {
    for (int x = px0; x <= px1; ++x) {
      const Point2 q(x + 0.5, y + 0.5);
      const Nearest n = nearest_on_polyline(v, q);
      const double d = std::sqrt(n.d2);
      if (d >= reach) continue;
      const double z = (reach - d) / (2.0 * h);
      Touch t;
      t.pixel = static_cast<Eigen::Index>(y) * s.width + x;
      t.segment = n.segment;
      t.t = n.t;
      if (z >= 1.0) {
        t.coverage = 1.0;
        t.dcov_dd = 0.0;
      } else {
        t.coverage = smooth(z);
        t.dcov_dd = -smooth_deriv(z) / (2.0 * h);
      }
      t.dir = d > 0.0 ? Point2((n.foot - q) / d) : Point2::Zero();
      f.touches.push_back(t);
    }
  }
  return f;
}

Raster to_raster(const Eigen::VectorXd& transmittance, const RenderSettings& s) {
  Raster out(s.width, s.height, 1.0);
  for (int c = 0; c < Raster::kChannels; ++c) out.channel(c) = transmittance;
  return out;
}

}  // namespace

Raster SoftRasterizer::render(std::span<const Primitive> prims, const RenderSettings& settings) {
  settings.validate();
  Eigen::VectorXd trans = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(settings.width) *
                                                settings.height);
  for (const auto& prim : prims) {
    if (prim.opacity == 0.0) continue;
    for (const auto& t : footprint(prim, settings).touches) {
      trans(t.pixel) *= 1.0 - prim.opacity * t.coverage;
    }
  }
  return to_raster(trans, settings);
}

std::vector<Eigen::VectorXd> SoftRasterizer::gradient(std::span<const Primitive> prims,
                                                      const RenderSettings& settings,
                                                      const Raster& pixel_grad) {
  settings.validate();
  if (pixel_grad.width() != settings.width || pixel_grad.height() != settings.height) {
    throw DomainError("pixel gradient size does not match render settings");
  }
  constexpr double kZero = 1e-12;
  const Eigen::Index n = static_cast<Eigen::Index>(settings.width) * settings.height;

  std::vector<Footprint> fps;
  fps.reserve(prims.size());
  for (const auto& prim : prims) fps.push_back(footprint(prim, settings));

  // Every pixel is the product of (1 - u_i); the partial for one factor is the
  // product of the others, tracked as (product of non-zero factors, zero count).
  Eigen::VectorXd prod = Eigen::VectorXd::Ones(n);
  Eigen::VectorXi zeros = Eigen::VectorXi::Zero(n);
  for (std::size_t i = 0; i < prims.size(); ++i) {
    for (const auto& t : fps[i].touches) {
      const double f = 1.0 - prims[i].opacity * t.coverage;
      if (std::abs(f) < kZero) {
        ++zeros(t.pixel);
      } else {
        prod(t.pixel) *= f;
      }
    }
  }
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
  for (int c = 0; c < Raster::kChannels; ++c) g += pixel_grad.channel(c);

  std::vector<Eigen::VectorXd> out;
  out.reserve(prims.size());
  for (std::size_t i = 0; i < prims.size(); ++i) {
    const Primitive& prim = prims[i];
    const Footprint& fp = fps[i];
    const double alpha = prim.opacity;
    std::vector<Point2> vgrad(fp.outline.vertices.size(), Point2::Zero());
    double dalpha = 0.0;
    for (const auto& t : fp.touches) {
      const double f = 1.0 - alpha * t.coverage;
      double others;
      if (std::abs(f) < kZero) {
        others = zeros(t.pixel) == 1 ? prod(t.pixel) : 0.0;
      } else {
        others = zeros(t.pixel) > 0 ? 0.0 : prod(t.pixel) / f;
      }
      const double dl_du = -g(t.pixel) * others;
      if (dl_du == 0.0) continue;
      dalpha += dl_du * t.coverage;
      const double dl_dd = dl_du * alpha * t.dcov_dd;
      if (dl_dd == 0.0) continue;
      if (fp.outline.vertices.size() == 1) {
        vgrad[0] += dl_dd * t.dir;
      } else {
        vgrad[t.segment] += (1.0 - t.t) * dl_dd * t.dir;
        vgrad[t.segment + 1] += t.t * dl_dd * t.dir;
      }
    }
    const int m = static_cast<int>(prim.points.size());
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(m + 1);
    for (std::size_t k = 0; k < vgrad.size(); ++k) {
      grad.head(m) += fp.outline.jacobians[k].leftCols(m).transpose() * vgrad[k];
    }
    grad(m) = dalpha;
    out.push_back(std::move(grad));
  }
  return out;
}

Raster ReferenceRasterizer::render(std::span<const Primitive> prims,
                                   const RenderSettings& settings) {
  settings.validate();
  const int ss = supersample_;
  const double r = 0.5 * settings.stroke_width;
  Eigen::VectorXd trans = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(settings.width) *
                                                settings.height);
  for (const auto& prim : prims) {
    const auto v = sample_polyline(prim.kind(), prim.points, settings.curve_samples);
    double x0 = v[0].x(), x1 = x0, y0 = v[0].y(), y1 = y0;
    for (const auto& p : v) {
      x0 = std::min(x0, p.x());
      x1 = std::max(x1, p.x());
      y0 = std::min(y0, p.y());
      y1 = std::max(y1, p.y());
    }
    const int px0 = std::max(0, static_cast<int>(std::floor(x0 - r)) - 1);
    const int px1 = std::min(settings.width - 1, static_cast<int>(std::ceil(x1 + r)) + 1);
    const int py0 = std::max(0, static_cast<int>(std::floor(y0 - r)) - 1);
    const int py1 = std::min(settings.height - 1, static_cast<int>(std::ceil(y1 + r)) + 1);
    for (int y = py0; y <= py1; ++y) {
      for (int x = px0; x <= px1; ++x) {
        int inside = 0;
        for (int sy = 0; sy < ss; ++sy) {
          for (int sx = 0; sx < ss; ++sx) {
            const Point2 q(x + (sx + 0.5) / ss, y + (sy + 0.5) / ss);
            if (nearest_on_polyline(v, q).d2 <= r * r) ++inside;
          }
        }
        const double cov = static_cast<double>(inside) / (ss * ss);
        trans(static_cast<Eigen::Index>(y) * settings.width + x) *= 1.0 - prim.opacity * cov;
      }
    }
  }
  return to_raster(trans, settings);
}

std::vector<Eigen::VectorXd> ReferenceRasterizer::gradient(std::span<const Primitive>,
                                                           const RenderSettings&, const Raster&) {
  throw BackendError("the reference rasterizer is not differentiable");
}

std::unique_ptr<RasterizerBackend> make_rasterizer(const std::string& name) {
  if (name == "soft") return std::make_unique<SoftRasterizer>();
  if (name == "reference") return std::make_unique<ReferenceRasterizer>();
  throw DomainError("unknown rasterizer '" + name + "' (expected soft or reference)");
}

std::vector<Primitive> active_primitives(const Canvas& canvas, const std::vector<bool>& mask) {
  if (mask.empty()) return canvas.primitives;
  if (mask.size() != canvas.primitives.size()) {
    throw DomainError("mask length " + std::to_string(mask.size()) + " does not match " +
                      std::to_string(canvas.primitives.size()) + " live primitives");
  }
  std::vector<Primitive> out;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) out.push_back(canvas.primitives[i]);
  }
  return out;
}

Raster rasterize(const Canvas& canvas, const std::vector<bool>& mask, RasterizerBackend& backend,
                 const RenderSettings& settings) {
  return backend.render(active_primitives(canvas, mask), settings);
}

GradCheckResult grad_check(RasterizerBackend& backend, std::vector<Primitive> prims,
                           const RenderSettings& settings, const PixelObjective& objective,
                           double coord_step, double opacity_step) {
  Raster pixel_grad;
  objective(backend.render(prims, settings), &pixel_grad);
  const auto grads = backend.gradient(prims, settings, pixel_grad);

  Eigen::Index total = 0;
  for (const auto& p : prims) total += p.points.size() + 1;
  GradCheckResult res;
  res.analytic.resize(total);
  res.numeric.resize(total);

  Eigen::Index k = 0;
  for (std::size_t i = 0; i < prims.size(); ++i) {
    const Eigen::VectorXd base = prims[i].params();
    for (Eigen::Index j = 0; j < base.size(); ++j, ++k) {
      const double h = j + 1 == base.size() ? opacity_step : coord_step;
      Eigen::VectorXd p = base;
      p(j) = base(j) + h;
      prims[i].set_params(p);
      const double up = objective(backend.render(prims, settings), nullptr);
      p(j) = base(j) - h;
      prims[i].set_params(p);
      const double down = objective(backend.render(prims, settings), nullptr);
      prims[i].set_params(base);
      res.numeric(k) = (up - down) / (2.0 * h);
      res.analytic(k) = grads[i](j);
    }
  }
  const double floor = 1e-8 + 1e-3 * (total > 0 ? res.numeric.cwiseAbs().maxCoeff() : 0.0);
  for (Eigen::Index e = 0; e < total; ++e) {
    const double a = res.analytic(e), f = res.numeric(e);
    const double denom = std::max({std::abs(a), std::abs(f), floor});
    res.max_rel_error = std::max(res.max_rel_error, std::abs(a - f) / denom);
  }
  return res;
}

std::string_view layer_color(PrimitiveKind kind) {
  switch (kind) {
    case PrimitiveKind::Circle: return "blue";
    case PrimitiveKind::Line: return "red";
    case PrimitiveKind::SemiCircle: return "green";
  }
  return "black";
}

namespace {

std::string document(std::span<const Primitive> prims, const RenderSettings& settings,
                     const std::function<bool(PrimitiveKind)>& keep, bool colored) {
  std::vector<SvgElement> elements;
  for (const auto& p : prims) {
    if (!keep(p.kind())) continue;
    SvgElement e;
    e.d = svg_path(p);
    e.stroke = colored ? std::string(layer_color(p.kind())) : "black";
    e.opacity = p.opacity;
    e.id = p.id();
    e.kind = p.kind();
    elements.push_back(std::move(e));
  }
  return svg_document(elements, {settings.width, settings.height, settings.stroke_width});
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot write " + path.string());
  os << text;
  if (!os) throw InputError("failed writing " + path.string());
}

}  // namespace

std::string export_svg(std::span<const Primitive> prims, const RenderSettings& settings) {
  return document(prims, settings, [](PrimitiveKind) { return true; }, false);
}

std::filesystem::path export_layers(std::span<const Primitive> prims,
                                    const RenderSettings& settings,
                                    const std::filesystem::path& out_dir, int iter) {
  const auto dir = out_dir / "layers" / ("iter_" + std::to_string(iter));
  std::filesystem::create_directories(dir);
  auto only = [](PrimitiveKind k) { return [k](PrimitiveKind x) { return x == k; }; };
  auto all = [](PrimitiveKind) { return true; };
  write_text(dir / "composite.svg", document(prims, settings, all, false));
  write_text(dir / "circles.svg", document(prims, settings, only(PrimitiveKind::Circle), true));
  write_text(dir / "lines.svg", document(prims, settings, only(PrimitiveKind::Line), true));
  write_text(dir / "semicircles.svg",
             document(prims, settings, only(PrimitiveKind::SemiCircle), true));
  write_text(dir / "overlay.svg", document(prims, settings, all, true));
  return dir;
}

}  // namespace primdraw
