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
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "primdraw/types.hpp"

namespace primdraw {

enum class PrimitiveKind { Line, Circle, SemiCircle };

/// Number of on-curve control points carried by each kind.
constexpr int control_point_count(PrimitiveKind kind) {
  switch (kind) {
    case PrimitiveKind::Line: return 2;
    case PrimitiveKind::SemiCircle: return 3;
    case PrimitiveKind::Circle: return 4;
  }
  return 0;
}

/// Length of the optimizable parameter vector: coordinates then opacity.
constexpr int parameter_count(PrimitiveKind kind) { return 2 * control_point_count(kind) + 1; }

/// Largest parameter vector over all kinds (a circle's 8 coordinates).
constexpr int kMaxCoordinates = 8;

std::string_view to_string(PrimitiveKind kind);
PrimitiveKind kind_from_string(std::string_view name);

/// One stroke on the canvas.
///
/// `points` (2 x c, one column per on-curve control point) and `opacity` are
/// the optimized parameters. The initial snapshot is frozen at construction and
/// is what affine recovery measures evolution against.
///
/// Point order: Line (p1, p2); SemiCircle (diameter start, apex, diameter end);
/// Circle (north, east, south, west).
class Primitive {
 public:
  Primitive(int id, PrimitiveKind kind, Eigen::Matrix2Xd points, double opacity);

  /// Rebuilds a primitive whose initial snapshot differs from its current state.
  static Primitive restore(int id, PrimitiveKind kind, Eigen::Matrix2Xd points, double opacity,
                           Eigen::Matrix2Xd initial_points, double initial_opacity);

  int id() const { return id_; }
  PrimitiveKind kind() const { return kind_; }
  const Eigen::Matrix2Xd& initial_points() const { return initial_points_; }
  double initial_opacity() const { return initial_opacity_; }

  /// Flattened [x0, y0, x1, y1, ..., opacity].
  Eigen::VectorXd params() const;
  void set_params(const Eigen::Ref<const Eigen::VectorXd>& p);

  Eigen::Matrix2Xd points;
  double opacity;

 private:
  int id_;
  PrimitiveKind kind_;
  Eigen::Matrix2Xd initial_points_;
  double initial_opacity_;
};

struct CanvasSize {
  int width = 224;
  int height = 224;
};

struct PatchIndex {
  int row = 0;
  int col = 0;
  auto operator<=>(const PatchIndex&) const = default;
};

/// Axis-aligned square tile. `start` is inclusive; `end` is exclusive for
/// pixel membership and the closed bound for geometric containment.
struct Patch {
  int row = 0;
  int col = 0;
  Point2 start = Point2::Zero();
  Point2 end = Point2::Zero();
  int size = 0;

  static Patch at(int row, int col, int size);
  bool contains(const Point2& p, double tol = 0.0) const;
};

/// Patch indices of a canvas point: row from y, col from x.
PatchIndex patch_of(const Point2& p, int patch_size, CanvasSize canvas = {});

Primitive make_line(const Patch& patch, Rng& rng, int id = 0, double opacity = 1.0);
Primitive make_circle(const Patch& patch, Rng& rng, int id = 0, double opacity = 1.0);
Primitive make_semicircle(const Patch& patch, Rng& rng, int id = 0, double opacity = 1.0);

/// Largest radius keeping a circle centred at `center` inside `patch`,
/// following the published branch-per-axis rule.
double max_radius(const Patch& patch, const Point2& center);

Eigen::Matrix2Xd circle_points(const Point2& center, double radius);
Eigen::Matrix2Xd semicircle_points(const Point2& center, double radius, bool upper);

double line_length(const Primitive& line);

// ---------------------------------------------------------------------------
// Curve construction

/// Circular-arc cubic handle constant, 4/3 (sqrt 2 - 1).
inline constexpr double kArcKappa = 0.55228474983079339840;

template <typename Scalar>
struct Cubic {
  Point2T<Scalar> p0, h1, h2, p1;

  Point2T<Scalar> eval(double t) const {
    const double s = 1.0 - t;
    return p0 * Scalar(s * s * s) + h1 * Scalar(3.0 * s * s * t) + h2 * Scalar(3.0 * s * t * t) +
           p1 * Scalar(t * t * t);
  }
};

namespace detail {

template <typename Scalar>
Point2T<Scalar> unit(const Point2T<Scalar>& v) {
  using std::sqrt;
  const Scalar n = sqrt(v.squaredNorm() + Scalar(1e-300));
  return v / n;
}

// Reflects direction `d` across the line with unit direction `u`.
template <typename Scalar>
Point2T<Scalar> reflect(const Point2T<Scalar>& d, const Point2T<Scalar>& u) {
  return u * (Scalar(2) * d.dot(u)) - d;
}

template <typename Scalar>
Scalar handle_length(const Point2T<Scalar>& a, const Point2T<Scalar>& b) {
  using std::sqrt;
  return Scalar(kArcKappa / std::sqrt(2.0)) * sqrt((b - a).squaredNorm() + Scalar(1e-300));
}

}  // namespace detail

/// Cubic segments through the on-curve control points. A line yields one
/// degenerate cubic; circles a closed chain of four; semicircles an open chain
/// of two. Handles follow the quarter-arc construction: tangent directions from
/// neighbouring points, lengths kappa * chord / sqrt(2), which reproduces the
/// standard circle approximation when the points are exact.
template <typename Scalar>
std::vector<Cubic<Scalar>> cubic_chain(PrimitiveKind kind,
                                       const Eigen::Matrix<Scalar, 2, Eigen::Dynamic>& pts) {
  using P = Point2T<Scalar>;
  std::vector<Cubic<Scalar>> out;
  switch (kind) {
    case PrimitiveKind::Line: {
      const P a = pts.col(0), b = pts.col(1);
      out.push_back({a, a + (b - a) / Scalar(3), a + (b - a) * Scalar(2.0 / 3.0), b});
      break;
    }
    case PrimitiveKind::Circle: {
      std::array<P, 4> tangent;
      for (int i = 0; i < 4; ++i) {
        tangent[i] = detail::unit<Scalar>(P(pts.col((i + 1) % 4)) - P(pts.col((i + 3) % 4)));
      }
      for (int i = 0; i < 4; ++i) {
        const P a = pts.col(i), b = pts.col((i + 1) % 4);
        const Scalar len = detail::handle_length<Scalar>(a, b);
        out.push_back({a, a + tangent[i] * len, b - tangent[(i + 1) % 4] * len, b});
      }
      break;
    }
    case PrimitiveKind::SemiCircle: {
      const P a = pts.col(0), apex = pts.col(1), c = pts.col(2);
      const P t_apex = detail::unit<Scalar>(P(c - a));
      const P t_a = detail::reflect<Scalar>(t_apex, detail::unit<Scalar>(P(apex - a)));
      const P t_c = detail::reflect<Scalar>(t_apex, detail::unit<Scalar>(P(c - apex)));
      const Scalar l1 = detail::handle_length<Scalar>(a, apex);
      const Scalar l2 = detail::handle_length<Scalar>(apex, c);
      out.push_back({a, a + t_a * l1, apex - t_apex * l1, apex});
      out.push_back({apex, apex + t_apex * l2, c - t_c * l2, c});
      break;
    }
  }
  return out;
}

/// Polyline approximation of a primitive's stroke centreline together with the
/// Jacobian of every vertex with respect to the primitive's coordinates
/// (columns beyond 2c are zero).
struct Outline {
  std::vector<Point2> vertices;
  std::vector<Eigen::Matrix<double, 2, kMaxCoordinates>> jacobians;
};

Outline sample_outline(const Primitive& prim, int samples_per_segment);

/// Polyline without derivatives.
std::vector<Point2> sample_polyline(PrimitiveKind kind, const Eigen::Matrix2Xd& pts,
                                    int samples_per_segment);

// ---------------------------------------------------------------------------
// Affine recovery

/// Homogeneous affine map taking a primitive's initial control points onto its
/// current ones.
struct AffineFit {
  Eigen::Matrix3d matrix = Eigen::Matrix3d::Identity();
  double residual = 0.0;  // RMS point distance after mapping
  bool degenerate = false;  // collinear source; similarity fallback used
};

AffineFit fit_affine(const Primitive& prim);
AffineFit fit_affine(const Eigen::Matrix2Xd& from, const Eigen::Matrix2Xd& to);

}  // namespace primdraw
