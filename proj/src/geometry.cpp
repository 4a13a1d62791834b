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

#include "primdraw/geometry.hpp"

#include <Eigen/Geometry>
#include <unsupported/Eigen/AutoDiff>

namespace primdraw {

std::string_view to_string(PrimitiveKind kind) {
  switch (kind) {
    case PrimitiveKind::Line: return "line";
    case PrimitiveKind::Circle: return "circle";
    case PrimitiveKind::SemiCircle: return "semicircle";
  }
  return "unknown";
}

PrimitiveKind kind_from_string(std::string_view name) {
  if (name == "line") return PrimitiveKind::Line;
  if (name == "circle") return PrimitiveKind::Circle;
  if (name == "semicircle") return PrimitiveKind::SemiCircle;
  throw InputError("unknown primitive kind '" + std::string(name) + "'");
}

Primitive::Primitive(int id, PrimitiveKind kind, Eigen::Matrix2Xd pts, double alpha)
    : points(std::move(pts)),
      opacity(alpha),
      id_(id),
      kind_(kind),
      initial_points_(points),
      initial_opacity_(alpha) {
  if (points.cols() != control_point_count(kind)) {
    throw DomainError(std::string(to_string(kind)) + " requires " +
                      std::to_string(control_point_count(kind)) + " control points, got " +
                      std::to_string(points.cols()));
  }
  if (!points.allFinite() || !std::isfinite(opacity)) {
    throw DomainError("primitive " + std::to_string(id) + " has non-finite parameters");
  }
  if (opacity < 0.0 || opacity > 1.0) {
    throw DomainError("primitive opacity must lie in [0, 1]");
  }
}

Primitive Primitive::restore(int id, PrimitiveKind kind, Eigen::Matrix2Xd pts, double alpha,
                             Eigen::Matrix2Xd initial_pts, double initial_alpha) {
  Primitive p(id, kind, std::move(initial_pts), initial_alpha);
  if (pts.cols() != p.points.cols()) {
    throw DomainError("control point count mismatch while restoring primitive " +
                      std::to_string(id));
  }
  p.points = std::move(pts);
  p.opacity = alpha;
  return p;
}

Eigen::VectorXd Primitive::params() const {
  Eigen::VectorXd p(points.size() + 1);
  p.head(points.size()) = points.reshaped();
  p(points.size()) = opacity;
  return p;
}

void Primitive::set_params(const Eigen::Ref<const Eigen::VectorXd>& p) {
  if (p.size() != points.size() + 1) throw DomainError("parameter vector has wrong length");
  points.reshaped() = p.head(points.size());
  opacity = p(points.size());
}

Patch Patch::at(int row, int col, int size) {
  if (size <= 0 || row < 0 || col < 0) throw DomainError("invalid patch index or size");
  Patch p;
  p.row = row;
  p.col = col;
  p.size = size;
  p.start = Point2(col * size, row * size);
  p.end = p.start + Point2(size, size);
  return p;
}

bool Patch::contains(const Point2& p, double tol) const {
  return p.x() >= start.x() - tol && p.x() <= end.x() + tol && p.y() >= start.y() - tol &&
         p.y() <= end.y() + tol;
}

PatchIndex patch_of(const Point2& p, int patch_size, CanvasSize canvas) {
  if (patch_size <= 0) throw DomainError("patch size must be positive");
  if (!(p.x() >= 0.0 && p.y() >= 0.0 && p.x() < canvas.width && p.y() < canvas.height)) {
    throw DomainError("point (" + std::to_string(p.x()) + ", " + std::to_string(p.y()) +
                      ") lies outside the canvas");
  }
  return {static_cast<int>(std::floor(p.y() / patch_size)),
          static_cast<int>(std::floor(p.x() / patch_size))};
}

namespace {

// Integer coordinate in [start, end) of a patch axis.
double randint_in(Rng& rng, double start, double end) {
  std::uniform_int_distribution<int> dist(static_cast<int>(start), static_cast<int>(end) - 1);
  return dist(rng);
}

struct CircleDraw {
  Point2 center;
  double radius;
};

CircleDraw draw_circle(const Patch& patch, Rng& rng) {
  if (patch.size < 4) throw DomainError("circles need patches of at least 4 pixels");
  for (;;) {
    const Point2 center(randint_in(rng, patch.start.x(), patch.end.x()),
                        randint_in(rng, patch.start.y(), patch.end.y()));
    const double r_max = std::floor(max_radius(patch, center));
    if (r_max < 1.0) continue;
    std::uniform_int_distribution<int> rdist(1, static_cast<int>(r_max));
    return {center, static_cast<double>(rdist(rng))};
  }
}

}  // namespace

double max_radius(const Patch& patch, const Point2& center) {
  const double half = patch.size / 2.0;
  const double rx = center.x() < patch.start.x() + half ? center.x() - patch.start.x()
                                                        : patch.end.x() - center.x();
  const double ry = center.y() < patch.start.y() + half ? center.y() - patch.start.y()
                                                        : patch.end.y() - center.y();
  return std::min(rx, ry);
}

Eigen::Matrix2Xd circle_points(const Point2& c, double r) {
  Eigen::Matrix2Xd pts(2, 4);
  pts.col(0) << c.x(), c.y() - r;  // N
  pts.col(1) << c.x() + r, c.y();  // E
  pts.col(2) << c.x(), c.y() + r;  // S
  pts.col(3) << c.x() - r, c.y();  // W
  return pts;
}

Eigen::Matrix2Xd semicircle_points(const Point2& c, double r, bool upper) {
  Eigen::Matrix2Xd pts(2, 3);
  pts.col(0) << c.x() - r, c.y();
  pts.col(1) << c.x(), upper ? c.y() - r : c.y() + r;
  pts.col(2) << c.x() + r, c.y();
  return pts;
}

Primitive make_line(const Patch& patch, Rng& rng, int id, double opacity) {
  Eigen::Matrix2Xd pts(2, 2);
  do {
    for (int i = 0; i < 2; ++i) {
      pts(0, i) = randint_in(rng, patch.start.x(), patch.end.x());
      pts(1, i) = randint_in(rng, patch.start.y(), patch.end.y());
    }
  } while ((pts.col(1) - pts.col(0)).norm() <= 1.0);
  return Primitive(id, PrimitiveKind::Line, std::move(pts), opacity);
}

Primitive make_circle(const Patch& patch, Rng& rng, int id, double opacity) {
  const auto [center, radius] = draw_circle(patch, rng);
  return Primitive(id, PrimitiveKind::Circle, circle_points(center, radius), opacity);
}

Primitive make_semicircle(const Patch& patch, Rng& rng, int id, double opacity) {
  const auto [center, radius] = draw_circle(patch, rng);
  const bool upper = std::bernoulli_distribution(0.5)(rng);
  return Primitive(id, PrimitiveKind::SemiCircle, semicircle_points(center, radius, upper),
                   opacity);
}

double line_length(const Primitive& line) {
  if (line.kind() != PrimitiveKind::Line) throw DomainError("line_length expects a line");
  return (line.points.col(1) - line.points.col(0)).norm();
}

Outline sample_outline(const Primitive& prim, int samples_per_segment) {
  using Deriv = Eigen::Matrix<double, kMaxCoordinates, 1>;
  using AD = Eigen::AutoDiffScalar<Deriv>;
  Outline out;
  const int c = static_cast<int>(prim.points.cols());

  if (prim.kind() == PrimitiveKind::Line) {
    for (int i = 0; i < 2; ++i) {
      Eigen::Matrix<double, 2, kMaxCoordinates> j = Eigen::Matrix<double, 2, kMaxCoordinates>::Zero();
      j(0, 2 * i) = 1.0;
      j(1, 2 * i + 1) = 1.0;
      out.vertices.push_back(prim.points.col(i));
      out.jacobians.push_back(j);
    }
    return out;
  }

  Eigen::Matrix<AD, 2, Eigen::Dynamic> pts(2, c);
  for (int i = 0; i < c; ++i) {
    for (int d = 0; d < 2; ++d) {
      pts(d, i) = AD(prim.points(d, i), kMaxCoordinates, 2 * i + d);
    }
  }
  const auto chain = cubic_chain<AD>(prim.kind(), pts);
  for (std::size_t s = 0; s < chain.size(); ++s) {
    for (int k = (s == 0 ? 0 : 1); k <= samples_per_segment; ++k) {
      const Point2T<AD> v = chain[s].eval(static_cast<double>(k) / samples_per_segment);
      out.vertices.emplace_back(v.x().value(), v.y().value());
      Eigen::Matrix<double, 2, kMaxCoordinates> j;
      j.row(0) = v.x().derivatives().transpose();
      j.row(1) = v.y().derivatives().transpose();
      out.jacobians.push_back(j);
    }
  }
  return out;
}

std::vector<Point2> sample_polyline(PrimitiveKind kind, const Eigen::Matrix2Xd& pts,
                                    int samples_per_segment) {
  if (kind == PrimitiveKind::Line) return {pts.col(0), pts.col(1)};
  std::vector<Point2> out;
  const auto chain = cubic_chain<double>(kind, pts);
  for (std::size_t s = 0; s < chain.size(); ++s) {
    for (int k = (s == 0 ? 0 : 1); k <= samples_per_segment; ++k) {
      out.push_back(chain[s].eval(static_cast<double>(k) / samples_per_segment));
    }
  }
  return out;
}

AffineFit fit_affine(const Primitive& prim) {
  return fit_affine(prim.initial_points(), prim.points);
}

AffineFit fit_affine(const Eigen::Matrix2Xd& from, const Eigen::Matrix2Xd& to) {
  if (from.cols() != to.cols() || from.cols() < 1) {
    throw DomainError("fit_affine needs matching, non-empty point sets");
  }
  const Eigen::Index c = from.cols();
  const Point2 mean_from = from.rowwise().mean();
  const Point2 mean_to = to.rowwise().mean();
  const Eigen::Matrix2Xd src = from.colwise() - mean_from;
  const Eigen::Matrix2Xd dst = to.colwise() - mean_to;

  const double scale = std::max(1.0, src.cwiseAbs().maxCoeff());
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(c, 2);
  cod.setThreshold(1e-10);
  cod.compute(src.transpose());
  const Eigen::Index rank = cod.rank();

  AffineFit fit;
  Eigen::Matrix2d linear;
  if (c >= 3 && rank < 2) {
    // Collinear (or coincident) source points: the affine map is not
    // identifiable, so report the best similarity instead.
    fit.degenerate = true;
    if (src.norm() <= 1e-12 * scale) {
      linear.setIdentity();
    } else {
      const Eigen::Matrix3d sim = Eigen::umeyama(from, to, true);
      linear = sim.topLeftCorner<2, 2>();
    }
  } else {
    // Minimum-norm deviation from the identity: exact for affinely
    // independent triples, least squares for four points, and the smallest
    // change that explains a two-point (line) motion.
    const Eigen::MatrixXd residual_motion = (dst - src).transpose();
    const Eigen::MatrixXd delta_t = cod.solve(residual_motion);
    linear = Eigen::Matrix2d::Identity() + delta_t.transpose();
  }
  fit.matrix.setIdentity();
  fit.matrix.topLeftCorner<2, 2>() = linear;
  fit.matrix.topRightCorner<2, 1>() = mean_to - linear * mean_from;

  const Eigen::Matrix2Xd mapped = (linear * from).colwise() + fit.matrix.topRightCorner<2, 1>();
  fit.residual = std::sqrt((mapped - to).colwise().squaredNorm().mean());
  return fit;
}

}  // namespace primdraw
