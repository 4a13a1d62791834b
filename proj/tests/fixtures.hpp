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

#include <random>

#include "primdraw/canvas.hpp"
#include "primdraw/render.hpp"

namespace primdraw::testing {

inline RenderSettings render_settings(int w, int h) {
  RenderSettings s;
  s.width = w;
  s.height = h;
  return s;
}

/// A 64x64 canvas holding three primitives of each kind at full opacity.
inline Canvas target_canvas() {
  Canvas c;
  c.width = c.height = 64;
  int id = 0;
  auto line = [&](double x1, double y1, double x2, double y2) {
    Eigen::Matrix2Xd p(2, 2);
    p << x1, x2, y1, y2;
    c.primitives.emplace_back(id++, PrimitiveKind::Line, p, 1.0);
  };
  line(6, 8, 26, 20);
  line(40, 6, 58, 12);
  line(10, 50, 30, 40);
  const double circles[3][3] = {{20, 30, 6}, {46, 30, 7}, {46, 52, 5}};
  for (const auto& c3 : circles) {
    c.primitives.emplace_back(id++, PrimitiveKind::Circle, circle_points(Point2(c3[0], c3[1]), c3[2]), 1.0);
  }
  const double semis[3][4] = {{14, 14, 6, 1}, {32, 54, 6, 0}, {54, 40, 5, 1}};
  for (const auto& s : semis) {
    c.primitives.emplace_back(id++, PrimitiveKind::SemiCircle,
                              semicircle_points(Point2(s[0], s[1]), s[2], s[3] > 0), 1.0);
  }
  return c;
}

/// The target canvas with every control point jittered and opacity lowered.
inline Canvas perturbed_canvas(const Canvas& target, double jitter, double opacity, std::uint64_t seed) {
  Canvas c = target;
  Rng rng(seed);
  std::uniform_real_distribution<double> u(-jitter, jitter);
  for (auto& p : c.primitives) {
    for (Eigen::Index i = 0; i < p.points.size(); ++i) p.points.data()[i] += u(rng);
    p.opacity = opacity;
  }
  return c;
}

}  // namespace primdraw::testing
