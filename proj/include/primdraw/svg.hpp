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
#include <vector>

#include "primdraw/geometry.hpp"

namespace primdraw {

/// Shortest decimal that round-trips `v` ("8", "-16", "8.25").
std::string format_number(double v);

/// SVG path data for a primitive.
///
///   line        "M x1,y1 L x2,y2"
///   circle      "M xc-r,yc a r,r 0 1,1 2r,0 a r,r 0 1,1 -2r,0" while the four
///               points are still an axis-aligned circle, else a closed cubic chain
///   semicircle  "M xc-r,yc a r,r 0 1,s 2r,0" while exact (s = 1 upper, 0 lower),
///               else an open cubic chain
std::string svg_path(const Primitive& prim);

/// True while the control points still describe the shape exactly, so the
/// arc template is emitted.
bool is_exact_shape(const Primitive& prim, double tol = 1e-9);

struct ParsedPath {
  PrimitiveKind kind = PrimitiveKind::Line;
  Eigen::Matrix2Xd points;
};

/// Inverse of svg_path: recovers the kind and on-curve control points.
/// Throws InputError for path data this library does not emit.
ParsedPath parse_svg_path(const std::string& d);

struct SvgElement {
  std::string d;
  std::string stroke = "black";
  double opacity = 1.0;
  int id = -1;
  PrimitiveKind kind = PrimitiveKind::Line;
};

struct SvgDocumentStyle {
  int width = 224;
  int height = 224;
  double stroke_width = 1.5;
};

std::string svg_document(const std::vector<SvgElement>& elements, const SvgDocumentStyle& style);

struct ParsedElement {
  int id = -1;
  ParsedPath path;
  double opacity = 1.0;
  std::string stroke;
};

/// Reads back the path elements of a document written by svg_document.
std::vector<ParsedElement> parse_svg_document(const std::string& text);

}  // namespace primdraw
