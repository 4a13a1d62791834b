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
#include <vector>

#include "primdraw/attention.hpp"
#include "primdraw/geometry.hpp"

namespace primdraw {

struct InitConfig {
  int k = 32;               // landmarks drawn from the attention map
  int patch_size = 32;
  int per_type_count = 1;   // primitives of each kind per selected patch
  double alpha_init = 0.3;

  void validate(CanvasSize canvas) const;
};

/// The ordered composition of primitives. `primitives` holds the live set in
/// creation order (also the painting order); primitives removed by opacity
/// gating move to `pruned` and keep their ids.
struct Canvas {
  int width = 224;
  int height = 224;
  int patch_size = 32;
  std::uint64_t seed = 0;
  std::vector<Primitive> primitives;
  std::vector<Primitive> pruned;

  CanvasSize size() const { return {width, height}; }
  std::size_t live_count() const { return primitives.size(); }
};

/// Distinct patches containing at least one landmark, in row-major order.
std::vector<Patch> select_patches(const LandmarkSet& landmarks, int patch_size,
                                  CanvasSize canvas = {});

/// Places per_type_count lines, circles and semicircles (in that order) in every
/// selected patch, all at alpha_init. Fully determined by (cfg, landmarks, seed).
Canvas init_canvas(const InitConfig& cfg, const LandmarkSet& landmarks, std::uint64_t seed,
                   CanvasSize canvas = {});

}  // namespace primdraw
