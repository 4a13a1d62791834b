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

#include "primdraw/canvas.hpp"

#include <set>

namespace primdraw {

void InitConfig::validate(CanvasSize canvas) const {
  if (k < 1) throw DomainError("k (landmark count) must be at least 1");
  if (patch_size < 4) throw DomainError("patch size must be at least 4 pixels");
  if (canvas.width % patch_size != 0 || canvas.height % patch_size != 0) {
    throw DomainError("canvas " + std::to_string(canvas.width) + "x" +
                      std::to_string(canvas.height) + " is not divisible by patch size " +
                      std::to_string(patch_size));
  }
  if (per_type_count < 1) throw DomainError("per_type_count must be at least 1");
  if (!(alpha_init > 0.0 && alpha_init <= 1.0)) throw DomainError("alpha_init must lie in (0, 1]");
}

std::vector<Patch> select_patches(const LandmarkSet& landmarks, int patch_size, CanvasSize canvas) {
  std::set<PatchIndex> hit;
  for (const auto& p : landmarks.points) hit.insert(patch_of(p, patch_size, canvas));
  std::vector<Patch> out;
  out.reserve(hit.size());
  for (const auto& idx : hit) out.push_back(Patch::at(idx.row, idx.col, patch_size));
  return out;
}

Canvas init_canvas(const InitConfig& cfg, const LandmarkSet& landmarks, std::uint64_t seed,
                   CanvasSize size) {
  cfg.validate(size);
  const auto patches = select_patches(landmarks, cfg.patch_size, size);
  if (patches.empty()) throw DomainError("attention map produced no landmarks");

  Canvas canvas;
  canvas.width = size.width;
  canvas.height = size.height;
  canvas.patch_size = cfg.patch_size;
  canvas.seed = seed;
  Rng rng(seed);
  int id = 0;
  for (const auto& patch : patches) {
    for (int i = 0; i < cfg.per_type_count; ++i)
      canvas.primitives.push_back(make_line(patch, rng, id++, cfg.alpha_init));
    for (int i = 0; i < cfg.per_type_count; ++i)
      canvas.primitives.push_back(make_circle(patch, rng, id++, cfg.alpha_init));
    for (int i = 0; i < cfg.per_type_count; ++i)
      canvas.primitives.push_back(make_semicircle(patch, rng, id++, cfg.alpha_init));
  }
  return canvas;
}

}  // namespace primdraw
