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
#include <limits>
#include <string>

#include "primdraw/scoring.hpp"

namespace primdraw {

inline constexpr const char* kClipTTemplate = "a photo of {}";

/// Fills "{}" in `tmpl` with `prompt`; a template without "{}" is a prefix.
std::string apply_template(const std::string& tmpl, const std::string& prompt);

/// Prompt-sketch similarity with the caption template, no augmentation.
double clip_t(const Raster& sketch, const std::string& prompt, EmbeddingBackend& backend,
              const std::string& tmpl = kClipTTemplate);

/// Prompt-sketch similarity with the raw prompt, no augmentation.
double cs(const Raster& sketch, const std::string& prompt, EmbeddingBackend& backend);

/// 10 log10(1 / MSE) over all channels; +infinity for identical rasters.
double psnr(const Raster& a, const Raster& b);

struct MetricsReport {
  std::string prompt;
  std::uint64_t seed = 0;
  double cs = 0.0;
  double clip_t = 0.0;
  double psnr = 0.0;
  int iter = 0;
  double wallclock_seconds = 0.0;
  std::string backend;
  std::string clip_t_template = kClipTTemplate;
  std::string psnr_pair = "sketch vs reference image";
};

/// Pretty-printed JSON. An infinite PSNR is written as the string "inf".
std::string to_json(const MetricsReport& report);

}  // namespace primdraw
