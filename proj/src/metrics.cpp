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

#include "primdraw/metrics.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

namespace primdraw {

std::string apply_template(const std::string& tmpl, const std::string& prompt) {
  const auto pos = tmpl.find("{}");
  if (pos == std::string::npos) return tmpl + prompt;
  return tmpl.substr(0, pos) + prompt + tmpl.substr(pos + 2);
}

namespace {

double prompt_similarity(const Raster& sketch, const std::string& text, EmbeddingBackend& backend) {
  const Embedding t = backend.encode_text(text);
  const auto e = backend.encode_images(std::span<const Raster>(&sketch, 1));
  if (e.size() != 1) throw BackendError(backend.name() + " returned no image embedding");
  return cosine_sim(t, e[0]);
}

}  // namespace

double clip_t(const Raster& sketch, const std::string& prompt, EmbeddingBackend& backend,
              const std::string& tmpl) {
  return prompt_similarity(sketch, apply_template(tmpl, prompt), backend);
}

double cs(const Raster& sketch, const std::string& prompt, EmbeddingBackend& backend) {
  return prompt_similarity(sketch, prompt, backend);
}

double psnr(const Raster& a, const Raster& b) {
  if (!a.same_shape(b)) throw DomainError("psnr requires rasters of equal size");
  const double mse = (a.data() - b.data()).squaredNorm() / static_cast<double>(a.data().size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

std::string to_json(const MetricsReport& r) {
  nlohmann::ordered_json j;
  j["prompt"] = r.prompt;
  j["seed"] = r.seed;
  j["cs"] = r.cs;
  j["clip_t"] = r.clip_t;
  if (std::isinf(r.psnr)) {
    j["psnr"] = "inf";
  } else {
    j["psnr"] = r.psnr;
  }
  j["iter"] = r.iter;
  j["wallclock_seconds"] = r.wallclock_seconds;
  j["backend"] = r.backend;
  j["clip_t_template"] = r.clip_t_template;
  j["psnr_pair"] = r.psnr_pair;
  return j.dump(2) + "\n";
}

}  // namespace primdraw
