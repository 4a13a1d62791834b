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
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "primdraw/augment.hpp"
#include "primdraw/image.hpp"

namespace primdraw {

/// Output of a text or image encoder. Not necessarily unit-norm; similarity
/// normalizes.
struct Embedding {
  Eigen::VectorXd values;
};

/// sim(a, b) = a.b / (|a| |b|).
double cosine_sim(const Embedding& a, const Embedding& b);

/// d sim(a, b) / d b.
Eigen::VectorXd cosine_sim_grad(const Embedding& a, const Embedding& b);

/// Text and image encoders sharing one embedding space. The image side must
/// also supply vector-Jacobian products so losses can flow back to pixels.
/// Implementations are deterministic for fixed inputs.
class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;
  virtual std::string name() const = 0;
  virtual Embedding encode_text(const std::string& text) = 0;
  virtual std::vector<Embedding> encode_images(std::span<const Raster> images) = 0;
  /// For each image, the gradient of sum_i <grad_i, encode(image_i)> with
  /// respect to the image pixels.
  virtual std::vector<Raster> image_vjp(std::span<const Raster> images,
                                        std::span<const Eigen::VectorXd> grads) = 0;
};

/// Fixed random linear projection of the flattened pixels, then L2 normalized.
/// Text maps to a Gaussian vector seeded by the string.
class FakeEmbeddingBackend : public EmbeddingBackend {
 public:
  FakeEmbeddingBackend(int width, int height, int dim = 32, std::uint64_t seed = 0);
  /// Uses an explicit projection (dim x 3*width*height, HWC pixel order).
  FakeEmbeddingBackend(int width, int height, Eigen::MatrixXd projection, std::uint64_t seed = 0);

  std::string name() const override { return "fake"; }
  Embedding encode_text(const std::string& text) override;
  std::vector<Embedding> encode_images(std::span<const Raster> images) override;
  std::vector<Raster> image_vjp(std::span<const Raster> images,
                                std::span<const Eigen::VectorXd> grads) override;

  const Eigen::MatrixXd& projection() const { return projection_; }

 private:
  void check(const Raster& r) const;

  int width_;
  int height_;
  std::uint64_t seed_;
  Eigen::MatrixXd projection_;
};

struct LossWeights {
  double lambda_sem = 0.6;
  double lambda_vis = 0.9;

  void validate() const;
};

/// -sum_v sim(anchor, I(view_v)) over an explicit view list.
double view_loss(const Embedding& anchor, std::span<const Raster> views, EmbeddingBackend& backend);

/// The unaugmented sketch followed by cfg.M augmented views (seeded by cfg.seed).
std::vector<Raster> scoring_views(const Raster& sketch, const AugmentConfig& cfg);

/// -sum_{i=0..M} sim(T(P), I(T_f(S))), index 0 being the untransformed sketch.
double semantic_loss(const Embedding& prompt_emb, const Raster& sketch, const AugmentConfig& cfg,
                     EmbeddingBackend& backend);

/// -sum_{i=0..M} sim(I(I0), I(T_f(S))).
double visual_loss(const Embedding& ref_image_emb, const Raster& sketch, const AugmentConfig& cfg,
                   EmbeddingBackend& backend);

double total_loss(double sem, double vis, const LossWeights& w);

struct LossBreakdown {
  double sem = 0.0;
  double vis = 0.0;
  double total = 0.0;
};

/// Scalar objective over the rendered sketch, with its pixel gradient.
class Objective {
 public:
  virtual ~Objective() = default;
  /// Evaluates the loss; when `grad` is non-null it receives d total / d pixel.
  virtual LossBreakdown evaluate(const Raster& sketch, Raster* grad) = 0;
};

/// Weighted semantic + visual loss over the sketch and M fresh augmentations
/// per call. Augmentations are drawn from an internal stream seeded by aug.seed.
class ClipObjective : public Objective {
 public:
  ClipObjective(EmbeddingBackend& backend, Embedding prompt, Embedding reference,
                AugmentConfig aug, LossWeights weights);

  LossBreakdown evaluate(const Raster& sketch, Raster* grad) override;

 private:
  EmbeddingBackend& backend_;
  Embedding prompt_;
  Embedding reference_;
  AugmentConfig aug_;
  LossWeights weights_;
  Rng rng_;
};

/// Sum of squared pixel differences to a fixed target; reported as `total`.
class L2TargetObjective : public Objective {
 public:
  explicit L2TargetObjective(Raster target) : target_(std::move(target)) {}
  LossBreakdown evaluate(const Raster& sketch, Raster* grad) override;

 private:
  Raster target_;
};

}  // namespace primdraw
