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

#include "primdraw/scoring.hpp"

#include <algorithm>
#include <cmath>

namespace primdraw {

namespace {

void check_pair(const Embedding& a, const Embedding& b) {
  if (a.values.size() != b.values.size()) {
    throw DomainError("embedding dimensions differ (" + std::to_string(a.values.size()) + " vs " +
                      std::to_string(b.values.size()) + ")");
  }
  if (a.values.size() == 0) throw DomainError("empty embedding");
  if (a.values.squaredNorm() == 0.0 || b.values.squaredNorm() == 0.0) {
    throw DomainError("cosine similarity of a zero vector is undefined");
  }
}

}  // namespace

double cosine_sim(const Embedding& a, const Embedding& b) {
  check_pair(a, b);
  const double s = a.values.dot(b.values) / (a.values.norm() * b.values.norm());
  return std::clamp(s, -1.0, 1.0);
}

Eigen::VectorXd cosine_sim_grad(const Embedding& a, const Embedding& b) {
  check_pair(a, b);
  const double na = a.values.norm(), nb = b.values.norm();
  const double dot = a.values.dot(b.values);
  return a.values / (na * nb) - b.values * (dot / (na * nb * nb * nb));
}

FakeEmbeddingBackend::FakeEmbeddingBackend(int width, int height, int dim, std::uint64_t seed)
    : width_(width), height_(height), seed_(seed) {
  if (dim < 1) throw DomainError("embedding dimension must be positive");
  const Eigen::Index n = static_cast<Eigen::Index>(width) * height * Raster::kChannels;
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(n)));
  projection_.resize(dim, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < dim; ++i) projection_(i, j) = normal(rng);
  }
}

FakeEmbeddingBackend::FakeEmbeddingBackend(int width, int height, Eigen::MatrixXd projection,
                                           std::uint64_t seed)
    : width_(width), height_(height), seed_(seed), projection_(std::move(projection)) {
  if (projection_.cols() != static_cast<Eigen::Index>(width) * height * Raster::kChannels) {
    throw DomainError("projection width must equal 3 * width * height");
  }
}

void FakeEmbeddingBackend::check(const Raster& r) const {
  if (r.width() != width_ || r.height() != height_) {
    throw BackendError("fake backend expects " + std::to_string(width_) + "x" +
                       std::to_string(height_) + " images, got " + std::to_string(r.width()) +
                       "x" + std::to_string(r.height()));
  }
}

Embedding FakeEmbeddingBackend::encode_text(const std::string& text) {
  Rng rng(fnv1a(text) ^ seed_);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(projection_.rows());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
  return {v / v.norm()};
}

std::vector<Embedding> FakeEmbeddingBackend::encode_images(std::span<const Raster> images) {
  std::vector<Embedding> out;
  out.reserve(images.size());
  for (const auto& img : images) {
    check(img);
    const Eigen::VectorXd raw = projection_ * img.data();
    const double n = raw.norm();
    if (n == 0.0) throw BackendError("fake backend produced a zero embedding");
    out.push_back({raw / n});
  }
  return out;
}

std::vector<Raster> FakeEmbeddingBackend::image_vjp(std::span<const Raster> images,
                                                    std::span<const Eigen::VectorXd> grads) {
  if (images.size() != grads.size()) throw DomainError("image/gradient count mismatch");
  std::vector<Raster> out;
  out.reserve(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    check(images[i]);
    const Eigen::VectorXd raw = projection_ * images[i].data();
    const double n = raw.norm();
    const Eigen::VectorXd e = raw / n;
    // Jacobian of v / |v| is (I - e e^T) / |v|.
    const Eigen::VectorXd g_raw = (grads[i] - e * e.dot(grads[i])) / n;
    Raster g(width_, height_, 0.0);
    g.data() = projection_.transpose() * g_raw;
    out.push_back(std::move(g));
  }
  return out;
}

void LossWeights::validate() const {
  if (!(lambda_sem >= 0.0 && lambda_vis >= 0.0)) throw DomainError("loss weights must be >= 0");
  if (lambda_sem == 0.0 && lambda_vis == 0.0) throw DomainError("loss weights cannot both be 0");
}

double view_loss(const Embedding& anchor, std::span<const Raster> views,
                 EmbeddingBackend& backend) {
  const auto embeddings = backend.encode_images(views);
  double loss = 0.0;
  for (const auto& e : embeddings) loss -= cosine_sim(anchor, e);
  return loss;
}

std::vector<Raster> scoring_views(const Raster& sketch, const AugmentConfig& cfg) {
  Rng rng(cfg.seed);
  std::vector<Raster> views{sketch};
  for (auto& v : augment(sketch, cfg, rng)) views.push_back(std::move(v));
  return views;
}

double semantic_loss(const Embedding& prompt_emb, const Raster& sketch, const AugmentConfig& cfg,
                     EmbeddingBackend& backend) {
  const auto views = scoring_views(sketch, cfg);
  return view_loss(prompt_emb, views, backend);
}

double visual_loss(const Embedding& ref_image_emb, const Raster& sketch, const AugmentConfig& cfg,
                   EmbeddingBackend& backend) {
  const auto views = scoring_views(sketch, cfg);
  return view_loss(ref_image_emb, views, backend);
}

double total_loss(double sem, double vis, const LossWeights& w) {
  return w.lambda_sem * sem + w.lambda_vis * vis;
}

ClipObjective::ClipObjective(EmbeddingBackend& backend, Embedding prompt, Embedding reference,
                             AugmentConfig aug, LossWeights weights)
    : backend_(backend),
      prompt_(std::move(prompt)),
      reference_(std::move(reference)),
      aug_(aug),
      weights_(weights),
      rng_(aug.seed) {
  aug_.validate();
  weights_.validate();
}

LossBreakdown ClipObjective::evaluate(const Raster& sketch, Raster* grad) {
  const auto warps = sample_warps(sketch.width(), sketch.height(), aug_, rng_);
  std::vector<Raster> views{sketch};
  for (const auto& w : warps) views.push_back(w.apply(sketch));

  const auto embeddings = backend_.encode_images(views);
  if (embeddings.size() != views.size()) {
    throw BackendError(backend_.name() + " returned " + std::to_string(embeddings.size()) +
                       " embeddings for " + std::to_string(views.size()) + " images");
  }
  LossBreakdown out;
  for (const auto& e : embeddings) {
    out.sem -= cosine_sim(prompt_, e);
    out.vis -= cosine_sim(reference_, e);
  }
  out.total = total_loss(out.sem, out.vis, weights_);
  if (!grad) return out;

  std::vector<Eigen::VectorXd> de;
  de.reserve(embeddings.size());
  for (const auto& e : embeddings) {
    de.push_back(-weights_.lambda_sem * cosine_sim_grad(prompt_, e) -
                 weights_.lambda_vis * cosine_sim_grad(reference_, e));
  }
  const auto dviews = backend_.image_vjp(views, de);
  *grad = dviews[0];
  for (std::size_t i = 0; i < warps.size(); ++i) {
    grad->data() += warps[i].pullback(dviews[i + 1]).data();
  }
  return out;
}

LossBreakdown L2TargetObjective::evaluate(const Raster& sketch, Raster* grad) {
  if (!sketch.same_shape(target_)) throw DomainError("target and sketch sizes differ");
  const Eigen::VectorXd diff = sketch.data() - target_.data();
  LossBreakdown out;
  out.total = diff.squaredNorm();
  if (grad) {
    *grad = Raster(sketch.width(), sketch.height(), 0.0);
    grad->data() = 2.0 * diff;
  }
  return out;
}

}  // namespace primdraw
