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

#include "primdraw/optimizer.hpp"

#include <algorithm>
#include <cmath>

namespace primdraw {

void OptimConfig::validate() const {
  if (num_iter < 0) throw DomainError("num_iter must be >= 0");
  if (!(lr0 > 0.0)) throw DomainError("lr0 must be positive");
  double prev = 0.0;
  for (const auto& m : milestones) {
    if (!(m.fraction > prev && m.fraction < 1.0)) {
      throw DomainError("milestone fractions must be strictly increasing in (0, 1)");
    }
    if (!(m.lr > 0.0)) throw DomainError("milestone learning rates must be positive");
    prev = m.fraction;
  }
  if (!(pld_prob >= 0.0 && pld_prob < 1.0)) throw DomainError("pld probability must lie in [0, 1)");
  if (!(opacity_k >= 0.0 && opacity_k < 1.0)) throw DomainError("opacity threshold K must lie in [0, 1)");
  if (gate_every < 1) throw DomainError("gate_every must be at least 1");
  if (snapshot_every < 1) throw DomainError("snapshot_every must be at least 1");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) {
    throw DomainError("Adam betas must lie in [0, 1)");
  }
  if (!(eps > 0.0)) throw DomainError("Adam eps must be positive");
  if (!(opacity_lr_scale >= 0.0)) throw DomainError("opacity_lr_scale must be >= 0");
}

std::vector<bool> pld_mask(std::size_t n, double p, Rng& rng) {
  if (!(p >= 0.0 && p < 1.0)) throw DomainError("dropout probability must lie in [0, 1)");
  std::vector<bool> bits(n, true);
  if (n == 0 || p == 0.0) return bits;
  std::bernoulli_distribution keep(1.0 - p);
  for (;;) {
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
      bits[i] = keep(rng);
      any = any || bits[i];
    }
    if (any) return bits;
  }
}

double schedule_lr(int t, const OptimConfig& cfg) {
  double lr = cfg.lr0;
  for (const auto& m : cfg.milestones) {
    if (t >= static_cast<int>(cfg.num_iter * m.fraction)) lr = m.lr;
  }
  return lr;
}

void adam_update(Eigen::Ref<Eigen::VectorXd> params, const Eigen::VectorXd& grad, AdamSlot& slot,
                 const Eigen::VectorXd& lr, const OptimConfig& cfg) {
  if (slot.m.size() != params.size()) {
    slot.m = Eigen::VectorXd::Zero(params.size());
    slot.v = Eigen::VectorXd::Zero(params.size());
    slot.steps = 0;
  }
  ++slot.steps;
  slot.m = cfg.beta1 * slot.m + (1.0 - cfg.beta1) * grad;
  slot.v = cfg.beta2 * slot.v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(cfg.beta1, slot.steps);
  const double c2 = 1.0 - std::pow(cfg.beta2, slot.steps);
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    const double mhat = slot.m(i) / c1;
    const double vhat = slot.v(i) / c2;
    params(i) -= lr(i) * mhat / (std::sqrt(vhat) + cfg.eps);
  }
}

void step(Canvas& canvas, const std::vector<bool>& mask, const std::vector<Eigen::VectorXd>& grads,
          AdamState& state, double lr, const OptimConfig& cfg) {
  const std::size_t n = canvas.primitives.size();
  if (!mask.empty() && mask.size() != n) throw DomainError("mask length does not match canvas");
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < n; ++i) {
    if (mask.empty() || mask[i]) active.push_back(i);
  }
  if (grads.size() != active.size()) {
    throw DomainError("expected " + std::to_string(active.size()) + " gradients, got " +
                      std::to_string(grads.size()));
  }
  for (std::size_t a = 0; a < active.size(); ++a) {
    const Primitive& p = canvas.primitives[active[a]];
    if (grads[a].size() != p.points.size() + 1) {
      throw DomainError("gradient for primitive " + std::to_string(p.id()) + " has wrong length");
    }
    if (!grads[a].allFinite()) {
      throw OptimizationError("non-finite gradient for primitive " + std::to_string(p.id()));
    }
  }
  for (std::size_t a = 0; a < active.size(); ++a) {
    Primitive& p = canvas.primitives[active[a]];
    Eigen::VectorXd params = p.params();
    Eigen::VectorXd rates = Eigen::VectorXd::Constant(params.size(), lr);
    rates(params.size() - 1) = lr * cfg.opacity_lr_scale;
    adam_update(params, grads[a], state[p.id()], rates, cfg);
    p.set_params(params);
    p.points.row(0) = p.points.row(0).cwiseMax(0.0).cwiseMin(canvas.width);
    p.points.row(1) = p.points.row(1).cwiseMax(0.0).cwiseMin(canvas.height);
    p.opacity = std::clamp(p.opacity, 0.0, 1.0);
  }
}

std::vector<int> gate_opacity(Canvas& canvas, double k) {
  if (!(k >= 0.0 && k < 1.0)) throw DomainError("opacity threshold K must lie in [0, 1)");
  std::vector<int> ids;
  if (k == 0.0) return ids;
  const auto survivors = std::count_if(canvas.primitives.begin(), canvas.primitives.end(),
                                       [k](const Primitive& p) { return p.opacity > k; });
  if (survivors == 0 && !canvas.primitives.empty()) {
    throw OptimizationError("opacity gating with K=" + std::to_string(k) + " would prune all " +
                            std::to_string(canvas.primitives.size()) +
                            " primitives; lower K");
  }
  std::vector<Primitive> keep;
  for (auto& p : canvas.primitives) {
    if (p.opacity > k) {
      keep.push_back(std::move(p));
    } else {
      ids.push_back(p.id());
      canvas.pruned.push_back(std::move(p));
    }
  }
  canvas.primitives = std::move(keep);
  return ids;
}

RunResult run(Canvas canvas, Objective& objective, RasterizerBackend& backend,
              const RenderSettings& settings, const OptimConfig& cfg, const SnapshotSink& sink) {
  cfg.validate();
  settings.validate();
  if (settings.width != canvas.width || settings.height != canvas.height) {
    throw DomainError("render size does not match canvas size");
  }
  if (canvas.primitives.empty()) throw DomainError("cannot optimize an empty canvas");

  RunResult result;
  auto emit = [&](SnapshotRecord r) {
    if (sink) sink(r);
    result.log.push_back(std::move(r));
  };

  Rng rng(cfg.seed ^ 0x5851f42d4c957f2dULL);
  AdamState state;
  for (int t = 0; t < cfg.num_iter; ++t) {
    const double lr = schedule_lr(t, cfg);
    const auto mask = pld_mask(canvas.primitives.size(), cfg.pld_prob, rng);
    const auto active = active_primitives(canvas, mask);
    Raster pixel_grad;
    const LossBreakdown loss = objective.evaluate(backend.render(active, settings), &pixel_grad);
    if (t % cfg.snapshot_every == 0) {
      emit(make_record(canvas, mask, t, cfg.num_iter, loss, lr, settings.stroke_width));
    }
    const auto grads = backend.gradient(active, settings, pixel_grad);
    try {
      step(canvas, mask, grads, state, lr, cfg);
    } catch (const OptimizationError& e) {
      throw OptimizationError(std::string(e.what()) + " at iteration " + std::to_string(t));
    }
    if ((t + 1) % cfg.gate_every == 0) {
      for (int id : gate_opacity(canvas, cfg.opacity_k)) state.erase(id);
    }
  }

  const double lr = cfg.num_iter > 0 ? schedule_lr(cfg.num_iter - 1, cfg) : cfg.lr0;
  result.final_loss =
      objective.evaluate(backend.render(canvas.primitives, settings), nullptr);
  emit(make_record(canvas, {}, cfg.num_iter, cfg.num_iter, result.final_loss, lr,
                   settings.stroke_width));
  result.canvas = std::move(canvas);
  return result;
}

}  // namespace primdraw
