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
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "primdraw/canvas.hpp"
#include "primdraw/render.hpp"
#include "primdraw/scoring.hpp"
#include "primdraw/trajectory.hpp"

namespace primdraw {

/// The run cannot continue (non-finite gradients, every primitive pruned).
class OptimizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Milestone {
  double fraction;  // of num_iter
  double lr;        // absolute learning rate from that point on
};

struct OptimConfig {
  int num_iter = 1000;
  double lr0 = 1.0;
  std::vector<Milestone> milestones{{0.5, 0.4}, {0.75, 0.1}};
  double pld_prob = 0.05;
  double opacity_k = 0.05;
  int gate_every = 50;
  int snapshot_every = 100;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  /// Opacity learning rate relative to the coordinate learning rate.
  double opacity_lr_scale = 0.01;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Independent Bernoulli(1 - p) bits; an all-false draw is redrawn.
std::vector<bool> pld_mask(std::size_t n, double p, Rng& rng);

/// lr0 before the first milestone, then the lr of the latest milestone with
/// t >= int(num_iter * fraction).
double schedule_lr(int t, const OptimConfig& cfg);

struct AdamSlot {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  int steps = 0;
};

/// Moments per primitive id. A primitive absent from an iteration keeps its
/// moments and step count unchanged.
using AdamState = std::map<int, AdamSlot>;

/// One Adam update of `params` with per-entry learning rates.
void adam_update(Eigen::Ref<Eigen::VectorXd> params, const Eigen::VectorXd& grad, AdamSlot& slot,
                 const Eigen::VectorXd& lr, const OptimConfig& cfg);

/// Applies Adam to the active primitives. `grads` holds one entry per active
/// primitive, in canvas order. Opacities are clamped to [0, 1] and coordinates
/// to the canvas. Throws OptimizationError naming the primitive when a
/// gradient is not finite; the canvas is left untouched in that case.
void step(Canvas& canvas, const std::vector<bool>& mask, const std::vector<Eigen::VectorXd>& grads,
          AdamState& state, double lr, const OptimConfig& cfg);

/// Moves live primitives with opacity <= k to canvas.pruned and returns their
/// ids. k = 0 disables gating.
std::vector<int> gate_opacity(Canvas& canvas, double k);

using SnapshotSink = std::function<void(const SnapshotRecord&)>;

struct RunResult {
  Canvas canvas;
  std::vector<SnapshotRecord> log;
  LossBreakdown final_loss;
};

/// Runs cfg.num_iter iterations of mask -> rasterize -> objective -> step,
/// gating every gate_every iterations. Snapshots are taken at iteration 0,
/// every snapshot_every iterations, and after the last iteration (with the
/// full canvas); each is passed to `sink` as soon as it exists.
RunResult run(Canvas canvas, Objective& objective, RasterizerBackend& backend,
              const RenderSettings& settings, const OptimConfig& cfg,
              const SnapshotSink& sink = {});

}  // namespace primdraw
