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

// Command-line front end: `primdraw --prompt ...` synthesizes a sketch,
// `primdraw replay <log> --out <dir>` rebuilds layer files from a log.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "primdraw/pipeline.hpp"

int main(int argc, char** argv) {
  using namespace primdraw;

  RunConfig cfg;
  std::vector<std::string> prompts;
  int jobs = 1;
  std::string ref_image;
  std::string out = "out";

  CLI::App app{"Sketch synthesis from line, circle and semicircle primitives"};
  app.set_config("--config", "", "Read options from a 'key = value' file; flags override it");
  app.add_option("--prompt", prompts, "Text prompt (repeat with --jobs for a batch)");
  app.add_option("--focus", cfg.focus, "Prompt word used for the attention map");
  app.add_option("--seed", cfg.seed, "Random seed");
  app.add_option("--num-iter", cfg.optim.num_iter, "Optimization iterations")
      ->capture_default_str();
  app.add_option("--pld", cfg.optim.pld_prob, "Primitive dropout probability")
      ->capture_default_str();
  app.add_option("--alpha-init", cfg.init.alpha_init, "Initial opacity")->capture_default_str();
  app.add_option("--opacity-k", cfg.optim.opacity_k, "Opacity pruning threshold")
      ->capture_default_str();
  app.add_option("--patch-size", cfg.init.patch_size, "Patch side in pixels")
      ->capture_default_str();
  app.add_option("--k-landmarks", cfg.init.k, "Landmarks drawn from the attention map")
      ->capture_default_str();
  app.add_option("--per-type-count", cfg.init.per_type_count,
                 "Primitives of each kind per selected patch")
      ->capture_default_str();
  app.add_option("--lambda-sem", cfg.weights.lambda_sem, "Semantic loss weight")
      ->capture_default_str();
  app.add_option("--lambda-vis", cfg.weights.lambda_vis, "Visual loss weight")
      ->capture_default_str();
  app.add_option("--aug-m", cfg.aug.M, "Augmented views per iteration")->capture_default_str();
  app.add_option("--backend", cfg.backend, "Embedding backend: live or fake")
      ->capture_default_str();
  app.add_option("--attention", cfg.attention, "Attention source: live, uniform or file:<path>")
      ->capture_default_str();
  app.add_option("--ref-image", ref_image, "Reference image PNG at canvas size");
  app.add_option("--out", out, "Output directory")->capture_default_str();
  app.add_option("--jobs", jobs, "Worker processes for a batch of prompts")
      ->capture_default_str();

  std::string replay_log;
  std::string replay_out = "out";
  auto* replay_cmd = app.add_subcommand("replay", "Regenerate layer SVGs from a trajectory log");
  replay_cmd->add_option("trajectory", replay_log, "trajectory.jsonl")->required();
  replay_cmd->add_option("--out", replay_out, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (*replay_cmd) return replay(replay_log, replay_out, std::cerr);

  if (const char* cache = std::getenv("PRIMDRAW_CACHE")) cfg.cache_dir = cache;
  if (!ref_image.empty()) cfg.ref_image = ref_image;
  if (prompts.empty()) {
    std::cerr << "config error: --prompt is required\n";
    return kExitConfig;
  }
  if (jobs < 1) {
    std::cerr << "config error: --jobs must be at least 1\n";
    return kExitConfig;
  }
  if (prompts.size() == 1) {
    cfg.prompt = prompts.front();
    cfg.out = out;
    return synthesize(cfg, std::cerr);
  }
  if (!cfg.focus.empty()) {
    std::cerr << "config error: --focus cannot be shared by a batch of prompts\n";
    return kExitConfig;
  }
  std::vector<RunConfig> batch;
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    RunConfig c = cfg;
    c.prompt = prompts[i];
    c.seed = cfg.seed + i;
    c.out = std::filesystem::path(out) / std::to_string(i);
    batch.push_back(std::move(c));
  }
  return synthesize_batch(batch, jobs, std::cerr);
}
