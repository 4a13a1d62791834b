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
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "primdraw/attention.hpp"
#include "primdraw/augment.hpp"
#include "primdraw/canvas.hpp"
#include "primdraw/optimizer.hpp"
#include "primdraw/render.hpp"
#include "primdraw/scoring.hpp"

namespace primdraw {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitProvider = 3 };

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  std::string prompt;
  std::string focus;  // empty: last alphabetic token of the prompt
  std::uint64_t seed = 0;
  InitConfig init;
  AugmentConfig aug;
  LossWeights weights;
  OptimConfig optim;
  RenderSettings render;
  std::string backend = "live";    // live | fake
  std::string attention = "live";  // live | uniform | file:<path>
  std::optional<std::string> ref_image;
  std::filesystem::path out = "out";
  std::string cache_dir;  // model weights for the live providers

  /// Throws ConfigError describing the first problem found.
  void validate() const;
};

/// Last token made only of letters, or "" if there is none.
std::string default_focus(const std::string& prompt);

/// Whether `focus` equals one of the prompt's tokens, ignoring case.
bool focus_in_prompt(const std::string& focus, const std::string& prompt);

std::unique_ptr<AttentionProvider> make_attention_provider(const RunConfig& cfg);
std::unique_ptr<EmbeddingBackend> make_embedding_backend(const RunConfig& cfg);

/// Runs one synthesis and writes final.svg, final.png, trajectory.jsonl,
/// metrics.json and layers/ under cfg.out. Reports problems on `err` and
/// returns an ExitCode.
int synthesize(const RunConfig& cfg, std::ostream& err);

/// Runs each config in a child process, at most `jobs` at a time. Returns the
/// largest exit code.
int synthesize_batch(const std::vector<RunConfig>& configs, int jobs, std::ostream& err);

/// Rebuilds the layer SVGs under out_dir from a trajectory log.
int replay(const std::filesystem::path& trajectory, const std::filesystem::path& out_dir,
           std::ostream& err);

}  // namespace primdraw
