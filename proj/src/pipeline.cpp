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

#include "primdraw/pipeline.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <fstream>
#include <iostream>
#include <set>

#include "primdraw/metrics.hpp"
#include "primdraw/trajectory.hpp"

namespace primdraw {

namespace {

std::vector<std::string> tokens(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

// Independent streams derived from the run seed.
constexpr std::uint64_t kLandmarkStream = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kAugmentStream = 0xbf58476d1ce4e5b9ULL;

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot write " + path.string());
  os << text;
  if (!os) throw InputError("failed writing " + path.string());
}

}  // namespace

std::string default_focus(const std::string& prompt) {
  std::string last;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty() && std::all_of(cur.begin(), cur.end(),
                                    [](unsigned char c) { return std::isalpha(c); })) {
      last = cur;
    }
    cur.clear();
  };
  for (unsigned char c : prompt) {
    if (std::isspace(c) || std::ispunct(c)) {
      flush();
    } else {
      cur.push_back(static_cast<char>(c));
    }
  }
  flush();
  return last;
}

bool focus_in_prompt(const std::string& focus, const std::string& prompt) {
  const auto words = tokens(prompt);
  const auto wanted = tokens(focus);
  if (wanted.empty()) return false;
  // Multi-word focus phrases must appear as a contiguous run of tokens.
  for (std::size_t i = 0; i + wanted.size() <= words.size(); ++i) {
    if (std::equal(wanted.begin(), wanted.end(), words.begin() + static_cast<long>(i))) {
      return true;
    }
  }
  return false;
}

void RunConfig::validate() const {
  if (prompt.empty()) throw ConfigError("--prompt is required");
  const std::string f = focus.empty() ? default_focus(prompt) : focus;
  if (f.empty()) throw ConfigError("prompt '" + prompt + "' has no alphabetic token to focus on");
  if (!focus_in_prompt(f, prompt)) {
    throw ConfigError("focus token '" + f + "' does not appear in prompt '" + prompt + "'");
  }
  if (backend != "live" && backend != "fake") {
    throw ConfigError("--backend must be live or fake, got '" + backend + "'");
  }
  if (attention != "live" && attention != "uniform" && attention.rfind("file:", 0) != 0) {
    throw ConfigError("--attention must be live, uniform or file:<path>, got '" + attention + "'");
  }
  if (attention == "file:") throw ConfigError("--attention file: needs a path");
  try {
    init.validate({render.width, render.height});
    aug.validate();
    weights.validate();
    optim.validate();
    render.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

namespace {

std::string live_unavailable(const RunConfig& cfg, const std::string& what) {
  std::string msg = "the live " + what +
                    " needs pretrained model weights and is not available in this build";
  msg += cfg.cache_dir.empty() ? " (PRIMDRAW_CACHE is unset)"
                               : " (PRIMDRAW_CACHE=" + cfg.cache_dir + ")";
  return msg + "; use --backend fake with --attention uniform or file:<path>";
}

}  // namespace

std::unique_ptr<AttentionProvider> make_attention_provider(const RunConfig& cfg) {
  const CanvasSize canvas{cfg.render.width, cfg.render.height};
  if (cfg.attention == "uniform") {
    return std::make_unique<UniformAttentionProvider>(canvas, cfg.ref_image);
  }
  if (cfg.attention.rfind("file:", 0) == 0) {
    return std::make_unique<FileAttentionProvider>(cfg.attention.substr(5), canvas, cfg.ref_image);
  }
  throw BackendError(live_unavailable(cfg, "attention provider"));
}

std::unique_ptr<EmbeddingBackend> make_embedding_backend(const RunConfig& cfg) {
  if (cfg.backend == "fake") {
    return std::make_unique<FakeEmbeddingBackend>(cfg.render.width, cfg.render.height);
  }
  throw BackendError(live_unavailable(cfg, "embedding backend"));
}

int synthesize(const RunConfig& cfg_in, std::ostream& err) {
  const auto started = std::chrono::steady_clock::now();
  RunConfig cfg = cfg_in;
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (cfg.focus.empty()) cfg.focus = default_focus(cfg.prompt);
  cfg.aug.seed = cfg.seed ^ kAugmentStream;
  cfg.optim.seed = cfg.seed;
  const CanvasSize size{cfg.render.width, cfg.render.height};

  try {
    std::filesystem::create_directories(cfg.out);
    auto attention = make_attention_provider(cfg);
    auto backend = make_embedding_backend(cfg);

    const AttentionResult attended = attention->attend(cfg.prompt, cfg.focus, cfg.seed);
    const AttentionMap map = aggregate(attended.raw_maps, size);
    Rng landmark_rng(cfg.seed ^ kLandmarkStream);
    LandmarkSet landmarks;
    Canvas canvas;
    try {
      landmarks = sample_landmarks(map, cfg.init.k, landmark_rng);
      canvas = init_canvas(cfg.init, landmarks, cfg.seed, size);
    } catch (const DomainError& e) {
      err << "config error: " << e.what() << "\n";
      return kExitConfig;
    }

    const Embedding prompt_emb = backend->encode_text(cfg.prompt);
    const Embedding ref_emb =
        backend->encode_images(std::span<const Raster>(&attended.reference, 1)).at(0);
    ClipObjective objective(*backend, prompt_emb, ref_emb, cfg.aug, cfg.weights);
    SoftRasterizer rasterizer;

    TrajectoryWriter writer(cfg.out / "trajectory.jsonl");
    auto sink = [&](const SnapshotRecord& r) {
      writer.append(r);
      export_layers(live_primitives(r), cfg.render, cfg.out, r.iter);
    };
    const RunResult result = run(canvas, objective, rasterizer, cfg.render, cfg.optim, sink);

    write_file(cfg.out / "final.svg", export_svg(result.canvas.primitives, cfg.render));
    const Raster final_raster = rasterizer.render(result.canvas.primitives, cfg.render);
    write_png(final_raster, (cfg.out / "final.png").string());

    MetricsReport report;
    report.prompt = cfg.prompt;
    report.seed = cfg.seed;
    report.cs = cs(final_raster, cfg.prompt, *backend);
    report.clip_t = clip_t(final_raster, cfg.prompt, *backend);
    report.psnr = psnr(final_raster, attended.reference);
    report.iter = cfg.optim.num_iter;
    report.backend = backend->name();
    report.wallclock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    write_file(cfg.out / "metrics.json", to_json(report));
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitProvider;
  }
  return kExitOk;
}

int synthesize_batch(const std::vector<RunConfig>& configs, int jobs, std::ostream& err) {
  if (configs.size() == 1) return synthesize(configs.front(), err);
  jobs = std::max(1, jobs);
  err.flush();
  std::cout.flush();
  int worst = kExitOk;
  std::set<pid_t> running;
  auto reap_one = [&] {
    int status = 0;
    const pid_t pid = ::waitpid(-1, &status, 0);
    if (pid <= 0) return;
    running.erase(pid);
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : kExitProvider;
    worst = std::max(worst, code);
  };
  for (const auto& cfg : configs) {
    while (static_cast<int>(running.size()) >= jobs) reap_one();
    const pid_t pid = ::fork();
    if (pid < 0) {
      err << "error: cannot start worker process\n";
      worst = std::max<int>(worst, kExitProvider);
      break;
    }
    if (pid == 0) {
      const int code = synthesize(cfg, std::cerr);
      std::cerr.flush();
      ::_exit(code);
    }
    running.insert(pid);
  }
  while (!running.empty()) reap_one();
  return worst;
}

int replay(const std::filesystem::path& trajectory, const std::filesystem::path& out_dir,
           std::ostream& err) {
  LoadedTrajectory log;
  try {
    log = read_trajectory(trajectory);
  } catch (const TrajectoryError& e) {
    err << "invalid trajectory: " << e.what() << "\n";
    return kExitConfig;
  }
  for (const auto& w : log.warnings) err << "warning: " << w << "\n";
  try {
    for (const auto& r : log.records) {
      RenderSettings settings;
      settings.width = r.width;
      settings.height = r.height;
      settings.stroke_width = r.stroke_width;
      export_layers(live_primitives(r), settings, out_dir, r.iter);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitProvider;
  }
  return kExitOk;
}

}  // namespace primdraw
