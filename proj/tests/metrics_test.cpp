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

#include <cmath>
#include <limits>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "primdraw/metrics.hpp"
#include "test_util.hpp"

namespace primdraw {
namespace {

Raster noise(int w, int h, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Raster r(w, h);
  for (Eigen::Index i = 0; i < r.data().size(); ++i) r.data()(i) = u(rng);
  return r;
}

TEST(Psnr, IdenticalImagesAreInfinite) {
  const Raster a = noise(8, 8, 1);
  EXPECT_TRUE(std::isinf(psnr(a, a)));
}

TEST(Psnr, UniformOffsetOfOneTenthIsTwentyDecibels) {
  const Raster a(10, 10, 0.5), b(10, 10, 0.6);
  EXPECT_NEAR(psnr(a, b), 20.0, 1e-9);
}

TEST(Psnr, MatchesBruteForceAndIsSymmetric) {
  const Raster a = noise(7, 5, 2), b = noise(7, 5, 3);
  double sum = 0;
  int n = 0;
  for (int y = 0; y < 5; ++y) {
    for (int x = 0; x < 7; ++x) {
      for (int c = 0; c < 3; ++c) {
        const double d = a(y, x, c) - b(y, x, c);
        sum += d * d;
        ++n;
      }
    }
  }
  EXPECT_NEAR(psnr(a, b), -10.0 * std::log10(sum / n), 1e-12);
  EXPECT_EQ(psnr(a, b), psnr(b, a));
  EXPECT_THROW(psnr(a, Raster(5, 7)), DomainError);
}

TEST(ClipT, ConstantBackendExtremes) {
  const Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(6, 1, 6);
  testing::ConstantBackend same(v, v);
  EXPECT_NEAR(clip_t(Raster(4, 4), "a cat", same), 1.0, 1e-15);
  Eigen::VectorXd t = Eigen::VectorXd::Zero(3), i = Eigen::VectorXd::Zero(3);
  t(0) = 1;
  i(2) = 1;
  testing::ConstantBackend orth(t, i);
  EXPECT_EQ(clip_t(Raster(4, 4), "a cat", orth), 0.0);
}

TEST(ClipT, AppliesTemplateWhileCsUsesRawPrompt) {
  EXPECT_EQ(apply_template(kClipTTemplate, "motorcycle"), "a photo of motorcycle");
  EXPECT_EQ(apply_template("{} drawing", "tree"), "tree drawing");
  FakeEmbeddingBackend backend(8, 8, 16, 2);
  const Raster s = noise(8, 8, 4);
  const Embedding img = backend.encode_images(std::span<const Raster>(&s, 1))[0];
  EXPECT_DOUBLE_EQ(clip_t(s, "boat", backend), cosine_sim(backend.encode_text("a photo of boat"), img));
  EXPECT_DOUBLE_EQ(cs(s, "boat", backend), cosine_sim(backend.encode_text("boat"), img));
}

TEST(MetricsReport, SerializesInfinityAsString) {
  MetricsReport r;
  r.prompt = "a cat";
  r.seed = 3;
  r.psnr = std::numeric_limits<double>::infinity();
  r.backend = "fake";
  const auto j = nlohmann::json::parse(to_json(r));
  EXPECT_EQ(j["psnr"], "inf");
  EXPECT_EQ(j["prompt"], "a cat");
  EXPECT_EQ(j["seed"], 3);
  EXPECT_EQ(j["clip_t_template"], "a photo of {}");
  r.psnr = 12.5;
  EXPECT_EQ(nlohmann::json::parse(to_json(r))["psnr"], 12.5);
}

}  // namespace
}  // namespace primdraw
