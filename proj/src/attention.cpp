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

#include "primdraw/attention.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <tuple>

namespace primdraw {

Eigen::MatrixXd resize_bilinear(const Eigen::MatrixXd& src, int out_height, int out_width) {
  if (src.size() == 0 || out_height <= 0 || out_width <= 0) {
    throw DomainError("resize_bilinear needs non-empty input and output");
  }
  const Eigen::Index in_h = src.rows(), in_w = src.cols();
  if (in_h == out_height && in_w == out_width) return src;

  auto taps = [](Eigen::Index in, int out, int i) {
    double s = (i + 0.5) * static_cast<double>(in) / out - 0.5;
    s = std::max(s, 0.0);
    Eigen::Index i0 = std::min<Eigen::Index>(static_cast<Eigen::Index>(s), in - 1);
    Eigen::Index i1 = std::min<Eigen::Index>(i0 + 1, in - 1);
    return std::tuple{i0, i1, s - static_cast<double>(i0)};
  };

  Eigen::MatrixXd out(out_height, out_width);
  for (int y = 0; y < out_height; ++y) {
    const auto [y0, y1, fy] = taps(in_h, out_height, y);
    for (int x = 0; x < out_width; ++x) {
      const auto [x0, x1, fx] = taps(in_w, out_width, x);
      const double top = src(y0, x0) * (1 - fx) + src(y0, x1) * fx;
      const double bottom = src(y1, x0) * (1 - fx) + src(y1, x1) * fx;
      out(y, x) = top * (1 - fy) + bottom * fy;
    }
  }
  return out;
}

Eigen::MatrixXd softmax(const Eigen::MatrixXd& logits) {
  const double m = logits.maxCoeff();
  Eigen::MatrixXd e = (logits.array() - m).exp().matrix();
  return e / e.sum();
}

AttentionMap aggregate(const std::vector<Eigen::MatrixXd>& raw_maps, CanvasSize canvas) {
  if (raw_maps.empty()) throw DomainError("aggregate needs at least one attention map");
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(canvas.height, canvas.width);
  for (const auto& m : raw_maps) {
    if (m.size() == 0) throw DomainError("empty attention map");
    if (!m.allFinite()) throw DomainError("attention map contains non-finite values");
    if (m.minCoeff() < 0.0) throw DomainError("attention maps must be non-negative");
    sum += resize_bilinear(m, canvas.height, canvas.width);
  }
  return {softmax(sum)};
}

LandmarkSet sample_landmarks(const AttentionMap& map, int k, Rng& rng) {
  if (k < 1) throw DomainError("landmark count must be at least 1");
  const Eigen::Index n = map.values.size();
  std::vector<double> w(map.values.data(), map.values.data() + n);  // column-major
  const auto positive = std::count_if(w.begin(), w.end(), [](double v) { return v > 0.0; });
  if (k > positive) {
    throw DomainError("cannot draw " + std::to_string(k) + " distinct landmarks from a map with " +
                      std::to_string(positive) + " pixels of positive mass");
  }

  LandmarkSet out;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int draw = 0; draw < k; ++draw) {
    double total = 0.0;
    for (double v : w) total += v;
    const double target = unit(rng) * total;
    double acc = 0.0;
    Eigen::Index pick = -1;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (w[i] <= 0.0) continue;
      acc += w[i];
      pick = i;
      if (acc > target) break;
    }
    const Eigen::Index row = pick % map.values.rows();
    const Eigen::Index col = pick / map.values.rows();
    out.points.emplace_back(static_cast<double>(col), static_cast<double>(row));
    out.weights.push_back(map.values(row, col));
    w[pick] = 0.0;
  }
  return out;
}

namespace {

std::uint32_t read_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

void write_u32_le(std::ostream& os, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

Eigen::MatrixXd read_attn(const std::string& path, const std::vector<unsigned char>& bytes) {
  const std::string expected = "expected 'ATTN', u32 height, u32 width, then height*width "
                               "little-endian float32 values";
  if (bytes.size() < 12) throw InputError("'" + path + "' is truncated; " + expected);
  const std::uint32_t h = read_u32_le(bytes.data() + 4);
  const std::uint32_t w = read_u32_le(bytes.data() + 8);
  if (h == 0 || w == 0 || bytes.size() != 12 + 4ULL * h * w) {
    throw InputError("'" + path + "' has a size inconsistent with its " + std::to_string(h) + "x" +
                     std::to_string(w) + " header; " + expected);
  }
  Eigen::MatrixXd out(h, w);
  for (std::uint32_t y = 0; y < h; ++y) {
    for (std::uint32_t x = 0; x < w; ++x) {
      const std::uint32_t bits = read_u32_le(bytes.data() + 12 + 4 * (static_cast<std::size_t>(y) * w + x));
      const float v = std::bit_cast<float>(bits);
      if (!std::isfinite(v)) throw InputError("'" + path + "' contains non-finite values");
      out(y, x) = v;
    }
  }
  return out;
}

}  // namespace

Eigen::MatrixXd read_raw_map(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open attention map '" + path + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), "ATTN", 4) == 0) return read_attn(path, bytes);
  static const unsigned char png_sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), png_sig, 8) == 0) return read_png_gray(path);
  throw InputError("'" + path +
                   "' is neither a grayscale PNG nor an ATTN float matrix (magic 'ATTN')");
}

void write_attn_file(const Eigen::MatrixXd& values, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot write '" + path + "'");
  os.write("ATTN", 4);
  write_u32_le(os, static_cast<std::uint32_t>(values.rows()));
  write_u32_le(os, static_cast<std::uint32_t>(values.cols()));
  for (Eigen::Index y = 0; y < values.rows(); ++y) {
    for (Eigen::Index x = 0; x < values.cols(); ++x) {
      write_u32_le(os, std::bit_cast<std::uint32_t>(static_cast<float>(values(y, x))));
    }
  }
  if (!os) throw InputError("failed writing '" + path + "'");
}

AttentionMap load_map_from_file(const std::string& path, CanvasSize canvas) {
  const Eigen::MatrixXd raw = read_raw_map(path).cwiseMax(0.0);
  return {softmax(resize_bilinear(raw, canvas.height, canvas.width))};
}

Raster reference_from_map(const Eigen::MatrixXd& raw, CanvasSize canvas) {
  const Eigen::MatrixXd m = resize_bilinear(raw.cwiseMax(0.0), canvas.height, canvas.width);
  const double peak = m.maxCoeff();
  Raster out(canvas.width, canvas.height, 1.0);
  if (peak <= 0.0) return out;
  for (int y = 0; y < canvas.height; ++y) {
    for (int x = 0; x < canvas.width; ++x) {
      for (int c = 0; c < Raster::kChannels; ++c) out(y, x, c) = 1.0 - m(y, x) / peak;
    }
  }
  return out;
}

namespace {

Raster load_reference(const std::optional<std::string>& path, const Eigen::MatrixXd& raw,
                      CanvasSize canvas) {
  if (!path) return reference_from_map(raw, canvas);
  Raster ref = read_png_rgb(*path);
  if (ref.width() != canvas.width || ref.height() != canvas.height) {
    throw InputError("reference image '" + *path + "' is " + std::to_string(ref.width()) + "x" +
                     std::to_string(ref.height()) + ", expected the canvas size " +
                     std::to_string(canvas.width) + "x" + std::to_string(canvas.height));
  }
  return ref;
}

}  // namespace

UniformAttentionProvider::UniformAttentionProvider(CanvasSize canvas,
                                                   std::optional<std::string> reference_path)
    : canvas_(canvas), reference_path_(std::move(reference_path)) {}

AttentionResult UniformAttentionProvider::attend(const std::string&, const std::string&,
                                                 std::uint64_t) {
  AttentionResult r;
  r.raw_maps.push_back(Eigen::MatrixXd::Ones(canvas_.height, canvas_.width));
  r.reference = reference_path_ ? load_reference(reference_path_, r.raw_maps.front(), canvas_)
                                : Raster(canvas_.width, canvas_.height, 1.0);
  return r;
}

FileAttentionProvider::FileAttentionProvider(std::string map_path, CanvasSize canvas,
                                             std::optional<std::string> reference_path)
    : map_path_(std::move(map_path)), canvas_(canvas), reference_path_(std::move(reference_path)) {}

AttentionResult FileAttentionProvider::attend(const std::string&, const std::string&,
                                              std::uint64_t) {
  AttentionResult r;
  r.raw_maps.push_back(read_raw_map(map_path_).cwiseMax(0.0));
  r.reference = load_reference(reference_path_, r.raw_maps.front(), canvas_);
  return r;
}

}  // namespace primdraw
