/*
 * Copyright 2026 The cxrcl Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cxrcl/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "cxrcl/error.hpp"

namespace cxrcl::synth {
namespace {

struct Ellipse {
  double cx, cy, rx, ry;
  double inside(double x, double y) const {
    const double dx = (x - cx) / rx;
    const double dy = (y - cy) / ry;
    return dx * dx + dy * dy;
  }
};

// Nominal geometry in unit coordinates.
constexpr Ellipse kBody{0.5, 0.55, 0.42, 0.48};
constexpr Ellipse kLeftLung{0.33, 0.5, 0.13, 0.28};
constexpr Ellipse kRightLung{0.67, 0.5, 0.13, 0.28};

double smooth_edge(double r2) { return 1.0 / (1.0 + std::exp(12.0 * (r2 - 1.0))); }

}  // namespace

Image xray_like(ClassLabel label, std::size_t width, std::size_t height, std::mt19937_64& rng) {
  std::normal_distribution<double> jitter(0.0, 0.015);
  std::normal_distribution<double> noise(0.0, 0.03);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Ellipse left = kLeftLung;
  Ellipse right = kRightLung;
  left.cx += jitter(rng);
  right.cx += jitter(rng);
  left.cy += jitter(rng);
  right.cy = left.cy;
  const double brightness = 0.75 + 0.1 * unit(rng);
  const double rib_phase = unit(rng) * 2.0 * std::numbers::pi;

  // Pneumonia consolidation: one dense patch in a random lung.
  const Ellipse& patch_lung = unit(rng) < 0.5 ? left : right;
  const Ellipse patch{patch_lung.cx + 0.04 * (unit(rng) - 0.5), patch_lung.cy + 0.1 * unit(rng),
                      0.07, 0.09};

  std::vector<double> px(width * height);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      const double u = (static_cast<double>(x) + 0.5) / static_cast<double>(width);
      const double v = (static_cast<double>(y) + 0.5) / static_cast<double>(height);
      double value = 0.05 + brightness * smooth_edge(kBody.inside(u, v));
      const double lung = std::max(smooth_edge(left.inside(u, v)), smooth_edge(right.inside(u, v)));
      value -= 0.5 * lung;
      value += 0.06 * lung * std::sin(v * 40.0 + rib_phase);  // ribs
      switch (label) {
        case ClassLabel::kCovid19:
          // Peripheral, lower-zone ground-glass haze in both lungs.
          value += 0.3 * lung * std::clamp((v - 0.45) * 3.0, 0.0, 1.0);
          break;
        case ClassLabel::kPneumonia:
          value += 0.45 * smooth_edge(patch.inside(u, v));
          break;
        case ClassLabel::kNormal:
          break;
      }
      px[y * width + x] = std::clamp(value + noise(rng), 0.0, 1.0);
    }
  }
  return Image(width, height, std::move(px));
}

Image lung_mask(std::size_t width, std::size_t height) {
  std::vector<double> px(width * height);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      const double u = (static_cast<double>(x) + 0.5) / static_cast<double>(width);
      const double v = (static_cast<double>(y) + 0.5) / static_cast<double>(height);
      const bool in = kLeftLung.inside(u, v) <= 1.3 || kRightLung.inside(u, v) <= 1.3;
      px[y * width + x] = in ? 1.0 : 0.0;
    }
  }
  return Image(width, height, std::move(px));
}

Image non_xray(std::size_t width, std::size_t height, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> px(width * height);
  const int kind = static_cast<int>(unit(rng) * 4.0);
  switch (kind) {
    case 0:
      for (double& p : px) p = unit(rng);
      break;
    case 1: {
      const std::size_t cell = 1 + static_cast<std::size_t>(unit(rng) * 6.0);
      for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < width; ++x) px[y * width + x] = ((x / cell + y / cell) % 2) ? 0.9 : 0.1;
      }
      break;
    }
    case 2: {
      const double angle = unit(rng) * 2.0 * std::numbers::pi;
      for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < width; ++x) {
          const double u = static_cast<double>(x) / static_cast<double>(width);
          const double v = static_cast<double>(y) / static_cast<double>(height);
          px[y * width + x] = std::clamp(0.5 + 0.5 * (u * std::cos(angle) + v * std::sin(angle)) +
                                             0.05 * (unit(rng) - 0.5), 0.0, 1.0);
        }
      }
      break;
    }
    default: {
      std::fill(px.begin(), px.end(), unit(rng));
      for (int r = 0; r < 6; ++r) {
        const auto x0 = static_cast<std::size_t>(unit(rng) * static_cast<double>(width));
        const auto y0 = static_cast<std::size_t>(unit(rng) * static_cast<double>(height));
        const auto x1 = std::min(width, x0 + 1 + static_cast<std::size_t>(unit(rng) * static_cast<double>(width) / 2));
        const auto y1 = std::min(height, y0 + 1 + static_cast<std::size_t>(unit(rng) * static_cast<double>(height) / 2));
        const double shade = unit(rng);
        for (std::size_t y = y0; y < y1; ++y) {
          for (std::size_t x = x0; x < x1; ++x) px[y * width + x] = shade;
        }
      }
      break;
    }
  }
  return Image(width, height, std::move(px));
}

BlobStream make_blob_stream(const BlobStreamConfig& config) {
  require(config.classes >= 2 && config.experiences >= 1 && config.train_per_experience >= 1,
          ErrorCode::kInvalidArgument, "blob stream needs >=2 classes and >=1 sample per experience");
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> noise(0.0, config.noise_sigma);
  const double cx = static_cast<double>(config.width - 1) / 2.0;
  const double cy = static_cast<double>(config.height - 1) / 2.0;

  auto draw = [&](std::size_t stage, int label, const std::string& id) {
    const double angle = 2.0 * std::numbers::pi * label / static_cast<double>(config.classes) +
                         config.drift_degrees * static_cast<double>(stage) * std::numbers::pi / 180.0;
    const double bx = cx + config.ring_radius * std::cos(angle);
    const double by = cy + config.ring_radius * std::sin(angle);
    const double inv = 1.0 / (2.0 * config.blob_sigma * config.blob_sigma);
    std::vector<double> px(config.width * config.height);
    for (std::size_t y = 0; y < config.height; ++y) {
      for (std::size_t x = 0; x < config.width; ++x) {
        const double dx = static_cast<double>(x) - bx;
        const double dy = static_cast<double>(y) - by;
        const double v = config.background + config.blob_amplitude * std::exp(-(dx * dx + dy * dy) * inv);
        px[y * config.width + x] = std::clamp(v + noise(rng), 0.0, 1.0);
      }
    }
    return Sample{Image(config.width, config.height, std::move(px)), label, id};
  };

  BlobStream stream;
  auto fill = [&](std::vector<Sample>& out, std::size_t stage, std::size_t count, const char* tag) {
    for (std::size_t i = 0; i < count; ++i) {
      const int label = static_cast<int>(i % config.classes);
      out.push_back(draw(stage, label,
                         std::string(tag) + "-" + std::to_string(stage) + "-" + std::to_string(i)));
    }
  };
  for (std::size_t stage = 0; stage < config.experiences; ++stage) {
    auto& exp = stream.experiences.emplace_back();
    fill(exp, stage, config.train_per_experience, "train");
    fill(stream.validation, stage, config.validation_per_experience, "val");
    fill(stream.test, stage, config.test_per_experience, "test");
  }
  return stream;
}

}  // namespace cxrcl::synth
