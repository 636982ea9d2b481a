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

#include "cxrcl/imaging/preprocess.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "cxrcl/error.hpp"

namespace cxrcl {

Image resize(const Image& img, std::size_t target_width, std::size_t target_height) {
  require(target_width >= 1 && target_height >= 1, ErrorCode::kInvalidArgument,
          "resize target must be at least 1x1");
  if (target_width == img.width() && target_height == img.height()) return img;

  const double sx = static_cast<double>(img.width()) / static_cast<double>(target_width);
  const double sy = static_cast<double>(img.height()) / static_cast<double>(target_height);
  const double max_x = static_cast<double>(img.width() - 1);
  const double max_y = static_cast<double>(img.height() - 1);

  std::vector<double> out(target_width * target_height);
  for (std::size_t y = 0; y < target_height; ++y) {
    const double fy = std::clamp((static_cast<double>(y) + 0.5) * sy - 0.5, 0.0, max_y);
    const auto y0 = static_cast<std::size_t>(std::floor(fy));
    const std::size_t y1 = std::min(y0 + 1, img.height() - 1);
    const double wy = fy - static_cast<double>(y0);
    for (std::size_t x = 0; x < target_width; ++x) {
      const double fx = std::clamp((static_cast<double>(x) + 0.5) * sx - 0.5, 0.0, max_x);
      const auto x0 = static_cast<std::size_t>(std::floor(fx));
      const std::size_t x1 = std::min(x0 + 1, img.width() - 1);
      const double wx = fx - static_cast<double>(x0);
      const double top = img.at(x0, y0) * (1.0 - wx) + img.at(x1, y0) * wx;
      const double bottom = img.at(x0, y1) * (1.0 - wx) + img.at(x1, y1) * wx;
      out[y * target_width + x] = std::clamp(top * (1.0 - wy) + bottom * wy, 0.0, 1.0);
    }
  }
  return Image(target_width, target_height, std::move(out));
}

Image center_crop(const Image& img, double fraction) {
  require(fraction > 0.0 && fraction <= 1.0, ErrorCode::kInvalidArgument,
          "crop fraction must lie in (0, 1]");
  if (fraction == 1.0) return img;
  // The epsilon keeps products such as 0.7 * 10 = 7.000000000000001 from
  // rounding up a whole pixel.
  auto window = [fraction](std::size_t extent) {
    const double scaled = std::ceil(fraction * static_cast<double>(extent) - 1e-9);
    return std::clamp<std::size_t>(static_cast<std::size_t>(scaled), 1, extent);
  };
  const std::size_t w = window(img.width());
  const std::size_t h = window(img.height());
  const std::size_t x0 = (img.width() - w) / 2;
  const std::size_t y0 = (img.height() - h) / 2;

  std::vector<double> out;
  out.reserve(w * h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) out.push_back(img.at(x0 + x, y0 + y));
  }
  return Image(w, h, std::move(out));
}

Image equalize(const Image& img) {
  constexpr int kLevels = 256;
  std::vector<int> level(img.size());
  std::array<std::size_t, kLevels> cdf{};
  for (std::size_t i = 0; i < img.size(); ++i) {
    level[i] = static_cast<int>(std::lround(img.pixels()[i] * 255.0));
    ++cdf[static_cast<std::size_t>(level[i])];
  }
  for (int v = 1; v < kLevels; ++v) cdf[v] += cdf[v - 1];

  const std::size_t n = img.size();
  std::size_t cdf_min = 0;
  for (std::size_t c : cdf) {
    if (c != 0) {
      cdf_min = c;
      break;
    }
  }
  if (cdf_min == n) return img;

  std::array<double, kLevels> mapped{};
  const double denom = static_cast<double>(n - cdf_min);
  for (int v = 0; v < kLevels; ++v) {
    const double c = cdf[v] < cdf_min ? 0.0 : static_cast<double>(cdf[v] - cdf_min);
    mapped[v] = static_cast<double>(std::lround(c / denom * 255.0)) / 255.0;
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = mapped[static_cast<std::size_t>(level[i])];
  return Image(img.width(), img.height(), std::move(out));
}

Image apply_mask(const Image& img, const Image& mask) {
  require(img.width() == mask.width() && img.height() == mask.height(),
          ErrorCode::kInvalidArgument, "mask dimensions do not match image");
  std::vector<double> out(img.size());
  for (std::size_t i = 0; i < img.size(); ++i) {
    out[i] = mask.pixels()[i] >= 0.5 ? img.pixels()[i] : 0.0;
  }
  return Image(img.width(), img.height(), std::move(out));
}

std::string_view strategy_name(Strategy strategy) noexcept {
  switch (strategy) {
    case Strategy::kOriginal: return "original";
    case Strategy::kCropped: return "cropped";
    case Strategy::kSegmented: return "segmented";
  }
  return "original";
}

std::optional<Strategy> parse_strategy(std::string_view name) noexcept {
  for (Strategy s : {Strategy::kOriginal, Strategy::kCropped, Strategy::kSegmented}) {
    if (strategy_name(s) == name) return s;
  }
  return std::nullopt;
}

Image preprocess(const Image& img, const PreprocessConfig& config, const Image* mask) {
  Image out = img;
  switch (config.strategy) {
    case Strategy::kOriginal:
      break;
    case Strategy::kCropped:
      out = resize(center_crop(img, config.crop_fraction), img.width(), img.height());
      break;
    case Strategy::kSegmented: {
      require(mask != nullptr, ErrorCode::kInvalidArgument,
              "segmented strategy requires a mask");
      const Image fitted = resize(*mask, img.width(), img.height());
      out = apply_mask(img, fitted);
      break;
    }
  }
  if (config.equalize) out = equalize(out);
  return out;
}

}  // namespace cxrcl
