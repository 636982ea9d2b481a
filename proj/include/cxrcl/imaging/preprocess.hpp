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

#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

#include "cxrcl/imaging/image.hpp"

namespace cxrcl {

inline constexpr double kDefaultCropFraction = 0.8;

/// Bilinear resampling with pixel-centre alignment. Same-size requests return
/// an exact copy.
Image resize(const Image& img, std::size_t target_width, std::size_t target_height);

/// Central window of ceil(fraction*W) x ceil(fraction*H) pixels.
/// fraction must lie in (0, 1].
Image center_crop(const Image& img, double fraction);

/// 256-level histogram equalization. Single-level images pass through.
Image equalize(const Image& img);

/// Zeroes every pixel whose mask value is below 0.5.
Image apply_mask(const Image& img, const Image& mask);

enum class Strategy { kOriginal, kCropped, kSegmented };

std::string_view strategy_name(Strategy strategy) noexcept;
std::optional<Strategy> parse_strategy(std::string_view name) noexcept;

struct PreprocessConfig {
  Strategy strategy = Strategy::kOriginal;
  bool equalize = false;
  double crop_fraction = kDefaultCropFraction;
};

/// Runs one of the six dataset pipelines on a single image.
///
/// Cropping is followed by a resize back to the source raster, masking needs
/// `mask` (kInvalidArgument otherwise), and equalization runs last, after any
/// resize.
Image preprocess(const Image& img, const PreprocessConfig& config,
                 const Image* mask = nullptr);

}  // namespace cxrcl
