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

#include "cxrcl/imaging/image.hpp"

#include <cmath>
#include <string>

#include "cxrcl/error.hpp"

namespace cxrcl {

Image::Image(std::size_t width, std::size_t height)
    : Image(width, height, std::vector<double>(width * height, 0.0)) {}

Image::Image(std::size_t width, std::size_t height, std::vector<double> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  require(width >= 1 && height >= 1, ErrorCode::kInvalidArgument,
          "image dimensions must be at least 1x1");
  require(pixels_.size() == width * height, ErrorCode::kInvalidArgument,
          "pixel count " + std::to_string(pixels_.size()) + " does not match " +
              std::to_string(width) + "x" + std::to_string(height));
  for (double p : pixels_) {
    require(std::isfinite(p) && p >= 0.0 && p <= 1.0, ErrorCode::kInvalidArgument,
            "pixel value outside [0,1]");
  }
}

Image Image::filled(std::size_t width, std::size_t height, double value) {
  return Image(width, height, std::vector<double>(width * height, value));
}

ClassLabel label_from_ordinal(int value) {
  require(value >= 0 && value < static_cast<int>(kNumClasses), ErrorCode::kInvalidArgument,
          "class ordinal out of range: " + std::to_string(value));
  return static_cast<ClassLabel>(value);
}

std::string_view label_name(ClassLabel label) noexcept {
  switch (label) {
    case ClassLabel::kCovid19: return "COVID-19";
    case ClassLabel::kNormal: return "Normal";
    case ClassLabel::kPneumonia: return "Pneumonia";
  }
  return "COVID-19";
}

std::optional<ClassLabel> parse_label(std::string_view name) noexcept {
  for (ClassLabel label : kAllLabels) {
    if (label_name(label) == name) return label;
  }
  return std::nullopt;
}

}  // namespace cxrcl
