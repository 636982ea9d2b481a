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

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cxrcl {

/// Grayscale raster, row-major, intensities in [0, 1].
class Image {
 public:
  Image() = default;
  /// Zero-filled image. Throws kInvalidArgument if a dimension is zero.
  Image(std::size_t width, std::size_t height);
  /// Validates dimensions, length, and pixel range.
  Image(std::size_t width, std::size_t height, std::vector<double> pixels);

  static Image filled(std::size_t width, std::size_t height, double value);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return pixels_.size(); }
  bool empty() const noexcept { return pixels_.empty(); }

  double at(std::size_t x, std::size_t y) const { return pixels_[y * width_ + x]; }
  std::span<const double> pixels() const noexcept { return pixels_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<double> pixels_;
};

// Ordinals are part of the checkpoint and report formats; do not reorder.
enum class ClassLabel : int { kCovid19 = 0, kNormal = 1, kPneumonia = 2 };

inline constexpr std::size_t kNumClasses = 3;
inline constexpr std::array<ClassLabel, kNumClasses> kAllLabels = {
    ClassLabel::kCovid19, ClassLabel::kNormal, ClassLabel::kPneumonia};

constexpr int ordinal(ClassLabel label) noexcept { return static_cast<int>(label); }

/// Throws kInvalidArgument outside [0, kNumClasses).
ClassLabel label_from_ordinal(int ordinal);

/// Wire names: "COVID-19", "Normal", "Pneumonia".
std::string_view label_name(ClassLabel label) noexcept;
std::optional<ClassLabel> parse_label(std::string_view name) noexcept;

struct Sample {
  Image image;
  // Ordinal class index. Screening samples use ClassLabel ordinals; the
  // validator and synthetic fixtures may use their own class sets.
  int label = 0;
  std::string source_id;
};

}  // namespace cxrcl
