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

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "cxrcl/imaging/image.hpp"

namespace cxrcl::testing {

// Removes the directory on destruction.
class TempDir {
 public:
  TempDir() {
    static std::uint64_t counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("cxrcl-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline Image image_from_levels(std::size_t w, std::size_t h, const std::vector<int>& levels) {
  std::vector<double> px;
  for (int v : levels) px.push_back(v / 255.0);
  return Image(w, h, std::move(px));
}

inline std::vector<int> levels_of(const Image& img) {
  std::vector<int> out;
  for (double p : img.pixels()) out.push_back(static_cast<int>(p * 255.0 + 0.5));
  return out;
}

inline Image random_image(std::size_t w, std::size_t h, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> px(w * h);
  for (double& p : px) p = u(rng);
  return Image(w, h, std::move(px));
}

inline Sample random_sample(std::size_t w, std::size_t h, int label, std::mt19937_64& rng,
                            std::string id) {
  return Sample{random_image(w, h, rng), label, std::move(id)};
}

// Linearly separable two-class fixture: class 0 bright on the left half,
// class 1 bright on the right half.
inline std::vector<Sample> separable_set(std::size_t n, std::size_t side, std::uint64_t seed,
                                         const std::string& tag) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> noise(0.0, 0.2);
  std::vector<Sample> out;
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 2);
    std::vector<double> px(side * side);
    for (std::size_t y = 0; y < side; ++y) {
      for (std::size_t x = 0; x < side; ++x) {
        const bool left = x < side / 2;
        px[y * side + x] = ((left && label == 0) || (!left && label == 1)) ? 0.8 + noise(rng) : noise(rng);
      }
    }
    out.push_back({Image(side, side, std::move(px)), label, tag + std::to_string(i)});
  }
  return out;
}

}  // namespace cxrcl::testing
