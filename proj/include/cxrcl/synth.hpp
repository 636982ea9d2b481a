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
#include <cstdint>
#include <random>
#include <vector>

#include "cxrcl/imaging/image.hpp"

// Procedural fixtures: chest-radiograph-like rasters for the screening and
// validator models, non-radiograph negatives, and a drifting Gaussian-blob
// stream for desk-scale continual-learning runs.
namespace cxrcl::synth {

/// Body silhouette with two lung fields. Class cues: COVID-19 adds diffuse
/// bilateral lower-zone haze, Pneumonia a dense unilateral consolidation,
/// Normal leaves the fields clear.
Image xray_like(ClassLabel label, std::size_t width, std::size_t height, std::mt19937_64& rng);

/// Binary lung-field mask from the nominal xray_like geometry.
Image lung_mask(std::size_t width, std::size_t height);

/// One of: uniform noise, checkerboard, linear ramp, random rectangles.
Image non_xray(std::size_t width, std::size_t height, std::mt19937_64& rng);

struct BlobStreamConfig {
  std::size_t width = 32;
  std::size_t height = 32;
  std::size_t classes = 3;
  std::size_t experiences = 10;
  std::size_t train_per_experience = 60;
  std::size_t validation_per_experience = 6;
  std::size_t test_per_experience = 30;
  // Class centres sit on a ring around the image centre; every experience
  // rotates the ring by drift_degrees.
  double ring_radius = 9.0;
  double blob_sigma = 3.0;
  double blob_amplitude = 0.6;
  double drift_degrees = 8.0;
  double noise_sigma = 0.15;
  double background = 0.2;
  std::uint64_t seed = 0;
};

struct BlobStream {
  std::vector<std::vector<Sample>> experiences;  // training data per stage
  std::vector<Sample> validation;                // pooled over stages
  std::vector<Sample> test;                      // pooled over stages
};

BlobStream make_blob_stream(const BlobStreamConfig& config);

}  // namespace cxrcl::synth
