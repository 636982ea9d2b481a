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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cxrcl/imaging/image.hpp"
#include "cxrcl/imaging/preprocess.hpp"

namespace cxrcl {

struct SampleRef {
  std::string id;
  std::filesystem::path image_path;  // resolved against the manifest directory
  std::optional<std::filesystem::path> mask_path;
  ClassLabel label = ClassLabel::kCovid19;

  friend bool operator==(const SampleRef&, const SampleRef&) = default;
};

struct DatasetManifest {
  std::vector<SampleRef> train;
  std::vector<SampleRef> validation;
  std::vector<SampleRef> test;
  Strategy strategy = Strategy::kOriginal;
  bool equalize = false;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

/// Parses a manifest. Errors: kNotFound (missing file), kParse (malformed
/// record or duplicate id within a split), kSplitOverlap (an id in two
/// splits). Each split is sorted by id. An empty or whitespace-only file is an
/// empty manifest.
DatasetManifest load_manifest(const std::filesystem::path& path);

/// Writes paths relative to the manifest's own directory when possible.
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

/// Loads images for a split and resizes them to the network raster.
std::vector<Sample> load_samples(const std::vector<SampleRef>& refs, std::size_t width,
                                 std::size_t height);

}  // namespace cxrcl
