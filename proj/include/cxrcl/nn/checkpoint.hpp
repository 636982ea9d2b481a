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

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "cxrcl/nn/network.hpp"

namespace cxrcl::nn {

inline constexpr int kCheckpointVersion = 1;

/// Extra float payload appended after the network parameters.
struct CheckpointSection {
  std::string name;
  std::vector<float> values;

  friend bool operator==(const CheckpointSection&, const CheckpointSection&) = default;
};

struct Checkpoint {
  Network network;
  std::string created_at;
  nlohmann::json meta;  // null when absent
  std::vector<CheckpointSection> sections;
};

// Layout: one JSON header line
//   {"version":1,"layer_sizes":[...],"seed":N,"created_at":"...",
//    "meta":{...}?,"sections":[{"name":..,"count":..}]?}
// then little-endian float32 parameters (W row-major then b, per layer),
// then each section's floats in header order.
void save_checkpoint(const std::filesystem::path& path, const Network& net,
                     const nlohmann::json& meta = nullptr,
                     const std::vector<CheckpointSection>& sections = {});

/// kNotFound, kParse (bad header), kUnsupportedVersion, kIntegrity (byte count).
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Header only, for inspection tooling.
nlohmann::json read_checkpoint_header(const std::filesystem::path& path);

}  // namespace cxrcl::nn
