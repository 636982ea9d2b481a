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
#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "cxrcl/error.hpp"
#include "cxrcl/nn/network.hpp"
#include "cxrcl/nn/trainer.hpp"

namespace cxrcl::tools {

inline nlohmann::json read_config(const std::optional<std::filesystem::path>& path) {
  if (!path) return nlohmann::json::object();
  std::ifstream in(*path);
  require(static_cast<bool>(in), ErrorCode::kNotFound, "config file not found: " + path->string());
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  require(!doc.is_discarded() && doc.is_object(), ErrorCode::kParse,
          "config file is not a JSON object: " + path->string());
  return doc;
}

// Relative paths in a config file are taken from the file's directory.
inline std::filesystem::path config_path(const nlohmann::json& cfg, const char* key,
                                         const std::optional<std::filesystem::path>& config_file) {
  require(cfg.contains(key) && cfg[key].is_string(), ErrorCode::kInvalidArgument,
          std::string("config is missing '") + key + "'");
  std::filesystem::path p = cfg[key].get<std::string>();
  if (p.is_relative() && config_file) p = config_file->parent_path() / p;
  return p;
}

inline std::optional<std::filesystem::path> optional_path(const nlohmann::json& cfg, const char* key,
                                                          const std::optional<std::filesystem::path>& config_file) {
  if (!cfg.contains(key) || cfg[key].is_null()) return std::nullopt;
  return config_path(cfg, key, config_file);
}

/// {"epochs", "batch_size", "learning_rate", "patience"} over `base`.
inline nn::TrainConfig train_config(const nlohmann::json& block, nn::TrainConfig base = {}) {
  if (block.is_object()) {
    base.max_epochs = block.value("epochs", base.max_epochs);
    base.batch_size = block.value("batch_size", base.batch_size);
    base.learning_rate = block.value("learning_rate", base.learning_rate);
    base.patience = block.value("patience", base.patience);
  }
  base.validate();
  return base;
}

}  // namespace cxrcl::tools
