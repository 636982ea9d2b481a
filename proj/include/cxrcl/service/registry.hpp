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
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cxrcl/cl/strategy.hpp"
#include "cxrcl/imaging/image.hpp"
#include "cxrcl/imaging/preprocess.hpp"
#include "cxrcl/nn/network.hpp"
#include "cxrcl/nn/trainer.hpp"

namespace cxrcl::service {

// Validator output indices.
inline constexpr int kNotXray = 0;
inline constexpr int kChestXray = 1;
inline constexpr double kValidatorThreshold = 0.5;

struct Raster {
  std::size_t width = 32;
  std::size_t height = 32;
  friend bool operator==(const Raster&, const Raster&) = default;
};

/// Input raster recorded in a checkpoint's meta, or the square one implied by
/// the input width. Throws kIntegrity if neither fits.
Raster raster_of(const nlohmann::json& meta, std::size_t input_size);

/// Two-class validator fitted on chest X-ray positives and non-X-ray
/// negatives (labels kChestXray / kNotXray).
nn::FitResult train_validator(std::span<const Image> positives, std::span<const Image> negatives,
                              const nn::NetworkConfig& config, const nn::TrainConfig& train);

/// Checkpoint helpers that stamp the kind and raster into the meta.
void save_screening_checkpoint(const std::filesystem::path& path, const nn::Network& net, Raster raster,
                               const cl::ContinualStrategy* strategy = nullptr,
                               nlohmann::json extra = nlohmann::json::object());
void save_validator_checkpoint(const std::filesystem::path& path, const nn::Network& net, Raster raster);

struct RegistryConfig {
  std::filesystem::path screening_checkpoint;
  std::filesystem::path validator_checkpoint;
  std::filesystem::path checkpoint_dir;  // versioned history, written after each learn
  // Used when the loaded screening checkpoint carries no strategy state.
  cl::StrategyConfig strategy = [] {
    cl::StrategyConfig c;
    c.kind = cl::StrategyKind::kLwf;
    return c;
  }();
  nn::TrainConfig learn = [] {
    nn::TrainConfig t;
    t.max_epochs = 1;
    t.batch_size = 1;
    t.patience = 0;
    return t;
  }();
  PreprocessConfig preprocess{Strategy::kOriginal, false};
};

struct ValidationResult {
  bool valid = false;
  double confidence = 0.0;  // probability of the chest X-ray class
};

struct CheckpointInfo {
  std::uint64_t version = 0;
  std::filesystem::path path;
  std::string created_at;
};

/// Owns the live screening model (Classifier 2) with its strategy state and
/// the validator (Classifier 1). Not thread-safe; the service worker is the
/// only caller of learn().
class ModelRegistry {
 public:
  /// kNotFound naming the missing artifact; checkpoint errors propagate.
  static ModelRegistry open(const RegistryConfig& config);

  /// Preprocessing and resizing to the model raster.
  Image prepare(const Image& raw) const;
  ValidationResult validate_cxr(const Image& prepared) const;
  nn::ScreeningPrediction predict(const Image& prepared) const;

  struct LearnOutcome {
    std::uint64_t version = 0;
    std::uint64_t checksum_before = 0;
    std::uint64_t checksum_after = 0;
  };
  /// One single-sample continual update, then an immutable checkpoint.
  /// `stamp` is recorded in the checkpoint meta.
  LearnOutcome learn(const Image& prepared, ClassLabel label, const std::string& source_id,
                     const nlohmann::json& stamp);

  std::uint64_t version() const noexcept { return version_; }
  const std::vector<CheckpointInfo>& history() const noexcept { return history_; }
  const nn::Network& screening() const noexcept { return screening_; }
  const nn::Network& validator() const noexcept { return validator_; }
  const cl::ContinualStrategy& strategy() const noexcept { return *strategy_; }
  Raster raster() const noexcept { return raster_; }
  /// Meta of the checkpoint the live model came from.
  const nlohmann::json& loaded_meta() const noexcept { return loaded_meta_; }

 private:
  ModelRegistry() = default;

  RegistryConfig config_;
  nn::Network screening_ = nn::Network::zeros(nn::NetworkConfig{{1, 3}, 0});
  nn::Network validator_ = nn::Network::zeros(nn::NetworkConfig{{1, 2}, 0});
  std::unique_ptr<cl::ContinualStrategy> strategy_;
  Raster raster_;
  std::uint64_t version_ = 0;
  std::vector<CheckpointInfo> history_;
  nlohmann::json loaded_meta_;
};

}  // namespace cxrcl::service
