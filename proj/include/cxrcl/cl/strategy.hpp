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
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cxrcl/cl/ewc.hpp"
#include "cxrcl/cl/gem.hpp"
#include "cxrcl/cl/lwf.hpp"
#include "cxrcl/nn/checkpoint.hpp"
#include "cxrcl/nn/trainer.hpp"

namespace cxrcl::cl {

enum class StrategyKind { kNaive, kEwc, kLwf, kGdumb, kGem };

std::string_view kind_name(StrategyKind kind) noexcept;
std::optional<StrategyKind> parse_kind(std::string_view name) noexcept;
constexpr bool is_memory_based(StrategyKind kind) noexcept {
  return kind == StrategyKind::kGdumb || kind == StrategyKind::kGem;
}

struct StrategyConfig {
  StrategyKind kind = StrategyKind::kNaive;
  std::optional<std::size_t> capacity;  // k; present iff memory-based
  double ewc_lambda = kDefaultEwcLambda;
  bool ewc_separate_anchors = false;  // keep one (anchor, Fisher) pair per experience
  std::size_t fisher_samples = 256;
  double temperature = kDefaultTemperature;
  double lambda_o = kDefaultDistillationWeight;
  GemSolverConfig gem_solver;
  std::uint64_t seed = 0;

  void validate() const;
  /// e.g. "lwf", "gem(k=200)".
  std::string descriptor() const;
};

/// Reads {"method", "k"?, "lambda"?, "temperature"?, "lambda_o"?, ...}.
StrategyConfig parse_strategy_config(const nlohmann::json& block);
nlohmann::json to_json(const StrategyConfig& config);

struct TrainContext {
  nn::TrainConfig train;
  std::span<const Sample> validation;
  // Called with every sample set handed to a training call.
  nn::TrainHooks::AuditFn audit;
};

struct ExperienceLog {
  int experience = 0;  // 0-based position in the stream
  std::size_t samples = 0;
  std::size_t epochs = 0;
  int best_epoch = 0;
  double best_val_accuracy = 0.0;
  double final_train_loss = 0.0;
  std::size_t memory_size = 0;  // GEM/GDUMB only
};

/// Owns the per-method continual state for one live network.
class ContinualStrategy {
 public:
  explicit ContinualStrategy(StrategyConfig config) : config_(std::move(config)) {}
  virtual ~ContinualStrategy() = default;

  const StrategyConfig& config() const noexcept { return config_; }
  int experiences_seen() const noexcept { return experiences_seen_; }

  /// Trains on one experience in place. Throws kInvalidArgument if empty.
  ExperienceLog train_experience(nn::Network& net, std::span<const Sample> experience,
                                 const TrainContext& context);

  /// Checkpoint payload: JSON metadata plus float sections.
  virtual nlohmann::json state_meta() const;
  virtual std::vector<nn::CheckpointSection> state_sections() const { return {}; }
  virtual void restore_state(const nlohmann::json& meta,
                             const std::vector<nn::CheckpointSection>& sections,
                             const nn::Network& net);

  virtual std::size_t memory_size() const { return 0; }

 protected:
  virtual nn::FitResult run(nn::Network& net, std::span<const Sample> experience,
                            const TrainContext& context, const nn::TrainConfig& train) = 0;
  /// Runs after the trained parameters are installed in the live network.
  virtual void consolidate(const nn::Network&, std::span<const Sample>) {}
  std::uint64_t experience_seed(const TrainContext& context) const {
    return context.train.seed + static_cast<std::uint64_t>(experiences_seen_);
  }

  StrategyConfig config_;
  int experiences_seen_ = 0;
};

std::unique_ptr<ContinualStrategy> make_strategy(const StrategyConfig& config,
                                                 const nn::NetworkConfig& network);

/// Encodes samples as [label, pixels...] floats for checkpoint sections.
std::vector<float> pack_samples(std::span<const Sample> samples);
std::vector<Sample> unpack_samples(std::span<const float> values, std::size_t width,
                                   std::size_t height, const std::vector<std::string>& ids);

}  // namespace cxrcl::cl
