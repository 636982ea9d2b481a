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

#include "cxrcl/service/registry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <regex>

#include "cxrcl/error.hpp"
#include "cxrcl/nn/checkpoint.hpp"

namespace cxrcl::service {

namespace fs = std::filesystem;
using nlohmann::json;

Raster raster_of(const json& meta, std::size_t input_size) {
  if (meta.is_object() && meta.contains("raster")) {
    const Raster r{meta["raster"].at(0).get<std::size_t>(), meta["raster"].at(1).get<std::size_t>()};
    require(r.width * r.height == input_size, ErrorCode::kIntegrity,
            "checkpoint raster does not match the network input width");
    return r;
  }
  const auto side = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(input_size))));
  require(side * side == input_size, ErrorCode::kIntegrity,
          "checkpoint has no raster and a non-square input width");
  return Raster{side, side};
}

nn::FitResult train_validator(std::span<const Image> positives, std::span<const Image> negatives,
                              const nn::NetworkConfig& config, const nn::TrainConfig& train) {
  require(!positives.empty() && !negatives.empty(), ErrorCode::kInvalidArgument,
          "validator training needs positives and negatives");
  require(config.layer_sizes.back() == 2, ErrorCode::kInvalidArgument, "validator must have two outputs");
  std::vector<Sample> samples;
  for (std::size_t i = 0; i < positives.size(); ++i) {
    samples.push_back({positives[i], kChestXray, "pos" + std::to_string(i)});
  }
  for (std::size_t i = 0; i < negatives.size(); ++i) {
    samples.push_back({negatives[i], kNotXray, "neg" + std::to_string(i)});
  }
  return nn::fit(nn::Network(config), samples, {}, train);
}

void save_screening_checkpoint(const fs::path& path, const nn::Network& net, Raster raster,
                               const cl::ContinualStrategy* strategy, json extra) {
  require(net.output_size() == kNumClasses, ErrorCode::kShapeMismatch, "screening network must have 3 outputs");
  json meta = std::move(extra);
  meta["kind"] = "screening";
  meta["raster"] = {raster.width, raster.height};
  std::vector<nn::CheckpointSection> sections;
  if (strategy != nullptr) {
    meta["strategy_state"] = strategy->state_meta();
    sections = strategy->state_sections();
  }
  nn::save_checkpoint(path, net, meta, sections);
}

void save_validator_checkpoint(const fs::path& path, const nn::Network& net, Raster raster) {
  require(net.output_size() == 2, ErrorCode::kShapeMismatch, "validator network must have 2 outputs");
  nn::save_checkpoint(path, net, json{{"kind", "validator"}, {"raster", {raster.width, raster.height}}});
}

namespace {

const std::regex kVersionName(R"(screening-v(\d{6})\.ckpt)");

fs::path version_path(const fs::path& dir, std::uint64_t version) {
  char name[32];
  std::snprintf(name, sizeof name, "screening-v%06llu.ckpt", static_cast<unsigned long long>(version));
  return dir / name;
}

}  // namespace

ModelRegistry ModelRegistry::open(const RegistryConfig& config) {
  require(fs::exists(config.validator_checkpoint), ErrorCode::kNotFound,
          "validator checkpoint not found: " + config.validator_checkpoint.string());
  ModelRegistry reg;
  reg.config_ = config;

  auto validator = nn::load_checkpoint(config.validator_checkpoint);
  require(validator.network.output_size() == 2, ErrorCode::kIntegrity, "validator checkpoint must have 2 outputs");
  const Raster vraster = raster_of(validator.meta, validator.network.input_size());
  reg.validator_ = std::move(validator.network);

  fs::path source = config.screening_checkpoint;
  if (!config.checkpoint_dir.empty()) {
    fs::create_directories(config.checkpoint_dir);
    for (const auto& entry : fs::directory_iterator(config.checkpoint_dir)) {
      std::smatch m;
      const std::string name = entry.path().filename().string();
      if (!std::regex_match(name, m, kVersionName)) continue;
      const auto v = std::stoull(m[1].str());
      reg.history_.push_back({v, entry.path(), nn::read_checkpoint_header(entry.path()).value("created_at", "")});
    }
    std::sort(reg.history_.begin(), reg.history_.end(),
              [](const CheckpointInfo& a, const CheckpointInfo& b) { return a.version < b.version; });
    if (!reg.history_.empty()) {
      source = reg.history_.back().path;
      reg.version_ = reg.history_.back().version;
    }
  }
  require(fs::exists(source), ErrorCode::kNotFound, "screening checkpoint not found: " + source.string());
  auto screening = nn::load_checkpoint(source);
  require(screening.network.output_size() == kNumClasses, ErrorCode::kIntegrity,
          "screening checkpoint must have 3 outputs");
  reg.raster_ = raster_of(screening.meta, screening.network.input_size());
  require(reg.raster_ == vraster, ErrorCode::kIntegrity, "validator and screening rasters differ");
  reg.loaded_meta_ = screening.meta.is_null() ? json::object() : screening.meta;

  if (reg.loaded_meta_.contains("strategy_state")) {
    const json& state = reg.loaded_meta_["strategy_state"];
    reg.strategy_ = cl::make_strategy(cl::parse_strategy_config(state.at("strategy")), screening.network.config());
    reg.strategy_->restore_state(state, screening.sections, screening.network);
  } else {
    reg.strategy_ = cl::make_strategy(config.strategy, screening.network.config());
  }
  reg.screening_ = std::move(screening.network);
  return reg;
}

Image ModelRegistry::prepare(const Image& raw) const {
  return resize(preprocess(raw, config_.preprocess), raster_.width, raster_.height);
}

ValidationResult ModelRegistry::validate_cxr(const Image& prepared) const {
  const auto p = nn::predict_probabilities(validator_, prepared);
  const double confidence = p.probabilities[kChestXray];
  return {confidence >= kValidatorThreshold, confidence};
}

nn::ScreeningPrediction ModelRegistry::predict(const Image& prepared) const {
  return nn::predict(screening_, prepared);
}

ModelRegistry::LearnOutcome ModelRegistry::learn(const Image& prepared, ClassLabel label,
                                                 const std::string& source_id, const json& stamp) {
  require(prepared.width() == raster_.width && prepared.height() == raster_.height, ErrorCode::kShapeMismatch,
          "learn image does not match the model raster");
  LearnOutcome out;
  out.checksum_before = nn::parameter_checksum(screening_);
  const std::vector<Sample> experience{{prepared, ordinal(label), source_id}};
  cl::TrainContext ctx;
  ctx.train = config_.learn;
  nn::Network next = screening_;
  auto next_strategy = cl::make_strategy(strategy_->config(), screening_.config());
  next_strategy->restore_state(strategy_->state_meta(), strategy_->state_sections(), screening_);
  next_strategy->train_experience(next, experience, ctx);

  // Persist first so a failed write leaves the live model untouched.
  const std::uint64_t version = version_ + 1;
  const fs::path path = version_path(config_.checkpoint_dir, version);
  require(!config_.checkpoint_dir.empty(), ErrorCode::kState, "registry has no checkpoint directory");
  require(!fs::exists(path), ErrorCode::kIntegrity, "checkpoint " + path.string() + " already exists");
  json extra = stamp.is_object() ? stamp : json::object();
  extra["version"] = version;
  save_screening_checkpoint(path, next, raster_, next_strategy.get(), extra);

  // The live state is whatever a restart would load.
  auto stored = nn::load_checkpoint(path);
  auto restored = cl::make_strategy(next_strategy->config(), stored.network.config());
  restored->restore_state(stored.meta.at("strategy_state"), stored.sections, stored.network);
  screening_ = std::move(stored.network);
  strategy_ = std::move(restored);
  version_ = version;
  loaded_meta_ = stored.meta;
  history_.push_back({version, path, stored.created_at});
  out.version = version;
  out.checksum_after = nn::parameter_checksum(screening_);
  return out;
}

}  // namespace cxrcl::service
