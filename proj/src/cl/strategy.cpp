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

#include "cxrcl/cl/strategy.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "cxrcl/cl/gdumb.hpp"
#include "cxrcl/error.hpp"
#include "cxrcl/random.hpp"

namespace cxrcl::cl {
namespace {

using nlohmann::json;

std::vector<float> to_floats(const nn::Parameters& p) {
  const nn::Vector flat = p.flatten();
  std::vector<float> out(static_cast<std::size_t>(flat.size()));
  for (Eigen::Index i = 0; i < flat.size(); ++i) out[static_cast<std::size_t>(i)] = static_cast<float>(flat[i]);
  return out;
}

nn::Parameters from_floats(const std::vector<float>& values, const nn::Parameters& shape) {
  require(values.size() == shape.count(), ErrorCode::kIntegrity,
          "strategy section size does not match the network");
  nn::Vector flat(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) flat[static_cast<Eigen::Index>(i)] = values[i];
  nn::Parameters p = nn::Parameters::zeros_like(shape);
  p.assign(flat);
  return p;
}

const nn::CheckpointSection& find_section(const std::vector<nn::CheckpointSection>& sections,
                                          const std::string& name) {
  const auto it = std::find_if(sections.begin(), sections.end(),
                               [&](const nn::CheckpointSection& s) { return s.name == name; });
  if (it == sections.end()) fail(ErrorCode::kIntegrity, "checkpoint lacks section " + name);
  return *it;
}

std::vector<std::string> ids_of(std::span<const Sample> samples) {
  std::vector<std::string> ids;
  for (const auto& s : samples) ids.push_back(s.source_id);
  return ids;
}

class NaiveStrategy final : public ContinualStrategy {
 public:
  using ContinualStrategy::ContinualStrategy;

 protected:
  nn::FitResult run(nn::Network& net, std::span<const Sample> experience,
                    const TrainContext& context, const nn::TrainConfig& train) override {
    nn::TrainHooks hooks;
    hooks.audit = context.audit;
    return nn::fit(net, experience, context.validation, train, hooks);
  }
};

class EwcStrategy final : public ContinualStrategy {
 public:
  using ContinualStrategy::ContinualStrategy;

  json state_meta() const override {
    json meta = ContinualStrategy::state_meta();
    meta["ewc_states"] = states_.size();
    return meta;
  }

  std::vector<nn::CheckpointSection> state_sections() const override {
    std::vector<nn::CheckpointSection> out;
    for (std::size_t i = 0; i < states_.size(); ++i) {
      out.push_back({"ewc.anchor." + std::to_string(i), to_floats(states_[i].anchor)});
      out.push_back({"ewc.fisher." + std::to_string(i), to_floats(states_[i].fisher)});
    }
    return out;
  }

  void restore_state(const json& meta, const std::vector<nn::CheckpointSection>& sections,
                     const nn::Network& net) override {
    ContinualStrategy::restore_state(meta, sections, net);
    states_.clear();
    const std::size_t n = meta.value("ewc_states", std::size_t{0});
    for (std::size_t i = 0; i < n; ++i) {
      EwcState st;
      st.lambda = config_.ewc_lambda;
      st.anchor = from_floats(find_section(sections, "ewc.anchor." + std::to_string(i)).values, net.parameters());
      st.fisher = from_floats(find_section(sections, "ewc.fisher." + std::to_string(i)).values, net.parameters());
      states_.push_back(std::move(st));
    }
  }

  const std::vector<EwcState>& states() const { return states_; }

 protected:
  nn::FitResult run(nn::Network& net, std::span<const Sample> experience,
                    const TrainContext& context, const nn::TrainConfig& train) override {
    nn::TrainHooks hooks;
    hooks.audit = context.audit;
    if (!states_.empty() && config_.ewc_lambda > 0.0) {
      hooks.regularizer = [this](const nn::Network& current, nn::Parameters& grads) {
        double total = 0.0;
        for (const auto& st : states_) {
          PenaltyResult pen = ewc_penalty(current, st);
          grads += pen.gradient;
          total += pen.penalty;
        }
        return total;
      };
    }
    return nn::fit(net, experience, context.validation, train, hooks);
  }

  void consolidate(const nn::Network& net, std::span<const Sample> experience) override {
    std::vector<std::size_t> order(experience.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(derive_seed(config_.seed, static_cast<std::uint64_t>(experiences_seen_)));
    std::shuffle(order.begin(), order.end(), rng);
    order.resize(std::min(order.size(), config_.fisher_samples));
    std::sort(order.begin(), order.end());
    std::vector<Sample> subset;
    subset.reserve(order.size());
    for (std::size_t i : order) subset.push_back(experience[i]);

    nn::Parameters fisher = estimate_fisher(net, subset);
    if (config_.ewc_separate_anchors || states_.empty()) {
      states_.push_back({net.parameters(), std::move(fisher), config_.ewc_lambda});
    } else {
      states_.front().fisher += fisher;
      states_.front().anchor = net.parameters();
    }
  }

 private:
  std::vector<EwcState> states_;
};

class LwfStrategy final : public ContinualStrategy {
 public:
  using ContinualStrategy::ContinualStrategy;

 protected:
  nn::FitResult run(nn::Network& net, std::span<const Sample> experience,
                    const TrainContext& context, const nn::TrainConfig& train) override {
    nn::TrainHooks hooks;
    hooks.audit = context.audit;
    // The first experience has no earlier model to distil from.
    if (experiences_seen_ > 0 && config_.lambda_o != 0.0) {
      const nn::Network teacher = net;
      auto teacher_logits = std::make_shared<nn::Matrix>(nn::infer_logits(teacher, nn::to_matrix(experience)));
      const double t = config_.temperature;
      const double weight = config_.lambda_o;
      hooks.loss = [teacher_logits, t, weight](const nn::Matrix& logits, std::span<const std::size_t> batch,
                                               std::span<const int> labels) {
        nn::Matrix batch_teacher(static_cast<Eigen::Index>(batch.size()), teacher_logits->cols());
        for (std::size_t i = 0; i < batch.size(); ++i) {
          batch_teacher.row(static_cast<Eigen::Index>(i)) = teacher_logits->row(static_cast<Eigen::Index>(batch[i]));
        }
        return lwf_loss(logits, batch_teacher, labels, t, weight);
      };
    }
    return nn::fit(net, experience, context.validation, train, hooks);
  }
};

class GemStrategy final : public ContinualStrategy {
 public:
  explicit GemStrategy(StrategyConfig config) : ContinualStrategy(std::move(config)) {
    state_.capacity = *config_.capacity;
    state_.seed = config_.seed;
  }

  std::size_t memory_size() const override { return state_.size(); }

  json state_meta() const override {
    json meta = ContinualStrategy::state_meta();
    json memory = json::array();
    std::size_t width = 0, height = 0;
    for (const auto& [id, samples] : state_.memory) {
      memory.push_back({{"id", id}, {"sources", ids_of(samples)}});
      if (!samples.empty()) {
        width = samples.front().image.width();
        height = samples.front().image.height();
      }
    }
    meta["gem"] = {{"experiences_seen", state_.experiences_seen},
                   {"width", width}, {"height", height}, {"memory", memory}};
    return meta;
  }

  std::vector<nn::CheckpointSection> state_sections() const override {
    std::vector<nn::CheckpointSection> out;
    for (const auto& [id, samples] : state_.memory) {
      out.push_back({"gem.memory." + std::to_string(id), pack_samples(samples)});
    }
    return out;
  }

  void restore_state(const json& meta, const std::vector<nn::CheckpointSection>& sections,
                     const nn::Network& net) override {
    ContinualStrategy::restore_state(meta, sections, net);
    state_.memory.clear();
    const json& gem = meta.at("gem");
    state_.experiences_seen = gem.at("experiences_seen").get<std::size_t>();
    const auto width = gem.at("width").get<std::size_t>();
    const auto height = gem.at("height").get<std::size_t>();
    for (const auto& entry : gem.at("memory")) {
      const int id = entry.at("id").get<int>();
      state_.memory[id] = unpack_samples(find_section(sections, "gem.memory." + std::to_string(id)).values,
                                         width, height, entry.at("sources").get<std::vector<std::string>>());
    }
  }

 protected:
  nn::FitResult run(nn::Network& net, std::span<const Sample> experience,
                    const TrainContext& context, const nn::TrainConfig& train) override {
    nn::TrainHooks hooks;
    hooks.audit = context.audit;
    if (state_.size() > 0) {
      hooks.transform_gradient = [this](const nn::Network& current, nn::Parameters& grads) {
        std::vector<nn::Vector> refs;
        refs.reserve(state_.memory.size());
        for (const auto& [id, samples] : state_.memory) {
          if (!samples.empty()) refs.push_back(nn::loss_gradient(current, samples).flatten());
        }
        grads.assign(gem_project(grads.flatten(), refs, config_.gem_solver));
      };
    }
    return nn::fit(net, experience, context.validation, train, hooks);
  }

  void consolidate(const nn::Network&, std::span<const Sample> experience) override {
    gem_store(state_, experiences_seen_, experience);
  }

 private:
  GemState state_;
};

class GdumbStrategy final : public ContinualStrategy {
 public:
  GdumbStrategy(StrategyConfig config, nn::NetworkConfig network)
      : ContinualStrategy(std::move(config)),
        network_(std::move(network)),
        state_(*config_.capacity, network_.layer_sizes.back(), config_.seed) {}

  std::size_t memory_size() const override { return state_.buffer.size(); }

  json state_meta() const override {
    json meta = ContinualStrategy::state_meta();
    const bool any = !state_.buffer.empty();
    meta["gdumb"] = {{"evictions", state_.evictions},
                     {"width", any ? state_.buffer.front().image.width() : 0},
                     {"height", any ? state_.buffer.front().image.height() : 0},
                     {"sources", ids_of(state_.buffer)}};
    return meta;
  }

  std::vector<nn::CheckpointSection> state_sections() const override {
    return {{"gdumb.buffer", pack_samples(state_.buffer)}};
  }

  void restore_state(const json& meta, const std::vector<nn::CheckpointSection>& sections,
                     const nn::Network& net) override {
    ContinualStrategy::restore_state(meta, sections, net);
    const json& g = meta.at("gdumb");
    state_.evictions = g.at("evictions").get<std::uint64_t>();
    state_.buffer = unpack_samples(find_section(sections, "gdumb.buffer").values,
                                   g.at("width").get<std::size_t>(), g.at("height").get<std::size_t>(),
                                   g.at("sources").get<std::vector<std::string>>());
    std::fill(state_.counts.begin(), state_.counts.end(), 0);
    for (const auto& s : state_.buffer) ++state_.counts.at(static_cast<std::size_t>(s.label));
  }

 protected:
  nn::FitResult run(nn::Network&, std::span<const Sample> experience, const TrainContext& context,
                    const nn::TrainConfig& train) override {
    for (const auto& sample : experience) gdumb_update(state_, sample);
    return gdumb_retrain(network_, state_, context.validation, train, context.audit);
  }

 private:
  nn::NetworkConfig network_;
  GdumbState state_;
};

}  // namespace

std::string_view kind_name(StrategyKind kind) noexcept {
  switch (kind) {
    case StrategyKind::kNaive: return "naive";
    case StrategyKind::kEwc: return "ewc";
    case StrategyKind::kLwf: return "lwf";
    case StrategyKind::kGdumb: return "gdumb";
    case StrategyKind::kGem: return "gem";
  }
  return "naive";
}

std::optional<StrategyKind> parse_kind(std::string_view name) noexcept {
  for (StrategyKind k : {StrategyKind::kNaive, StrategyKind::kEwc, StrategyKind::kLwf,
                         StrategyKind::kGdumb, StrategyKind::kGem}) {
    if (kind_name(k) == name) return k;
  }
  return std::nullopt;
}

void StrategyConfig::validate() const {
  if (is_memory_based(kind)) {
    require(capacity.has_value() && *capacity >= 1, ErrorCode::kInvalidArgument,
            std::string(kind_name(kind)) + " requires a positive memory capacity k");
  } else {
    require(!capacity.has_value(), ErrorCode::kInvalidArgument,
            std::string(kind_name(kind)) + " does not take a memory capacity");
  }
  require(ewc_lambda >= 0.0, ErrorCode::kInvalidArgument, "EWC lambda must be nonnegative");
  require(temperature > 0.0, ErrorCode::kInvalidArgument, "LwF temperature must be positive");
  require(lambda_o >= 0.0, ErrorCode::kInvalidArgument, "LwF weight must be nonnegative");
  require(fisher_samples >= 1, ErrorCode::kInvalidArgument, "fisher_samples must be positive");
}

std::string StrategyConfig::descriptor() const {
  std::string out(kind_name(kind));
  if (capacity) out += "(k=" + std::to_string(*capacity) + ")";
  return out;
}

StrategyConfig parse_strategy_config(const json& block) {
  require(block.is_object() && block.contains("method") && block["method"].is_string(),
          ErrorCode::kInvalidArgument, "strategy block needs a string 'method'");
  StrategyConfig cfg;
  const auto kind = parse_kind(block["method"].get<std::string>());
  require(kind.has_value(), ErrorCode::kInvalidArgument,
          "unknown strategy method '" + block["method"].get<std::string>() + "'");
  cfg.kind = *kind;
  try {
    if (block.contains("k") && !block["k"].is_null()) cfg.capacity = block["k"].get<std::size_t>();
    cfg.ewc_lambda = block.value("lambda", cfg.ewc_lambda);
    cfg.temperature = block.value("temperature", cfg.temperature);
    cfg.lambda_o = block.value("lambda_o", cfg.lambda_o);
    cfg.ewc_separate_anchors = block.value("separate_anchors", cfg.ewc_separate_anchors);
    cfg.fisher_samples = block.value("fisher_samples", cfg.fisher_samples);
    cfg.seed = block.value("seed", cfg.seed);
    cfg.gem_solver.tolerance = block.value("solver_tolerance", cfg.gem_solver.tolerance);
    cfg.gem_solver.max_iterations = block.value("solver_max_iterations", cfg.gem_solver.max_iterations);
  } catch (const json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("bad strategy field: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

json to_json(const StrategyConfig& cfg) {
  json out = {{"method", std::string(kind_name(cfg.kind))}};
  if (cfg.capacity) out["k"] = *cfg.capacity;
  out["lambda"] = cfg.ewc_lambda;
  out["temperature"] = cfg.temperature;
  out["lambda_o"] = cfg.lambda_o;
  out["separate_anchors"] = cfg.ewc_separate_anchors;
  out["fisher_samples"] = cfg.fisher_samples;
  out["seed"] = cfg.seed;
  out["solver_tolerance"] = cfg.gem_solver.tolerance;
  out["solver_max_iterations"] = cfg.gem_solver.max_iterations;
  return out;
}

ExperienceLog ContinualStrategy::train_experience(nn::Network& net, std::span<const Sample> experience,
                                                  const TrainContext& context) {
  require(!experience.empty(), ErrorCode::kInvalidArgument, "experience is empty");
  nn::TrainConfig train = context.train;
  train.seed = experience_seed(context);
  nn::FitResult result = run(net, experience, context, train);
  net = std::move(result.network);
  consolidate(net, experience);

  ExperienceLog log;
  log.experience = experiences_seen_;
  log.samples = experience.size();
  log.epochs = result.history.size();
  log.best_epoch = result.best_epoch;
  log.best_val_accuracy = result.best_val_accuracy;
  log.final_train_loss = result.history.empty() ? 0.0 : result.history.back().train_loss;
  log.memory_size = memory_size();
  ++experiences_seen_;
  return log;
}

json ContinualStrategy::state_meta() const {
  return {{"strategy", to_json(config_)}, {"experiences_seen", experiences_seen_}};
}

void ContinualStrategy::restore_state(const json& meta, const std::vector<nn::CheckpointSection>&,
                                      const nn::Network&) {
  experiences_seen_ = meta.value("experiences_seen", 0);
}

std::unique_ptr<ContinualStrategy> make_strategy(const StrategyConfig& config,
                                                 const nn::NetworkConfig& network) {
  config.validate();
  switch (config.kind) {
    case StrategyKind::kNaive: return std::make_unique<NaiveStrategy>(config);
    case StrategyKind::kEwc: return std::make_unique<EwcStrategy>(config);
    case StrategyKind::kLwf: return std::make_unique<LwfStrategy>(config);
    case StrategyKind::kGem: return std::make_unique<GemStrategy>(config);
    case StrategyKind::kGdumb: return std::make_unique<GdumbStrategy>(config, network);
  }
  fail(ErrorCode::kInvalidArgument, "unknown strategy kind");
}

std::vector<float> pack_samples(std::span<const Sample> samples) {
  std::vector<float> out;
  for (const auto& s : samples) {
    out.push_back(static_cast<float>(s.label));
    for (double p : s.image.pixels()) out.push_back(static_cast<float>(p));
  }
  return out;
}

std::vector<Sample> unpack_samples(std::span<const float> values, std::size_t width,
                                   std::size_t height, const std::vector<std::string>& ids) {
  const std::size_t stride = width * height + 1;
  require(values.size() == stride * ids.size(), ErrorCode::kIntegrity,
          "packed sample payload does not match its metadata");
  std::vector<Sample> out;
  out.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const float* base = values.data() + i * stride;
    std::vector<double> px(base + 1, base + stride);
    out.push_back({Image(width, height, std::move(px)), static_cast<int>(base[0]), ids[i]});
  }
  return out;
}

}  // namespace cxrcl::cl
