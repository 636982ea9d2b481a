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

#include "cxrcl/cl/gdumb.hpp"

#include <algorithm>
#include <random>

#include "cxrcl/error.hpp"
#include "cxrcl/random.hpp"

namespace cxrcl::cl {

GdumbState::GdumbState(std::size_t capacity_, std::size_t num_classes_, std::uint64_t seed_)
    : capacity(capacity_), num_classes(num_classes_), seed(seed_), counts(num_classes_, 0) {
  require(capacity >= 1, ErrorCode::kInvalidArgument, "GDUMB capacity must be positive");
  require(num_classes >= 1, ErrorCode::kInvalidArgument, "GDUMB needs at least one class");
}

void gdumb_update(GdumbState& state, const Sample& sample) {
  require(sample.label >= 0 && static_cast<std::size_t>(sample.label) < state.num_classes,
          ErrorCode::kInvalidArgument, "sample label outside the GDUMB class set");
  const auto cls = static_cast<std::size_t>(sample.label);
  if (state.buffer.size() < state.capacity) {
    state.buffer.push_back(sample);
    ++state.counts[cls];
    return;
  }
  const auto largest = std::max_element(state.counts.begin(), state.counts.end());
  if (state.counts[cls] >= *largest) return;

  // Lowest-ordinal class among the largest, then a seeded member of it.
  const int victim_class = static_cast<int>(largest - state.counts.begin());
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < state.buffer.size(); ++i) {
    if (state.buffer[i].label == victim_class) members.push_back(i);
  }
  std::mt19937_64 rng(derive_seed(state.seed, state.evictions++));
  std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
  state.buffer[members[pick(rng)]] = sample;
  --state.counts[static_cast<std::size_t>(victim_class)];
  ++state.counts[cls];
}

nn::FitResult gdumb_retrain(const nn::NetworkConfig& config, const GdumbState& state,
                            std::span<const Sample> validation, const nn::TrainConfig& train,
                            const nn::TrainHooks::AuditFn& audit) {
  require(!state.buffer.empty(), ErrorCode::kInvalidArgument, "GDUMB buffer is empty");
  nn::TrainHooks hooks;
  hooks.audit = audit;
  return nn::fit(nn::Network(config), state.buffer, validation, train, hooks);
}

}  // namespace cxrcl::cl
