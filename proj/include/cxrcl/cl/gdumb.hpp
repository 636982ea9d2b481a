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
#include <span>
#include <vector>

#include "cxrcl/imaging/image.hpp"
#include "cxrcl/nn/trainer.hpp"

namespace cxrcl::cl {

struct GdumbState {
  GdumbState(std::size_t capacity, std::size_t num_classes, std::uint64_t seed = 0);

  std::size_t capacity;
  std::size_t num_classes;
  std::uint64_t seed;
  std::uint64_t evictions = 0;  // drives the seeded eviction draws
  std::vector<Sample> buffer;
  std::vector<std::size_t> counts;  // per class
};

/// Greedy class-balanced insertion: fill while there is room, otherwise
/// replace a random member of the largest class if the newcomer's class is
/// smaller than it, otherwise discard.
void gdumb_update(GdumbState& state, const Sample& sample);

/// Fresh network from config.seed fitted on the buffer only.
nn::FitResult gdumb_retrain(const nn::NetworkConfig& config, const GdumbState& state,
                            std::span<const Sample> validation, const nn::TrainConfig& train,
                            const nn::TrainHooks::AuditFn& audit = {});

}  // namespace cxrcl::cl
