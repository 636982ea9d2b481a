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
#include <map>
#include <span>
#include <vector>

#include "cxrcl/imaging/image.hpp"
#include "cxrcl/nn/network.hpp"

namespace cxrcl::cl {

struct GemSolverConfig {
  double tolerance = 1e-7;
  int max_iterations = 10000;
};

/// Closest vector to g with a nonnegative inner product against every
/// reference. Solves the dual QP over nonnegative multipliers by projected
/// coordinate descent and polishes the active set. Returns g unchanged when
/// it is already feasible. Throws kShapeMismatch on length mismatch and
/// kSolverFailure if the dual does not converge.
nn::Vector gem_project(const nn::Vector& g, std::span<const nn::Vector> refs,
                       const GemSolverConfig& solver = {});

struct GemState {
  std::size_t capacity = 0;
  std::uint64_t seed = 0;
  std::size_t experiences_seen = 0;
  std::map<int, std::vector<Sample>> memory;  // experience id -> samples

  std::size_t size() const noexcept;
};

/// Adds an experience with quota floor(k / experiences seen) and trims the
/// older ones to the same quota. When the quota is zero, only one sample of
/// the newest experience is kept.
void gem_store(GemState& state, int experience_id, std::span<const Sample> samples);

}  // namespace cxrcl::cl
