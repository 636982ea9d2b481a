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

namespace cxrcl::bench {

inline constexpr std::size_t kDefaultExperiences = 25;

struct Experience {
  std::size_t index = 1;  // 1-based
  std::vector<Sample> samples;
};

/// Seeded shuffle of the pool split into `count` contiguous chunks whose sizes
/// differ by at most one (larger chunks first). Throws kInvalidArgument if
/// count is zero or exceeds the pool size.
std::vector<Experience> make_stream(std::span<const Sample> pool, std::size_t count,
                                    std::uint64_t seed);

/// Wraps pre-built per-stage sample lists as experiences 1..K.
std::vector<Experience> stream_from_stages(std::vector<std::vector<Sample>> stages);

}  // namespace cxrcl::bench
