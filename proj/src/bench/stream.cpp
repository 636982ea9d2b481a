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

#include "cxrcl/bench/stream.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

#include "cxrcl/error.hpp"

namespace cxrcl::bench {

std::vector<Experience> make_stream(std::span<const Sample> pool, std::size_t count,
                                    std::uint64_t seed) {
  require(count >= 1, ErrorCode::kInvalidArgument, "experience count must be positive");
  require(count <= pool.size(), ErrorCode::kInvalidArgument,
          "cannot split " + std::to_string(pool.size()) + " samples into " + std::to_string(count) +
              " experiences");
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  const std::size_t base = pool.size() / count;
  const std::size_t extra = pool.size() % count;
  std::vector<Experience> stream;
  stream.reserve(count);
  std::size_t cursor = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t size = base + (k < extra ? 1 : 0);
    Experience exp{k + 1, {}};
    exp.samples.reserve(size);
    for (std::size_t i = 0; i < size; ++i) exp.samples.push_back(pool[order[cursor++]]);
    stream.push_back(std::move(exp));
  }
  return stream;
}

std::vector<Experience> stream_from_stages(std::vector<std::vector<Sample>> stages) {
  std::vector<Experience> stream;
  stream.reserve(stages.size());
  for (std::size_t k = 0; k < stages.size(); ++k) {
    require(!stages[k].empty(), ErrorCode::kInvalidArgument, "experiences must be non-empty");
    stream.push_back({k + 1, std::move(stages[k])});
  }
  return stream;
}

}  // namespace cxrcl::bench
