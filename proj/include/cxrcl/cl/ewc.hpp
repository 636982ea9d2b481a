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

#include <span>

#include "cxrcl/imaging/image.hpp"
#include "cxrcl/nn/network.hpp"

namespace cxrcl::cl {

inline constexpr double kDefaultEwcLambda = 100.0;

struct EwcState {
  nn::Parameters anchor;  // theta* after the last consolidated experience
  nn::Parameters fisher;  // diagonal, nonnegative
  double lambda = kDefaultEwcLambda;
};

struct PenaltyResult {
  double penalty = 0.0;
  nn::Parameters gradient;
};

/// (lambda/2) * sum F_i (theta_i - theta*_i)^2 and its gradient.
PenaltyResult ewc_penalty(const nn::Network& net, const EwcState& state);

/// Empirical Fisher diagonal: mean over samples of the squared gradient of
/// log p(y_true | x). Throws kInvalidArgument on an empty sample list.
nn::Parameters estimate_fisher(const nn::Network& net, std::span<const Sample> samples);

}  // namespace cxrcl::cl
