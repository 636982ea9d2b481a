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
#include <vector>

#include "cxrcl/nn/network.hpp"

namespace cxrcl::nn {

struct LossResult {
  double loss = 0.0;
  Matrix grad;  // d loss / d logits, same shape as logits
};

/// Row-wise softmax of logits / temperature, computed with max subtraction.
Matrix softmax(const Matrix& logits, double temperature = 1.0);

/// Batch-mean cross-entropy of softmax(logits) against integer labels.
LossResult softmax_xent(const Matrix& logits, std::span<const int> labels);

}  // namespace cxrcl::nn
