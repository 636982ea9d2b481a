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

#include "cxrcl/nn/loss.hpp"

#include <cmath>

#include "cxrcl/error.hpp"

namespace cxrcl::nn {

Matrix softmax(const Matrix& logits, double temperature) {
  require(temperature > 0.0, ErrorCode::kInvalidArgument, "temperature must be positive");
  Matrix scaled = logits / temperature;
  const Vector row_max = scaled.rowwise().maxCoeff();
  scaled.colwise() -= row_max;
  Matrix e = scaled.array().exp().matrix();
  const Vector sums = e.rowwise().sum();
  for (Eigen::Index r = 0; r < e.rows(); ++r) e.row(r) /= sums[r];
  return e;
}

LossResult softmax_xent(const Matrix& logits, std::span<const int> labels) {
  require(static_cast<Eigen::Index>(labels.size()) == logits.rows(), ErrorCode::kShapeMismatch,
          "one label per logit row is required");
  LossResult result;
  result.grad = softmax(logits);
  const double inv_batch = logits.rows() > 0 ? 1.0 / static_cast<double>(logits.rows()) : 0.0;
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const int y = labels[static_cast<std::size_t>(r)];
    require(y >= 0 && y < logits.cols(), ErrorCode::kInvalidArgument, "label out of range");
    // -log softmax_y = logsumexp(z) - z_y, evaluated stably.
    const double m = logits.row(r).maxCoeff();
    const double lse = m + std::log((logits.row(r).array() - m).exp().sum());
    result.loss += (lse - logits(r, y)) * inv_batch;
    result.grad(r, y) -= 1.0;
  }
  result.grad *= inv_batch;
  return result;
}

}  // namespace cxrcl::nn
