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

#include "cxrcl/cl/ewc.hpp"

#include "cxrcl/error.hpp"
#include "cxrcl/nn/loss.hpp"

namespace cxrcl::cl {

PenaltyResult ewc_penalty(const nn::Network& net, const EwcState& state) {
  const auto& theta = net.parameters();
  require(theta.same_shape(state.anchor) && theta.same_shape(state.fisher), ErrorCode::kShapeMismatch,
          "EWC anchor/Fisher shapes do not match the network");
  PenaltyResult out{0.0, nn::Parameters::zeros_like(theta)};
  auto accumulate = [&](const auto& p, const auto& anchor, const auto& fisher, auto& grad) {
    const auto diff = (p - anchor).array();
    out.penalty += 0.5 * state.lambda * (fisher.array() * diff.square()).sum();
    grad = (state.lambda * fisher.array() * diff).matrix();
  };
  for (std::size_t l = 0; l < theta.weights.size(); ++l) {
    accumulate(theta.weights[l], state.anchor.weights[l], state.fisher.weights[l], out.gradient.weights[l]);
    accumulate(theta.biases[l], state.anchor.biases[l], state.fisher.biases[l], out.gradient.biases[l]);
  }
  return out;
}

nn::Parameters estimate_fisher(const nn::Network& net, std::span<const Sample> samples) {
  require(!samples.empty(), ErrorCode::kInvalidArgument, "Fisher estimation needs samples");
  nn::Parameters fisher = nn::Parameters::zeros_like(net.parameters());
  for (const auto& sample : samples) {
    const nn::Matrix row = nn::to_matrix(std::span<const Sample>(&sample, 1));
    nn::ForwardResult fw = nn::forward(net, row);
    const int label[] = {sample.label};
    // d log p / d theta = -d xent / d theta; only the square is kept.
    const nn::Parameters g = nn::backward(net, fw.cache, nn::softmax_xent(fw.logits, label).grad);
    for (std::size_t l = 0; l < g.weights.size(); ++l) {
      fisher.weights[l].array() += g.weights[l].array().square();
      fisher.biases[l].array() += g.biases[l].array().square();
    }
  }
  fisher *= 1.0 / static_cast<double>(samples.size());
  return fisher;
}

}  // namespace cxrcl::cl
