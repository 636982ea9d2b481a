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

#include "cxrcl/nn/adam.hpp"

#include <cmath>

#include "cxrcl/error.hpp"

namespace cxrcl::nn {

AdamState::AdamState(const Parameters& shape, AdamConfig cfg)
    : config(cfg), m(Parameters::zeros_like(shape)), v(Parameters::zeros_like(shape)) {}

void adam_step(Network& net, const Parameters& grads, AdamState& state) {
  require(grads.same_shape(net.parameters()) && state.m.same_shape(grads), ErrorCode::kShapeMismatch,
          "Adam state, gradients, and network must share shapes");
  const auto& c = state.config;
  state.t += 1;
  const double t = static_cast<double>(state.t);
  const double correction1 = 1.0 - std::pow(c.beta1, t);
  const double correction2 = 1.0 - std::pow(c.beta2, t);

  auto update = [&](auto& theta, const auto& g, auto& m, auto& v) {
    m = c.beta1 * m + (1.0 - c.beta1) * g;
    v = c.beta2 * v + (1.0 - c.beta2) * g.cwiseProduct(g);
    theta.array() -= c.learning_rate * (m.array() / correction1) /
                     ((v.array() / correction2).sqrt() + c.epsilon);
  };
  Parameters& p = net.mutable_parameters();
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    update(p.weights[l], grads.weights[l], state.m.weights[l], state.v.weights[l]);
    update(p.biases[l], grads.biases[l], state.m.biases[l], state.v.biases[l]);
  }
}

}  // namespace cxrcl::nn
