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

#include <Eigen/Dense>

#include "cxrcl/imaging/image.hpp"

namespace cxrcl::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct NetworkConfig {
  // input -> hidden... -> output; hidden layers use ReLU, the output is raw logits.
  std::vector<std::size_t> layer_sizes;
  std::uint64_t seed = 0;

  /// Throws kInvalidArgument for fewer than two layers or a zero-width layer.
  void validate() const;
  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

/// Default screening raster and layout: 32x32 inputs, 1024-128-64-3.
NetworkConfig default_screening_config(std::uint64_t seed = 0);

/// Per-layer weights (out x in) and biases. Also used for gradients, Adam
/// moments, EWC anchors and Fisher diagonals, which all share the network's
/// shapes. The flat order is layer by layer, W row-major then b.
struct Parameters {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;

  static Parameters zeros_like(const Parameters& other);
  std::size_t count() const noexcept;
  bool same_shape(const Parameters& other) const noexcept;

  Vector flatten() const;
  void assign(const Vector& flat);

  Parameters& operator+=(const Parameters& other);
  Parameters& operator*=(double scale);
  bool all_finite() const;
};

class Network {
 public:
  /// Glorot-uniform weights drawn from config.seed, zero biases.
  explicit Network(NetworkConfig config);
  /// All-zero parameters.
  static Network zeros(NetworkConfig config);

  const NetworkConfig& config() const noexcept { return config_; }
  std::size_t input_size() const noexcept { return config_.layer_sizes.front(); }
  std::size_t output_size() const noexcept { return config_.layer_sizes.back(); }
  std::size_t num_layers() const noexcept { return params_.weights.size(); }

  const Parameters& parameters() const noexcept { return params_; }
  /// Any mutable access invalidates forward caches taken before it.
  Parameters& mutable_parameters() noexcept {
    ++generation_;
    return params_;
  }
  void set_parameters(Parameters params);

  std::uint64_t instance() const noexcept { return instance_; }
  std::uint64_t generation() const noexcept { return generation_; }

 private:
  Network(NetworkConfig config, Parameters params);

  NetworkConfig config_;
  Parameters params_;
  std::uint64_t instance_;
  std::uint64_t generation_ = 0;
};

/// Activation record for backward(). Bound to the network state it was
/// produced from.
struct ForwardCache {
  std::vector<Matrix> inputs;          // input to each layer (batch x in)
  std::vector<Matrix> pre_activations;  // z of each hidden layer
  std::uint64_t instance = 0;
  std::uint64_t generation = 0;
  Eigen::Index batch = 0;
};

struct ForwardResult {
  Matrix logits;  // batch x classes
  ForwardCache cache;
};

/// Rows of `inputs` are samples. Throws kShapeMismatch on width mismatch.
ForwardResult forward(const Network& net, const Matrix& inputs);
ForwardResult forward(const Network& net, std::span<const Image> batch);
/// Logits only, without keeping the activation record.
Matrix infer_logits(const Network& net, const Matrix& inputs);

/// Throws kContractViolation when the cache was produced by another network
/// or before a parameter update, kShapeMismatch when dlogits doesn't fit.
Parameters backward(const Network& net, const ForwardCache& cache, const Matrix& dlogits);

Matrix to_matrix(std::span<const Image> images);
Matrix to_matrix(std::span<const Sample> samples);
std::vector<int> labels_of(std::span<const Sample> samples);

/// Rounds every parameter through 32-bit float, as checkpoint storage does.
Network quantize_to_storage(const Network& net);

/// FNV-1a over the raw parameter bytes; used to detect model changes.
std::uint64_t parameter_checksum(const Network& net);

}  // namespace cxrcl::nn
