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

#include "cxrcl/nn/network.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <random>
#include <string>

#include "cxrcl/error.hpp"

namespace cxrcl::nn {
namespace {

std::atomic<std::uint64_t> next_instance{1};

Parameters shaped_zeros(const NetworkConfig& config) {
  Parameters p;
  for (std::size_t l = 0; l + 1 < config.layer_sizes.size(); ++l) {
    const auto in = static_cast<Eigen::Index>(config.layer_sizes[l]);
    const auto out = static_cast<Eigen::Index>(config.layer_sizes[l + 1]);
    p.weights.push_back(Matrix::Zero(out, in));
    p.biases.push_back(Vector::Zero(out));
  }
  return p;
}

}  // namespace

void NetworkConfig::validate() const {
  require(layer_sizes.size() >= 2, ErrorCode::kInvalidArgument,
          "network needs at least an input and an output layer");
  for (std::size_t s : layer_sizes) {
    require(s >= 1, ErrorCode::kInvalidArgument, "layer sizes must be positive");
  }
}

NetworkConfig default_screening_config(std::uint64_t seed) {
  return NetworkConfig{{1024, 128, 64, kNumClasses}, seed};
}

Parameters Parameters::zeros_like(const Parameters& other) {
  Parameters p;
  for (const auto& w : other.weights) p.weights.push_back(Matrix::Zero(w.rows(), w.cols()));
  for (const auto& b : other.biases) p.biases.push_back(Vector::Zero(b.size()));
  return p;
}

std::size_t Parameters::count() const noexcept {
  std::size_t n = 0;
  for (const auto& w : weights) n += static_cast<std::size_t>(w.size());
  for (const auto& b : biases) n += static_cast<std::size_t>(b.size());
  return n;
}

bool Parameters::same_shape(const Parameters& other) const noexcept {
  if (weights.size() != other.weights.size() || biases.size() != other.biases.size()) return false;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].rows() != other.weights[l].rows() || weights[l].cols() != other.weights[l].cols() ||
        biases[l].size() != other.biases[l].size()) {
      return false;
    }
  }
  return true;
}

Vector Parameters::flatten() const {
  Vector flat(static_cast<Eigen::Index>(count()));
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    const auto& w = weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) flat[k++] = w(r, c);
    }
    flat.segment(k, biases[l].size()) = biases[l];
    k += biases[l].size();
  }
  return flat;
}

void Parameters::assign(const Vector& flat) {
  require(static_cast<std::size_t>(flat.size()) == count(), ErrorCode::kShapeMismatch,
          "flat parameter vector has wrong length");
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    auto& w = weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = flat[k++];
    }
    biases[l] = flat.segment(k, biases[l].size());
    k += biases[l].size();
  }
}

Parameters& Parameters::operator+=(const Parameters& other) {
  require(same_shape(other), ErrorCode::kShapeMismatch, "parameter shapes differ");
  for (std::size_t l = 0; l < weights.size(); ++l) {
    weights[l] += other.weights[l];
    biases[l] += other.biases[l];
  }
  return *this;
}

Parameters& Parameters::operator*=(double scale) {
  for (auto& w : weights) w *= scale;
  for (auto& b : biases) b *= scale;
  return *this;
}

bool Parameters::all_finite() const {
  for (const auto& w : weights) {
    if (!w.allFinite()) return false;
  }
  for (const auto& b : biases) {
    if (!b.allFinite()) return false;
  }
  return true;
}

Network::Network(NetworkConfig config, Parameters params)
    : config_(std::move(config)), params_(std::move(params)), instance_(next_instance++) {}

Network::Network(NetworkConfig config) : Network(config, {}) {
  config_.validate();
  params_ = shaped_zeros(config_);
  std::mt19937_64 rng(config_.seed);
  for (auto& w : params_.weights) {
    const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    std::uniform_real_distribution<double> dist(-limit, limit);
    // Row-major fill so the draw order matches the flat parameter order.
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = dist(rng);
    }
  }
}

Network Network::zeros(NetworkConfig config) {
  config.validate();
  Parameters p = shaped_zeros(config);
  return Network(std::move(config), std::move(p));
}

void Network::set_parameters(Parameters params) {
  require(params.same_shape(params_), ErrorCode::kShapeMismatch,
          "replacement parameters do not match the network layout");
  params_ = std::move(params);
  ++generation_;
}

ForwardResult forward(const Network& net, const Matrix& inputs) {
  require(static_cast<std::size_t>(inputs.cols()) == net.input_size(), ErrorCode::kShapeMismatch,
          "input width " + std::to_string(inputs.cols()) + " does not match network input " +
              std::to_string(net.input_size()));
  const auto& p = net.parameters();
  ForwardResult result;
  auto& cache = result.cache;
  cache.instance = net.instance();
  cache.generation = net.generation();
  cache.batch = inputs.rows();

  Matrix a = inputs;
  const std::size_t layers = net.num_layers();
  for (std::size_t l = 0; l < layers; ++l) {
    Matrix z = a * p.weights[l].transpose();
    z.rowwise() += p.biases[l].transpose();
    cache.inputs.push_back(std::move(a));
    if (l + 1 == layers) {
      result.logits = std::move(z);
    } else {
      a = z.cwiseMax(0.0);
      cache.pre_activations.push_back(std::move(z));
    }
  }
  return result;
}

ForwardResult forward(const Network& net, std::span<const Image> batch) {
  return forward(net, to_matrix(batch));
}

Matrix infer_logits(const Network& net, const Matrix& inputs) {
  require(static_cast<std::size_t>(inputs.cols()) == net.input_size(), ErrorCode::kShapeMismatch,
          "input width does not match network input");
  const auto& p = net.parameters();
  Matrix a = inputs;
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    Matrix z = a * p.weights[l].transpose();
    z.rowwise() += p.biases[l].transpose();
    a = (l + 1 == net.num_layers()) ? std::move(z) : Matrix(z.cwiseMax(0.0));
  }
  return a;
}

Parameters backward(const Network& net, const ForwardCache& cache, const Matrix& dlogits) {
  require(cache.instance == net.instance() && cache.generation == net.generation() &&
              cache.inputs.size() == net.num_layers(),
          ErrorCode::kContractViolation, "forward cache does not belong to this network state");
  require(dlogits.rows() == cache.batch &&
              static_cast<std::size_t>(dlogits.cols()) == net.output_size(),
          ErrorCode::kShapeMismatch, "upstream gradient shape does not match the forward pass");

  const auto& p = net.parameters();
  Parameters grads = Parameters::zeros_like(p);
  Matrix delta = dlogits;
  for (std::size_t l = net.num_layers(); l-- > 0;) {
    grads.weights[l] = delta.transpose() * cache.inputs[l];
    grads.biases[l] = delta.colwise().sum().transpose();
    if (l == 0) break;
    Matrix upstream = delta * p.weights[l];
    delta = (cache.pre_activations[l - 1].array() > 0.0).select(upstream, 0.0);
  }
  return grads;
}

Matrix to_matrix(std::span<const Image> images) {
  if (images.empty()) return Matrix(0, 0);
  const auto width = static_cast<Eigen::Index>(images.front().size());
  Matrix m(static_cast<Eigen::Index>(images.size()), width);
  for (std::size_t i = 0; i < images.size(); ++i) {
    require(static_cast<Eigen::Index>(images[i].size()) == width, ErrorCode::kShapeMismatch,
            "batch images differ in size");
    const auto px = images[i].pixels();
    for (Eigen::Index j = 0; j < width; ++j) m(static_cast<Eigen::Index>(i), j) = px[j];
  }
  return m;
}

Matrix to_matrix(std::span<const Sample> samples) {
  if (samples.empty()) return Matrix(0, 0);
  const auto width = static_cast<Eigen::Index>(samples.front().image.size());
  Matrix m(static_cast<Eigen::Index>(samples.size()), width);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    require(static_cast<Eigen::Index>(samples[i].image.size()) == width,
            ErrorCode::kShapeMismatch, "batch images differ in size");
    const auto px = samples[i].image.pixels();
    for (Eigen::Index j = 0; j < width; ++j) m(static_cast<Eigen::Index>(i), j) = px[j];
  }
  return m;
}

std::vector<int> labels_of(std::span<const Sample> samples) {
  std::vector<int> labels;
  labels.reserve(samples.size());
  for (const auto& s : samples) labels.push_back(s.label);
  return labels;
}

Network quantize_to_storage(const Network& net) {
  Network out = net;
  Parameters& p = out.mutable_parameters();
  auto round_trip = [](double v) { return static_cast<double>(static_cast<float>(v)); };
  for (auto& w : p.weights) w = w.unaryExpr(round_trip);
  for (auto& b : p.biases) b = b.unaryExpr(round_trip);
  return out;
}

std::uint64_t parameter_checksum(const Network& net) {
  std::uint64_t hash = 1469598103934665603ull;
  const Vector flat = net.parameters().flatten();
  for (Eigen::Index i = 0; i < flat.size(); ++i) {
    auto bits = std::bit_cast<std::uint64_t>(flat[i]);
    for (int b = 0; b < 8; ++b) {
      hash ^= (bits >> (8 * b)) & 0xffu;
      hash *= 1099511628211ull;
    }
  }
  return hash;
}

}  // namespace cxrcl::nn
