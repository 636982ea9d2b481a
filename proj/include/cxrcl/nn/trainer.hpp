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

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "cxrcl/imaging/image.hpp"
#include "cxrcl/nn/loss.hpp"
#include "cxrcl/nn/network.hpp"

namespace cxrcl::nn {

struct TrainConfig {
  int max_epochs = 70;
  std::size_t batch_size = 64;
  // Consecutive epochs without validation-accuracy improvement that are
  // tolerated; training stops on the next one.
  int patience = 10;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_accuracy = 0.0;
};

struct FitResult {
  Network network;  // snapshot with the best validation accuracy
  std::vector<EpochRecord> history;
  int best_epoch = 0;
  double best_val_accuracy = 0.0;
};

/// Extension points used by the continual-learning strategies. Empty members
/// fall back to plain cross-entropy training.
struct TrainHooks {
  using LossFn = std::function<LossResult(const Matrix& logits, std::span<const std::size_t> batch,
                                          std::span<const int> labels)>;
  // Adds a penalty gradient into grads and returns the penalty value.
  using RegularizerFn = std::function<double(const Network& net, Parameters& grads)>;
  using GradientFn = std::function<void(const Network& net, Parameters& grads)>;
  using AuditFn = std::function<void(std::span<const Sample> train)>;

  LossFn loss;
  RegularizerFn regularizer;
  GradientFn transform_gradient;
  AuditFn audit;
};

/// Mini-batch Adam with per-epoch seeded shuffling and early stopping on
/// validation accuracy. With an empty validation set, training accuracy
/// drives model selection. Throws kInvalidArgument on an empty training set.
FitResult fit(Network net, std::span<const Sample> train, std::span<const Sample> val,
              const TrainConfig& config, const TrainHooks& hooks = {});

/// Fraction of samples whose argmax prediction equals the label.
double accuracy(const Network& net, std::span<const Sample> samples);

/// Mean cross-entropy gradient over a sample set.
Parameters loss_gradient(const Network& net, std::span<const Sample> samples);

/// Index of the largest entry; ties go to the lowest index.
int argmax(std::span<const double> values);

struct Prediction {
  int label = 0;
  std::vector<double> probabilities;
};

/// Softmax probabilities for one image of the network's input size.
Prediction predict_probabilities(const Network& net, const Image& img);

struct ScreeningPrediction {
  ClassLabel label = ClassLabel::kCovid19;
  std::array<double, kNumClasses> probabilities{};
};

/// Three-class screening prediction. Throws kShapeMismatch otherwise.
ScreeningPrediction predict(const Network& net, const Image& img);

}  // namespace cxrcl::nn
