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

#include "cxrcl/nn/trainer.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "cxrcl/error.hpp"
#include "cxrcl/nn/adam.hpp"

namespace cxrcl::nn {
namespace {

double matrix_accuracy(const Network& net, const Matrix& inputs, std::span<const int> labels) {
  if (inputs.rows() == 0) return 0.0;
  const Matrix logits = infer_logits(net, inputs);
  std::size_t correct = 0;
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    Eigen::Index best = 0;
    // maxCoeff returns the first maximum, which is the lowest-ordinal tie-break.
    logits.row(r).maxCoeff(&best);
    if (best == labels[static_cast<std::size_t>(r)]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(logits.rows());
}

}  // namespace

void TrainConfig::validate() const {
  require(max_epochs >= 1, ErrorCode::kInvalidArgument, "max_epochs must be at least 1");
  require(batch_size >= 1, ErrorCode::kInvalidArgument, "batch_size must be at least 1");
  require(patience >= 0, ErrorCode::kInvalidArgument, "patience must be nonnegative");
  require(learning_rate > 0.0, ErrorCode::kInvalidArgument, "learning rate must be positive");
}

FitResult fit(Network net, std::span<const Sample> train, std::span<const Sample> val,
              const TrainConfig& config, const TrainHooks& hooks) {
  require(!train.empty(), ErrorCode::kInvalidArgument, "training set is empty");
  config.validate();
  if (hooks.audit) hooks.audit(train);

  const Matrix inputs = to_matrix(train);
  const std::vector<int> labels = labels_of(train);
  const Matrix val_inputs = to_matrix(val);
  const std::vector<int> val_labels = labels_of(val);

  AdamState adam(net.parameters(), AdamConfig{.learning_rate = config.learning_rate});
  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  FitResult result{net, {}, 0, -1.0};
  int stale_epochs = 0;
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      const std::span<const std::size_t> batch(order.data() + start, stop - start);
      Matrix batch_inputs(static_cast<Eigen::Index>(batch.size()), inputs.cols());
      std::vector<int> batch_labels(batch.size());
      for (std::size_t i = 0; i < batch.size(); ++i) {
        batch_inputs.row(static_cast<Eigen::Index>(i)) = inputs.row(static_cast<Eigen::Index>(batch[i]));
        batch_labels[i] = labels[batch[i]];
      }

      ForwardResult fw = forward(net, batch_inputs);
      LossResult loss = hooks.loss ? hooks.loss(fw.logits, batch, batch_labels)
                                   : softmax_xent(fw.logits, batch_labels);
      Parameters grads = backward(net, fw.cache, loss.grad);
      const double penalty = hooks.regularizer ? hooks.regularizer(net, grads) : 0.0;
      if (hooks.transform_gradient) hooks.transform_gradient(net, grads);
      adam_step(net, grads, adam);
      loss_sum += (loss.loss + penalty) * static_cast<double>(batch.size());
    }

    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = loss_sum / static_cast<double>(train.size());
    record.train_accuracy = matrix_accuracy(net, inputs, labels);
    record.val_accuracy = val.empty() ? record.train_accuracy
                                      : matrix_accuracy(net, val_inputs, val_labels);
    result.history.push_back(record);

    if (record.val_accuracy > result.best_val_accuracy) {
      result.best_val_accuracy = record.val_accuracy;
      result.best_epoch = epoch;
      result.network = net;
      stale_epochs = 0;
    } else if (++stale_epochs > config.patience) {
      break;
    }
  }
  return result;
}

double accuracy(const Network& net, std::span<const Sample> samples) {
  return matrix_accuracy(net, to_matrix(samples), labels_of(samples));
}

Parameters loss_gradient(const Network& net, std::span<const Sample> samples) {
  require(!samples.empty(), ErrorCode::kInvalidArgument, "cannot take a gradient over no samples");
  ForwardResult fw = forward(net, to_matrix(samples));
  const std::vector<int> labels = labels_of(samples);
  return backward(net, fw.cache, softmax_xent(fw.logits, labels).grad);
}

int argmax(std::span<const double> values) {
  require(!values.empty(), ErrorCode::kInvalidArgument, "argmax of empty range");
  return static_cast<int>(std::max_element(values.begin(), values.end()) - values.begin());
}

Prediction predict_probabilities(const Network& net, const Image& img) {
  require(img.size() == net.input_size(), ErrorCode::kShapeMismatch,
          "image has " + std::to_string(img.size()) + " pixels, network expects " +
              std::to_string(net.input_size()));
  const Image batch[] = {img};
  const Matrix probs = softmax(infer_logits(net, to_matrix(batch)));
  Prediction out;
  out.probabilities.assign(probs.data(), probs.data() + probs.size());
  out.label = argmax(out.probabilities);
  return out;
}

ScreeningPrediction predict(const Network& net, const Image& img) {
  require(net.output_size() == kNumClasses, ErrorCode::kShapeMismatch,
          "screening prediction needs a three-class network");
  const Prediction p = predict_probabilities(net, img);
  ScreeningPrediction out;
  out.label = label_from_ordinal(p.label);
  std::copy(p.probabilities.begin(), p.probabilities.end(), out.probabilities.begin());
  return out;
}

}  // namespace cxrcl::nn
