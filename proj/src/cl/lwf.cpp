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

#include "cxrcl/cl/lwf.hpp"

#include <cmath>

#include "cxrcl/error.hpp"

namespace cxrcl::cl {
namespace {

nn::Matrix log_softmax(const nn::Matrix& logits, double temperature) {
  nn::Matrix scaled = logits / temperature;
  for (Eigen::Index r = 0; r < scaled.rows(); ++r) {
    const double m = scaled.row(r).maxCoeff();
    const double lse = m + std::log((scaled.row(r).array() - m).exp().sum());
    scaled.row(r).array() -= lse;
  }
  return scaled;
}

void check_shapes(const nn::Matrix& student, const nn::Matrix& teacher, double temperature) {
  require(temperature > 0.0, ErrorCode::kInvalidArgument, "distillation temperature must be positive");
  require(student.rows() == teacher.rows() && student.cols() == teacher.cols(),
          ErrorCode::kShapeMismatch, "student and teacher logits differ in shape");
}

}  // namespace

double distillation_kl(const nn::Matrix& student_logits, const nn::Matrix& teacher_logits,
                       double temperature) {
  check_shapes(student_logits, teacher_logits, temperature);
  if (student_logits.rows() == 0) return 0.0;
  const nn::Matrix log_p = log_softmax(teacher_logits, temperature);
  const nn::Matrix log_q = log_softmax(student_logits, temperature);
  double total = 0.0;
  for (Eigen::Index r = 0; r < log_p.rows(); ++r) {
    for (Eigen::Index c = 0; c < log_p.cols(); ++c) {
      const double p = std::exp(log_p(r, c));
      if (p > 0.0) total += p * (log_p(r, c) - log_q(r, c));
    }
  }
  return total / static_cast<double>(log_p.rows());
}

nn::LossResult lwf_loss(const nn::Matrix& student_logits, const nn::Matrix& teacher_logits,
                        std::span<const int> labels, double temperature, double lambda_o) {
  check_shapes(student_logits, teacher_logits, temperature);
  nn::LossResult out = nn::softmax_xent(student_logits, labels);
  if (lambda_o == 0.0 || student_logits.rows() == 0) return out;

  const double kl = distillation_kl(student_logits, teacher_logits, temperature);
  out.loss += lambda_o * temperature * temperature * kl;
  // d/dz [T^2 KL(p || softmax(z/T))] = T (q - p), averaged over the batch.
  const nn::Matrix p = nn::softmax(teacher_logits, temperature);
  const nn::Matrix q = nn::softmax(student_logits, temperature);
  out.grad += (lambda_o * temperature / static_cast<double>(student_logits.rows())) * (q - p);
  return out;
}

}  // namespace cxrcl::cl
