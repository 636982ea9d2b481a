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

#include "cxrcl/nn/loss.hpp"

namespace cxrcl::cl {

inline constexpr double kDefaultTemperature = 2.0;
inline constexpr double kDefaultDistillationWeight = 1.0;

/// Batch-mean KL(softmax(teacher/T) || softmax(student/T)).
double distillation_kl(const nn::Matrix& student_logits, const nn::Matrix& teacher_logits,
                       double temperature);

/// Cross-entropy on the labels plus lambda_o * T^2 * KL against the teacher's
/// softened outputs. Gradient is with respect to the student logits.
nn::LossResult lwf_loss(const nn::Matrix& student_logits, const nn::Matrix& teacher_logits,
                        std::span<const int> labels, double temperature, double lambda_o);

}  // namespace cxrcl::cl
