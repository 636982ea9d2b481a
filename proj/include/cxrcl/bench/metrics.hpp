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

namespace cxrcl::bench {

/// f_k = max over l < k of (A_l - A_k) for k >= 2, averaged. Zero for a
/// single-entry trace.
double avg_forgetting(std::span<const double> accuracy_trace);

/// The per-experience forgetting terms f_2..f_K (empty for K = 1).
std::vector<double> forgetting_terms(std::span<const double> accuracy_trace);

/// p = (a + (100 - f) / 2) / 2 with a in [0, 100] and f in [-100, 100].
/// Throws kInvalidArgument outside those ranges.
double overall_performance(double avg_accuracy, double avg_forgetting);

double mean(std::span<const double> values);
/// Population standard deviation; zero for fewer than two values.
double stddev(std::span<const double> values);

}  // namespace cxrcl::bench
