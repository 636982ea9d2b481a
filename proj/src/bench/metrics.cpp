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

#include "cxrcl/bench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cxrcl/error.hpp"

namespace cxrcl::bench {

std::vector<double> forgetting_terms(std::span<const double> trace) {
  std::vector<double> terms;
  if (trace.size() < 2) return terms;
  double best_before = trace[0];
  for (std::size_t k = 1; k < trace.size(); ++k) {
    terms.push_back(best_before - trace[k]);
    best_before = std::max(best_before, trace[k]);
  }
  return terms;
}

double avg_forgetting(std::span<const double> trace) {
  const std::vector<double> terms = forgetting_terms(trace);
  return terms.empty() ? 0.0 : mean(terms);
}

double overall_performance(double avg_accuracy, double avg_forgetting) {
  require(avg_accuracy >= 0.0 && avg_accuracy <= 100.0, ErrorCode::kInvalidArgument,
          "average accuracy must lie in [0, 100]");
  require(avg_forgetting >= -100.0 && avg_forgetting <= 100.0, ErrorCode::kInvalidArgument,
          "average forgetting must lie in [-100, 100]");
  return 0.5 * (avg_accuracy + (100.0 - avg_forgetting) / 2.0);
}

double mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double stddev(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean(values);
  double sq = 0.0;
  for (double v : values) sq += (v - m) * (v - m);
  return std::sqrt(sq / static_cast<double>(values.size()));
}

}  // namespace cxrcl::bench
