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

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cxrcl/bench/stream.hpp"
#include "cxrcl/cl/strategy.hpp"

namespace cxrcl::bench {

struct BenchmarkReport {
  std::string strategy;  // descriptor, e.g. "gdumb(k=200)"
  std::uint64_t seed = 0;
  std::vector<double> accuracy_trace;  // percent, one per experience
  std::vector<double> eval_times_ms;   // wall clock of each full test pass
  double avg_accuracy = 0.0;
  double std_accuracy = 0.0;
  double avg_forgetting = 0.0;
  double std_forgetting = 0.0;
  double overall = 0.0;
  double avg_eval_time_ms = 0.0;

  friend bool operator==(const BenchmarkReport&, const BenchmarkReport&) = default;
};

/// Fills the summary fields from the two traces.
void summarize(BenchmarkReport& report);

struct BenchmarkOptions {
  cl::TrainContext context;  // training config, validation set, audit hook
  std::uint64_t seed = 0;
  bool record_timing = true;  // false stores zero eval times
  // Called after each experience with (1-based experience index, accuracy percent).
  std::function<void(std::size_t, double)> on_experience;
};

/// Trains `strategy` on each experience in order, evaluating the whole test
/// set after each one.
BenchmarkReport run_benchmark(cl::ContinualStrategy& strategy, nn::Network& net,
                              std::span<const Experience> stream, std::span<const Sample> test,
                              const BenchmarkOptions& options);

/// Percent accuracy on the test set.
double evaluate(const nn::Network& net, std::span<const Sample> test);

}  // namespace cxrcl::bench
