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

#include "cxrcl/bench/runner.hpp"

#include <chrono>

#include "cxrcl/bench/metrics.hpp"
#include "cxrcl/error.hpp"

namespace cxrcl::bench {

void summarize(BenchmarkReport& report) {
  report.avg_accuracy = mean(report.accuracy_trace);
  report.std_accuracy = stddev(report.accuracy_trace);
  const std::vector<double> terms = forgetting_terms(report.accuracy_trace);
  report.avg_forgetting = terms.empty() ? 0.0 : mean(terms);
  report.std_forgetting = stddev(terms);
  report.overall = overall_performance(report.avg_accuracy, report.avg_forgetting);
  report.avg_eval_time_ms = mean(report.eval_times_ms);
}

double evaluate(const nn::Network& net, std::span<const Sample> test) {
  return 100.0 * nn::accuracy(net, test);
}

BenchmarkReport run_benchmark(cl::ContinualStrategy& strategy, nn::Network& net,
                              std::span<const Experience> stream, std::span<const Sample> test,
                              const BenchmarkOptions& options) {
  require(!stream.empty(), ErrorCode::kInvalidArgument, "benchmark stream is empty");
  require(!test.empty(), ErrorCode::kInvalidArgument, "benchmark test set is empty");

  BenchmarkReport report;
  report.strategy = strategy.config().descriptor();
  report.seed = options.seed;
  for (const Experience& exp : stream) {
    strategy.train_experience(net, exp.samples, options.context);
    const auto start = std::chrono::steady_clock::now();
    const double acc = evaluate(net, test);
    const auto stop = std::chrono::steady_clock::now();
    report.accuracy_trace.push_back(acc);
    report.eval_times_ms.push_back(
        options.record_timing ? std::chrono::duration<double, std::milli>(stop - start).count() : 0.0);
    if (options.on_experience) options.on_experience(exp.index, acc);
  }
  summarize(report);
  return report;
}

}  // namespace cxrcl::bench
