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

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <set>

#include "cxrcl/bench/metrics.hpp"
#include "cxrcl/bench/report.hpp"
#include "cxrcl/bench/runner.hpp"
#include "cxrcl/bench/stream.hpp"
#include "cxrcl/cl/strategy.hpp"
#include "cxrcl/error.hpp"
#include "test_support.hpp"

namespace cxrcl::bench {
namespace {

std::vector<Sample> pool(int n) {
  std::vector<Sample> out;
  for (int i = 0; i < n; ++i) out.push_back({Image(1, 1), i % 3, "p" + std::to_string(i)});
  return out;
}

TEST(StreamTest, SizesPartitionAndDeterminism) {
  const auto p = pool(10);
  const auto s = make_stream(p, 3, 5);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0].samples.size(), 4u);
  EXPECT_EQ(s[1].samples.size(), 3u);
  EXPECT_EQ(s[2].samples.size(), 3u);
  EXPECT_EQ(s[0].index, 1u);
  EXPECT_EQ(s[2].index, 3u);
  std::set<std::string> ids;
  for (const auto& e : s)
    for (const auto& x : e.samples) ids.insert(x.source_id);
  EXPECT_EQ(ids.size(), 10u);
  const auto again = make_stream(p, 3, 5);
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t i = 0; i < s[k].samples.size(); ++i)
      EXPECT_EQ(s[k].samples[i].source_id, again[k].samples[i].source_id);
  EXPECT_EQ(make_stream(p, 1, 0)[0].samples.size(), 10u);
  EXPECT_THROW(make_stream(p, 11, 0), Error);
  EXPECT_THROW(make_stream(p, 0, 0), Error);
}

TEST(StreamTest, ManyShapesDifferByAtMostOne) {
  for (int n = 1; n <= 40; ++n) {
    const auto p = pool(n);
    for (int k = 1; k <= n; ++k) {
      const auto s = make_stream(p, k, 1);
      std::size_t lo = n, hi = 0, total = 0;
      for (const auto& e : s) {
        lo = std::min(lo, e.samples.size());
        hi = std::max(hi, e.samples.size());
        total += e.samples.size();
      }
      ASSERT_LE(hi - lo, 1u);
      ASSERT_EQ(total, static_cast<std::size_t>(n));
    }
  }
}

TEST(ForgettingTest, HandDerivedTraces) {
  EXPECT_EQ(avg_forgetting(std::vector<double>{90}), 0.0);
  EXPECT_EQ(avg_forgetting(std::vector<double>{90, 80}), 10.0);
  const std::vector<double> t{90, 85, 95};
  EXPECT_EQ(forgetting_terms(t), (std::vector<double>{5, -5}));
  EXPECT_EQ(avg_forgetting(t), 0.0);
}

TEST(ForgettingTest, SignProperties) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int i = 0; i < 500; ++i) {
    std::vector<double> up{u(rng)}, down{100.0 - u(rng)};
    const int len = 2 + static_cast<int>(rng() % 20);
    for (int k = 1; k < len; ++k) {
      up.push_back(std::min(100.0, up.back() + u(rng)));
      down.push_back(std::max(0.0, down.back() - 0.01 - u(rng)));
    }
    EXPECT_LE(avg_forgetting(up), 0.0);
    EXPECT_GT(avg_forgetting(down), 0.0);
  }
}

TEST(OverallTest, EndpointsExamplesAndRange) {
  EXPECT_EQ(overall_performance(100, -100), 100.0);
  EXPECT_EQ(overall_performance(0, 100), 0.0);
  EXPECT_NEAR(overall_performance(94.44, 0.91), 71.9925, 1e-9);
  EXPECT_NEAR(overall_performance(92.43, 3.82), 70.26, 0.005);
  EXPECT_THROW(overall_performance(101, 0), Error);
  EXPECT_THROW(overall_performance(50, -101), Error);
  EXPECT_LT(overall_performance(50, 10), overall_performance(50.01, 10));
  EXPECT_GT(overall_performance(50, 10), overall_performance(50, 10.01));
}

TEST(StatsTest, MeanAndPopulationStd) {
  const std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
  EXPECT_EQ(mean(v), 5.0);
  EXPECT_EQ(stddev(v), 2.0);
  EXPECT_EQ(stddev(std::vector<double>{3}), 0.0);
}

BenchmarkReport sample_report(const std::string& name) {
  BenchmarkReport r;
  r.strategy = name;
  r.seed = 7;
  r.accuracy_trace = {50.0 / 3.0, 90.125, 0.1};
  r.eval_times_ms = {1.25, 0.3333333333333333, 2.0};
  summarize(r);
  return r;
}

TEST(ReportTest, SummaryIsSelfConsistent) {
  const auto r = sample_report("naive");
  EXPECT_EQ(r.overall, overall_performance(r.avg_accuracy, r.avg_forgetting));
}

TEST(ReportTest, CsvAndJsonRoundTripExactly) {
  testing::TempDir dir;
  const auto a = sample_report("naive"), b = sample_report("gdumb(k=200)");
  emit_report(a, ReportFormat::kCsv, dir / "r.csv");
  emit_report(b, ReportFormat::kCsv, dir / "r.csv");
  const auto csv = read_reports(dir / "r.csv", ReportFormat::kCsv);
  ASSERT_EQ(csv.size(), 2u);
  EXPECT_EQ(csv[0], a);
  EXPECT_EQ(csv[1], b);
  std::ifstream in(dir / "r.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, kCsvHeader);

  emit_report(a, ReportFormat::kJson, dir / "r.json");
  emit_report(b, ReportFormat::kJson, dir / "r.json");
  const auto js = read_reports(dir / "r.json", ReportFormat::kJson);
  ASSERT_EQ(js.size(), 2u);
  EXPECT_EQ(js[0], a);
  EXPECT_EQ(js[1], b);
}

TEST(RunnerTest, FrozenNetGivesConstantTrace) {
  // A strategy whose training never changes the weights.
  class Frozen : public cl::ContinualStrategy {
   public:
    Frozen() : ContinualStrategy(cl::StrategyConfig{}) {}

   protected:
    nn::FitResult run(nn::Network& net, std::span<const Sample>, const cl::TrainContext&,
                      const nn::TrainConfig&) override {
      return nn::FitResult{net, {}, 0, 0.0};
    }
  };
  Frozen frozen;
  nn::Network net(nn::NetworkConfig{{16, 2}, 1});
  const auto stream = make_stream(testing::separable_set(20, 4, 1, "s"), 4, 2);
  const auto test = testing::separable_set(10, 4, 2, "t");
  BenchmarkOptions opts;
  const auto r = run_benchmark(frozen, net, stream, test, opts);
  ASSERT_EQ(r.accuracy_trace.size(), 4u);
  for (double a : r.accuracy_trace) EXPECT_EQ(a, r.accuracy_trace[0]);
  EXPECT_EQ(r.avg_forgetting, 0.0);
  EXPECT_EQ(r.eval_times_ms.size(), 4u);
}

TEST(RunnerTest, NaiveAndGdumbOnTwoExperienceShiftNeverSeeTestIds) {
  auto shifted = testing::separable_set(30, 4, 9, "b");
  for (auto& s : shifted) s.label = 1 - s.label;  // concept flip
  const auto stream = stream_from_stages({testing::separable_set(30, 4, 8, "a"), shifted});
  const auto test = testing::separable_set(20, 4, 10, "test");
  for (auto kind : {cl::StrategyKind::kNaive, cl::StrategyKind::kGdumb}) {
    cl::StrategyConfig sc;
    sc.kind = kind;
    if (kind == cl::StrategyKind::kGdumb) sc.capacity = 20;
    const nn::NetworkConfig nc{{16, 6, 2}, 4};
    auto strat = cl::make_strategy(sc, nc);
    nn::Network net(nc);
    BenchmarkOptions opts;
    opts.context.train.max_epochs = 5;
    opts.context.train.batch_size = 10;
    opts.record_timing = false;
    opts.context.audit = [](std::span<const Sample> train) {
      for (const auto& s : train) ASSERT_NE(s.source_id.rfind("test", 0), 0u) << s.source_id;
    };
    std::size_t callbacks = 0;
    opts.on_experience = [&](std::size_t, double) { ++callbacks; };
    const auto r = run_benchmark(*strat, net, stream, test, opts);
    EXPECT_EQ(r.accuracy_trace.size(), 2u);
    EXPECT_EQ(callbacks, 2u);
    EXPECT_EQ(r.eval_times_ms, (std::vector<double>{0.0, 0.0}));
    EXPECT_EQ(r.strategy, sc.descriptor());
  }
}

}  // namespace
}  // namespace cxrcl::bench
