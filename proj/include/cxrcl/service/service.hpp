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

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include <json.hpp>

#include "cxrcl/service/auth.hpp"
#include "cxrcl/service/event_log.hpp"
#include "cxrcl/service/registry.hpp"
#include "cxrcl/service/submission.hpp"

namespace cxrcl::service {

struct ServiceConfig {
  std::filesystem::path data_dir;  // events.jsonl and images/
  bool durable_log = true;
  // Benchmark report (csv or json) summarized by metrics().
  std::optional<std::filesystem::path> benchmark_report;
};

struct SubmissionRequest {
  SubmissionType type = SubmissionType::kClassify;
  std::vector<std::uint8_t> image;  // encoded PNG or PGM
  std::optional<ClassLabel> label;
};

struct SubmissionFilter {
  std::optional<Status> status;
  std::optional<SubmissionType> type;
};

/// Running mean and population standard deviation.
struct LatencyStats {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;
  void add(double value);
  double stddev() const;
};

/// Multi-producer, single-consumer submission queue in front of the model
/// registry. State is rebuilt from the event log at construction; queued and
/// interrupted submissions are re-queued in id order.
class ScreeningService {
 public:
  ScreeningService(ServiceConfig config, ModelRegistry registry, Clock clock = system_clock());
  ~ScreeningService();
  ScreeningService(const ScreeningService&) = delete;
  ScreeningService& operator=(const ScreeningService&) = delete;

  /// kForbidden for roles that may not submit this type, kValidation for a
  /// missing/extra label or an undecodable image. Nothing is persisted on error.
  std::uint64_t enqueue(const Principal& who, const SubmissionRequest& request);

  /// Processes the queue head on the calling thread. Empty optional when the
  /// queue is empty. Must not race the background worker.
  std::optional<Submission> process_next();

  void start();
  /// Finishes the submission in flight, leaves the rest queued.
  void stop();
  /// True once the queue drained and nothing is in flight.
  bool wait_idle(std::chrono::milliseconds timeout);

  /// kNotFound, kForbidden (not a doctor paired with the submitter), kState
  /// (not classified, or already confirmed).
  std::uint64_t confirm(const Principal& who, std::uint64_t id, ClassLabel label);

  /// Role-scoped views: patients see their own records, doctors their own and
  /// their paired patients', researchers everything anonymized.
  nlohmann::json get(const Principal& who, std::uint64_t id) const;
  std::vector<nlohmann::json> list(const Principal& who, const SubmissionFilter& filter) const;

  nlohmann::json metrics() const;

  /// Unscoped accessors for tests and tooling.
  Submission record(std::uint64_t id) const;
  std::vector<Submission> records() const;
  /// Ids in the order this instance took them off the queue.
  std::vector<std::uint64_t> processing_order() const;
  std::size_t queue_depth() const;

  /// Called with the submission id right before Classifier 2 is used.
  void set_classifier_audit(std::function<void(std::uint64_t)> audit);

  /// Owned by the consumer; read only while the worker is stopped.
  const ModelRegistry& registry() const noexcept { return registry_; }

 private:
  void replay();
  void persist(const Submission& s);  // caller holds mutex_
  bool visible(const Principal& who, const Submission& s) const;
  nlohmann::json view(const Principal& who, const Submission& s) const;
  void worker_loop();
  void transition(Submission& s, Status to);

  ServiceConfig config_;
  ModelRegistry registry_;
  Clock clock_;
  ImageStore images_;
  std::unique_ptr<EventLog> log_;
  nlohmann::json benchmark_;

  mutable std::mutex mutex_;
  std::condition_variable queue_cv_;
  std::condition_variable idle_cv_;
  std::map<std::uint64_t, Submission> records_;
  std::deque<std::uint64_t> queue_;
  std::uint64_t next_id_ = 1;
  std::uint64_t model_version_ = 0;
  bool in_flight_ = false;
  std::vector<std::uint64_t> order_;
  LatencyStats classify_latency_;
  LatencyStats learn_latency_;
  std::function<void(std::uint64_t)> audit_;

  std::mutex consumer_mutex_;
  bool stopping_ = false;
  std::thread worker_;
};

}  // namespace cxrcl::service
