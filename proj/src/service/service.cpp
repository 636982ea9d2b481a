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

#include "cxrcl/service/service.hpp"

#include <cmath>

#include "cxrcl/bench/report.hpp"
#include "cxrcl/clock.hpp"
#include "cxrcl/error.hpp"
#include "cxrcl/imaging/image_io.hpp"

namespace cxrcl::service {

namespace fs = std::filesystem;
using nlohmann::json;

void LatencyStats::add(double value) {
  ++count;
  const double delta = value - mean;
  mean += delta / static_cast<double>(count);
  m2 += delta * (value - mean);
}

double LatencyStats::stddev() const {
  return count < 2 ? 0.0 : std::sqrt(m2 / static_cast<double>(count));
}

namespace {

json latency_json(const LatencyStats& s) {
  return {{"count", s.count}, {"mean", s.mean}, {"stddev", s.stddev()}};
}

json load_benchmark_summary(const std::optional<fs::path>& path) {
  if (!path || !fs::exists(*path)) return nullptr;
  const auto format = path->extension() == ".json" ? bench::ReportFormat::kJson : bench::ReportFormat::kCsv;
  json out = json::array();
  for (const auto& r : bench::read_reports(*path, format)) {
    out.push_back({{"strategy", r.strategy},
                   {"seed", r.seed},
                   {"experiences", r.accuracy_trace.size()},
                   {"avg_accuracy", r.avg_accuracy},
                   {"avg_forgetting", r.avg_forgetting},
                   {"overall_performance", r.overall},
                   {"avg_eval_time_ms", r.avg_eval_time_ms},
                   {"accuracy_trace", r.accuracy_trace}});
  }
  return out;
}

}  // namespace

ScreeningService::ScreeningService(ServiceConfig config, ModelRegistry registry, Clock clock)
    : config_(std::move(config)),
      registry_(std::move(registry)),
      clock_(std::move(clock)),
      images_(config_.data_dir / "images") {
  model_version_ = registry_.version();
  replay();
  log_ = std::make_unique<EventLog>(config_.data_dir / "events.jsonl", config_.durable_log);
  benchmark_ = load_benchmark_summary(config_.benchmark_report);
}

ScreeningService::~ScreeningService() { stop(); }

void ScreeningService::replay() {
  const fs::path path = config_.data_dir / "events.jsonl";
  for (const auto& event : EventLog::replay(path)) {
    Submission s = submission_from_json(event.at("record"));
    next_id_ = std::max(next_id_, s.id + 1);
    records_[s.id] = std::move(s);
  }

  // A learn whose update reached a checkpoint before the crash is complete.
  const json& meta = registry_.loaded_meta();
  std::vector<Submission> repaired;
  for (auto& [id, s] : records_) {
    if (s.status == Status::kProcessing && s.type == SubmissionType::kLearn &&
        meta.value("submission_id", std::uint64_t{0}) == id) {
      s.status = Status::kLearned;
      const std::string written = registry_.history().back().created_at;
      s.learned_at = std::max(written, s.processed_at.value_or(s.created_at));
      repaired.push_back(s);
    } else if (s.status == Status::kProcessing) {
      s.status = Status::kQueued;
      s.processed_at.reset();
      repaired.push_back(s);
    }
    if (s.status == Status::kQueued) queue_.push_back(id);
    if (is_terminal(s.status) && s.duration_ms) {
      (s.type == SubmissionType::kClassify ? classify_latency_ : learn_latency_).add(*s.duration_ms);
    }
  }
  if (!repaired.empty()) {
    EventLog log(path, config_.durable_log);
    for (const auto& s : repaired) log.append(json{{"record", to_json(s)}});
  }
}

void ScreeningService::persist(const Submission& s) { log_->append(json{{"record", to_json(s)}}); }

void ScreeningService::transition(Submission& s, Status to) {
  require(can_transition(s.status, to), ErrorCode::kState,
          "illegal transition " + std::string(status_name(s.status)) + " -> " + std::string(status_name(to)));
  s.status = to;
}

std::uint64_t ScreeningService::enqueue(const Principal& who, const SubmissionRequest& request) {
  if (request.type == SubmissionType::kLearn) {
    require_role(who, {Role::kDoctor});
    require(request.label.has_value(), ErrorCode::kValidation, "learn submissions require a label");
  } else {
    require_role(who, {Role::kPatient, Role::kDoctor});
    require(!request.label.has_value(), ErrorCode::kValidation, "classify submissions must not carry a label");
  }
  try {
    (void)decode_image(request.image);
  } catch (const Error& e) {
    fail(ErrorCode::kValidation, std::string("unreadable image: ") + e.what());
  }
  const std::string digest = images_.put(request.image);

  std::lock_guard lock(mutex_);
  Submission s;
  s.id = next_id_++;
  s.submitter = who.user_id;
  s.type = request.type;
  s.image = digest;
  s.label = request.label;
  s.created_at = format_iso8601(clock_());
  persist(s);
  records_[s.id] = s;
  queue_.push_back(s.id);
  queue_cv_.notify_one();
  return s.id;
}

std::optional<Submission> ScreeningService::process_next() {
  std::lock_guard consumer(consumer_mutex_);
  Submission s;
  {
    std::lock_guard lock(mutex_);
    if (queue_.empty()) return std::nullopt;
    const std::uint64_t id = queue_.front();
    queue_.pop_front();
    in_flight_ = true;
    order_.push_back(id);
    s = records_.at(id);
    transition(s, Status::kProcessing);
    s.processed_at = format_iso8601(clock_());
    persist(s);
    records_[id] = s;
  }
  const auto processed_tp = clock_();
  const auto t0 = std::chrono::steady_clock::now();
  Status outcome = Status::kFailed;
  try {
    const Image prepared = registry_.prepare(decode_image(images_.get(s.image)));
    const ValidationResult v = registry_.validate_cxr(prepared);
    s.validator_confidence = v.confidence;
    if (!v.valid) {
      s.error_detail = "rejected: not a chest X-ray";
      outcome = Status::kRejected;
    } else {
      std::function<void(std::uint64_t)> audit;
      {
        std::lock_guard lock(mutex_);
        audit = audit_;
      }
      if (audit) audit(s.id);
      if (s.type == SubmissionType::kClassify) {
        const auto p = registry_.predict(prepared);
        s.prediction = PredictionRecord{p.label, p.probabilities, v.confidence};
        outcome = Status::kClassified;
      } else {
        registry_.learn(prepared, *s.label, "submission-" + std::to_string(s.id), json{{"submission_id", s.id}});
        s.learned_at = format_iso8601(std::max(clock_(), processed_tp));
        outcome = Status::kLearned;
      }
    }
  } catch (const std::exception& e) {
    s.error_detail = e.what();
    s.prediction.reset();
    s.learned_at.reset();
    outcome = Status::kFailed;
  }
  s.duration_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

  std::lock_guard lock(mutex_);
  transition(s, outcome);
  persist(s);
  records_[s.id] = s;
  (s.type == SubmissionType::kClassify ? classify_latency_ : learn_latency_).add(*s.duration_ms);
  model_version_ = registry_.version();
  in_flight_ = false;
  idle_cv_.notify_all();
  return s;
}

void ScreeningService::worker_loop() {
  for (;;) {
    {
      std::unique_lock lock(mutex_);
      queue_cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
      if (stopping_) return;
    }
    process_next();
  }
}

void ScreeningService::start() {
  std::lock_guard lock(mutex_);
  if (worker_.joinable()) return;
  stopping_ = false;
  worker_ = std::thread([this] { worker_loop(); });
}

void ScreeningService::stop() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  queue_cv_.notify_all();
  if (worker_.joinable()) worker_.join();
}

bool ScreeningService::wait_idle(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mutex_);
  return idle_cv_.wait_for(lock, timeout, [&] { return queue_.empty() && !in_flight_; });
}

std::uint64_t ScreeningService::confirm(const Principal& who, std::uint64_t id, ClassLabel label) {
  require_role(who, {Role::kDoctor});
  std::lock_guard lock(mutex_);
  const auto it = records_.find(id);
  require(it != records_.end(), ErrorCode::kNotFound, "submission " + std::to_string(id) + " not found");
  Submission& original = it->second;
  require(original.submitter == who.user_id ||
              std::find(who.patients.begin(), who.patients.end(), original.submitter) != who.patients.end(),
          ErrorCode::kForbidden, "doctor is not paired with the submitter");
  require(original.status == Status::kClassified, ErrorCode::kState,
          "submission " + std::to_string(id) + " is " + std::string(status_name(original.status)) +
              ", not classified");
  require(!original.confirmation.has_value(), ErrorCode::kState,
          "submission " + std::to_string(id) + " is already confirmed");

  Submission learn;
  learn.id = next_id_++;
  learn.submitter = who.user_id;
  learn.type = SubmissionType::kLearn;
  learn.image = original.image;
  learn.label = label;
  learn.created_at = format_iso8601(clock_());
  learn.source_submission = id;
  persist(learn);

  Submission annotated = original;
  annotated.confirmation = Confirmation{label, who.user_id, learn.id, learn.created_at};
  persist(annotated);
  original = std::move(annotated);
  records_[learn.id] = learn;
  queue_.push_back(learn.id);
  queue_cv_.notify_one();
  return learn.id;
}

bool ScreeningService::visible(const Principal& who, const Submission& s) const {
  switch (who.role) {
    case Role::kResearcher: return true;
    case Role::kPatient: return s.submitter == who.user_id;
    case Role::kDoctor:
      return s.submitter == who.user_id ||
             std::find(who.patients.begin(), who.patients.end(), s.submitter) != who.patients.end();
  }
  return false;
}

json ScreeningService::view(const Principal& who, const Submission& s) const {
  return who.role == Role::kResearcher ? anonymized_json(s) : to_json(s);
}

json ScreeningService::get(const Principal& who, std::uint64_t id) const {
  std::lock_guard lock(mutex_);
  const auto it = records_.find(id);
  require(it != records_.end(), ErrorCode::kNotFound, "submission " + std::to_string(id) + " not found");
  require(visible(who, it->second), ErrorCode::kForbidden, "submission " + std::to_string(id) + " is not visible");
  return view(who, it->second);
}

std::vector<json> ScreeningService::list(const Principal& who, const SubmissionFilter& filter) const {
  std::lock_guard lock(mutex_);
  std::vector<json> out;
  for (const auto& [id, s] : records_) {
    if (!visible(who, s)) continue;
    if (filter.status && s.status != *filter.status) continue;
    if (filter.type && s.type != *filter.type) continue;
    out.push_back(view(who, s));
  }
  return out;
}

json ScreeningService::metrics() const {
  std::lock_guard lock(mutex_);
  json counts = json::object();
  for (Status st : {Status::kQueued, Status::kProcessing, Status::kClassified, Status::kLearned,
                    Status::kRejected, Status::kFailed}) {
    counts[std::string(status_name(st))] = 0;
  }
  std::size_t processed = 0;
  for (const auto& [id, s] : records_) {
    counts[std::string(status_name(s.status))] = counts[std::string(status_name(s.status))].get<int>() + 1;
    if (is_terminal(s.status)) ++processed;
  }
  return {{"queue_depth", records_.size() - processed},
          {"enqueued", records_.size()},
          {"processed", processed},
          {"status_counts", counts},
          {"latency_ms", {{"classify", latency_json(classify_latency_)}, {"learn", latency_json(learn_latency_)}}},
          {"latency_samples", classify_latency_.count + learn_latency_.count},
          {"model_version", model_version_},
          {"benchmark", benchmark_}};
}

Submission ScreeningService::record(std::uint64_t id) const {
  std::lock_guard lock(mutex_);
  const auto it = records_.find(id);
  require(it != records_.end(), ErrorCode::kNotFound, "submission " + std::to_string(id) + " not found");
  return it->second;
}

std::vector<Submission> ScreeningService::records() const {
  std::lock_guard lock(mutex_);
  std::vector<Submission> out;
  for (const auto& [id, s] : records_) out.push_back(s);
  return out;
}

std::vector<std::uint64_t> ScreeningService::processing_order() const {
  std::lock_guard lock(mutex_);
  return order_;
}

std::size_t ScreeningService::queue_depth() const {
  std::lock_guard lock(mutex_);
  return queue_.size() + (in_flight_ ? 1 : 0);
}

void ScreeningService::set_classifier_audit(std::function<void(std::uint64_t)> audit) {
  std::lock_guard lock(mutex_);
  audit_ = std::move(audit);
}

}  // namespace cxrcl::service
