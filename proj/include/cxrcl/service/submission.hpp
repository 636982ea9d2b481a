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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "cxrcl/imaging/image.hpp"

namespace cxrcl::service {

enum class SubmissionType { kClassify, kLearn };
enum class Status { kQueued, kProcessing, kClassified, kLearned, kRejected, kFailed };

std::string_view type_name(SubmissionType type) noexcept;
std::optional<SubmissionType> parse_type(std::string_view name) noexcept;
std::string_view status_name(Status status) noexcept;
std::optional<Status> parse_status(std::string_view name) noexcept;

constexpr bool is_terminal(Status s) noexcept {
  return s == Status::kClassified || s == Status::kLearned || s == Status::kRejected ||
         s == Status::kFailed;
}
/// queued -> processing -> terminal.
bool can_transition(Status from, Status to) noexcept;

struct PredictionRecord {
  ClassLabel label = ClassLabel::kCovid19;
  std::array<double, kNumClasses> probabilities{};  // indexed by class ordinal
  double validator_confidence = 0.0;
  friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

struct Confirmation {
  ClassLabel label = ClassLabel::kCovid19;
  std::string doctor;
  std::uint64_t learn_id = 0;
  std::string confirmed_at;
  friend bool operator==(const Confirmation&, const Confirmation&) = default;
};

struct Submission {
  std::uint64_t id = 0;
  std::string submitter;
  SubmissionType type = SubmissionType::kClassify;
  std::string image;  // sha256 of the stored bytes
  std::optional<ClassLabel> label;
  Status status = Status::kQueued;
  std::optional<PredictionRecord> prediction;
  std::optional<double> validator_confidence;
  std::string created_at;
  std::optional<std::string> processed_at;
  std::optional<std::string> learned_at;
  std::optional<std::string> error_detail;
  std::optional<double> duration_ms;  // processing wall time
  std::optional<std::uint64_t> source_submission;  // for learns created by confirm
  std::optional<Confirmation> confirmation;
  friend bool operator==(const Submission&, const Submission&) = default;
};

nlohmann::json to_json(const Submission& s);
/// Throws kParse on malformed records.
Submission submission_from_json(const nlohmann::json& doc);

/// Copy with the submitter identity removed.
nlohmann::json anonymized_json(const Submission& s);

}  // namespace cxrcl::service
