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

#include "cxrcl/service/submission.hpp"

#include "cxrcl/error.hpp"

namespace cxrcl::service {

using nlohmann::json;

std::string_view type_name(SubmissionType type) noexcept {
  return type == SubmissionType::kClassify ? "classify" : "learn";
}

std::optional<SubmissionType> parse_type(std::string_view name) noexcept {
  if (name == "classify") return SubmissionType::kClassify;
  if (name == "learn") return SubmissionType::kLearn;
  return std::nullopt;
}

std::string_view status_name(Status status) noexcept {
  switch (status) {
    case Status::kQueued: return "queued";
    case Status::kProcessing: return "processing";
    case Status::kClassified: return "classified";
    case Status::kLearned: return "learned";
    case Status::kRejected: return "rejected";
    case Status::kFailed: return "failed";
  }
  return "failed";
}

std::optional<Status> parse_status(std::string_view name) noexcept {
  for (Status s : {Status::kQueued, Status::kProcessing, Status::kClassified, Status::kLearned,
                   Status::kRejected, Status::kFailed}) {
    if (status_name(s) == name) return s;
  }
  return std::nullopt;
}

bool can_transition(Status from, Status to) noexcept {
  if (from == Status::kQueued) return to == Status::kProcessing;
  if (from == Status::kProcessing) return is_terminal(to);
  return false;
}

json to_json(const Submission& s) {
  json doc{{"id", s.id},
           {"submitter", s.submitter},
           {"type", type_name(s.type)},
           {"image", s.image},
           {"status", status_name(s.status)},
           {"created_at", s.created_at}};
  if (s.label) doc["label"] = label_name(*s.label);
  if (s.prediction) {
    json probs = json::object();
    for (ClassLabel l : kAllLabels) probs[std::string(label_name(l))] = s.prediction->probabilities[ordinal(l)];
    doc["prediction"] = {{"label", label_name(s.prediction->label)},
                         {"probabilities", probs},
                         {"validator_confidence", s.prediction->validator_confidence}};
  }
  if (s.validator_confidence) doc["validator_confidence"] = *s.validator_confidence;
  if (s.processed_at) doc["processed_at"] = *s.processed_at;
  if (s.learned_at) doc["learned_at"] = *s.learned_at;
  if (s.error_detail) doc["error_detail"] = *s.error_detail;
  if (s.duration_ms) doc["duration_ms"] = *s.duration_ms;
  if (s.source_submission) doc["source_submission"] = *s.source_submission;
  if (s.confirmation) {
    doc["confirmation"] = {{"label", label_name(s.confirmation->label)},
                           {"doctor", s.confirmation->doctor},
                           {"learn_id", s.confirmation->learn_id},
                           {"confirmed_at", s.confirmation->confirmed_at}};
  }
  return doc;
}

namespace {

ClassLabel label_field(const json& doc, const char* key) {
  const auto label = parse_label(doc.at(key).get<std::string>());
  require(label.has_value(), ErrorCode::kParse, std::string("unknown label in field ") + key);
  return *label;
}

}  // namespace

Submission submission_from_json(const json& doc) {
  try {
    Submission s;
    s.id = doc.at("id").get<std::uint64_t>();
    s.submitter = doc.at("submitter").get<std::string>();
    const auto type = parse_type(doc.at("type").get<std::string>());
    require(type.has_value(), ErrorCode::kParse, "unknown submission type");
    s.type = *type;
    s.image = doc.at("image").get<std::string>();
    const auto status = parse_status(doc.at("status").get<std::string>());
    require(status.has_value(), ErrorCode::kParse, "unknown submission status");
    s.status = *status;
    s.created_at = doc.at("created_at").get<std::string>();
    if (doc.contains("label")) s.label = label_field(doc, "label");
    if (doc.contains("prediction")) {
      const json& p = doc["prediction"];
      PredictionRecord rec;
      rec.label = label_field(p, "label");
      for (ClassLabel l : kAllLabels) rec.probabilities[ordinal(l)] = p.at("probabilities").at(std::string(label_name(l))).get<double>();
      rec.validator_confidence = p.at("validator_confidence").get<double>();
      s.prediction = rec;
    }
    if (doc.contains("validator_confidence")) s.validator_confidence = doc["validator_confidence"].get<double>();
    if (doc.contains("processed_at")) s.processed_at = doc["processed_at"].get<std::string>();
    if (doc.contains("learned_at")) s.learned_at = doc["learned_at"].get<std::string>();
    if (doc.contains("error_detail")) s.error_detail = doc["error_detail"].get<std::string>();
    if (doc.contains("duration_ms")) s.duration_ms = doc["duration_ms"].get<double>();
    if (doc.contains("source_submission")) s.source_submission = doc["source_submission"].get<std::uint64_t>();
    if (doc.contains("confirmation")) {
      const json& c = doc["confirmation"];
      s.confirmation = Confirmation{label_field(c, "label"), c.at("doctor").get<std::string>(),
                                    c.at("learn_id").get<std::uint64_t>(),
                                    c.at("confirmed_at").get<std::string>()};
    }
    return s;
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, std::string("malformed submission record: ") + e.what());
  }
}

json anonymized_json(const Submission& s) {
  json doc = to_json(s);
  doc.erase("submitter");
  if (doc.contains("confirmation")) doc["confirmation"].erase("doctor");
  return doc;
}

}  // namespace cxrcl::service
