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

#include "cxrcl/bench/report.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>

#include "cxrcl/error.hpp"

namespace cxrcl::bench {
namespace {

using nlohmann::json;

std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& text) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) {
    fail(ErrorCode::kParse, "bad number in report: '" + text + "'");
  }
  return v;
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ';';
    out += exact(values[i]);
  }
  return out;
}

std::vector<double> split_doubles(const std::string& text) {
  std::vector<double> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) out.push_back(parse_double(item));
  return out;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return {};
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

json to_json(const BenchmarkReport& r) {
  return {{"strategy", r.strategy},
          {"seed", r.seed},
          {"experiences", r.accuracy_trace.size()},
          {"avg_accuracy", r.avg_accuracy},
          {"std_accuracy", r.std_accuracy},
          {"avg_forgetting", r.avg_forgetting},
          {"std_forgetting", r.std_forgetting},
          {"overall_performance", r.overall},
          {"avg_eval_time_ms", r.avg_eval_time_ms},
          {"accuracy_trace", r.accuracy_trace},
          {"eval_times_ms", r.eval_times_ms}};
}

BenchmarkReport report_from_json(const json& doc) {
  try {
    BenchmarkReport r;
    r.strategy = doc.at("strategy").get<std::string>();
    r.seed = doc.at("seed").get<std::uint64_t>();
    r.avg_accuracy = doc.at("avg_accuracy").get<double>();
    r.std_accuracy = doc.at("std_accuracy").get<double>();
    r.avg_forgetting = doc.at("avg_forgetting").get<double>();
    r.std_forgetting = doc.at("std_forgetting").get<double>();
    r.overall = doc.at("overall_performance").get<double>();
    r.avg_eval_time_ms = doc.at("avg_eval_time_ms").get<double>();
    r.accuracy_trace = doc.at("accuracy_trace").get<std::vector<double>>();
    r.eval_times_ms = doc.at("eval_times_ms").get<std::vector<double>>();
    return r;
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, std::string("malformed report: ") + e.what());
  }
}

std::string to_csv_row(const BenchmarkReport& r) {
  return r.strategy + "," + std::to_string(r.seed) + "," + std::to_string(r.accuracy_trace.size()) +
         "," + exact(r.avg_accuracy) + "," + exact(r.std_accuracy) + "," + exact(r.avg_forgetting) +
         "," + exact(r.std_forgetting) + "," + exact(r.overall) + "," + exact(r.avg_eval_time_ms) +
         "," + join(r.accuracy_trace) + "," + join(r.eval_times_ms);
}

BenchmarkReport report_from_csv_row(std::string_view row) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : row) {
    if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else if (c != '\r' && c != '\n') {
      current.push_back(c);
    }
  }
  fields.push_back(std::move(current));
  if (fields.size() != 11) fail(ErrorCode::kParse, "report row needs 11 fields");

  BenchmarkReport r;
  r.strategy = fields[0];
  r.seed = std::stoull(fields[1]);
  r.avg_accuracy = parse_double(fields[3]);
  r.std_accuracy = parse_double(fields[4]);
  r.avg_forgetting = parse_double(fields[5]);
  r.std_forgetting = parse_double(fields[6]);
  r.overall = parse_double(fields[7]);
  r.avg_eval_time_ms = parse_double(fields[8]);
  r.accuracy_trace = split_doubles(fields[9]);
  r.eval_times_ms = split_doubles(fields[10]);
  if (r.accuracy_trace.size() != std::stoull(fields[2])) {
    fail(ErrorCode::kParse, "experience count disagrees with the accuracy trace");
  }
  return r;
}

void emit_report(const BenchmarkReport& report, ReportFormat format, const std::filesystem::path& path) {
  if (format == ReportFormat::kCsv) {
    const bool fresh = slurp(path).empty();
    std::ofstream out(path, std::ios::app);
    if (!out) fail(ErrorCode::kIo, "cannot write report " + path.string());
    if (fresh) out << kCsvHeader << '\n';
    out << to_csv_row(report) << '\n';
    if (!out) fail(ErrorCode::kIo, "short write to " + path.string());
    return;
  }
  json doc = json::array();
  const std::string existing = slurp(path);
  if (!existing.empty()) {
    try {
      doc = json::parse(existing);
    } catch (const json::parse_error& e) {
      fail(ErrorCode::kParse, path.string() + ": " + e.what());
    }
    if (!doc.is_array()) fail(ErrorCode::kParse, path.string() + ": expected a JSON array of reports");
  }
  doc.push_back(to_json(report));
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write report " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) fail(ErrorCode::kIo, "short write to " + path.string());
}

std::vector<BenchmarkReport> read_reports(const std::filesystem::path& path, ReportFormat format) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kNotFound, "report not found: " + path.string());
  std::vector<BenchmarkReport> out;
  if (format == ReportFormat::kCsv) {
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) fail(ErrorCode::kParse, "unexpected CSV header");
    while (std::getline(in, line)) {
      if (!line.empty()) out.push_back(report_from_csv_row(line));
    }
    return out;
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kParse, path.string() + ": " + e.what());
  }
  for (const auto& r : doc) out.push_back(report_from_json(r));
  return out;
}

}  // namespace cxrcl::bench
