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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cxrcl/bench/runner.hpp"

namespace cxrcl::bench {

enum class ReportFormat { kCsv, kJson };

/// Column order of the CSV format. Traces are ';'-joined lists.
inline constexpr std::string_view kCsvHeader =
    "strategy,seed,experiences,avg_accuracy,std_accuracy,avg_forgetting,std_forgetting,"
    "overall_performance,avg_eval_time_ms,accuracy_trace,eval_times_ms";

nlohmann::json to_json(const BenchmarkReport& report);
BenchmarkReport report_from_json(const nlohmann::json& doc);

std::string to_csv_row(const BenchmarkReport& report);
BenchmarkReport report_from_csv_row(std::string_view row);

/// CSV appends a row (writing the header first for a new or empty file); JSON
/// keeps an array of reports and appends to it. Numbers are written with
/// round-trip precision.
void emit_report(const BenchmarkReport& report, ReportFormat format, const std::filesystem::path& path);
std::vector<BenchmarkReport> read_reports(const std::filesystem::path& path, ReportFormat format);

}  // namespace cxrcl::bench
