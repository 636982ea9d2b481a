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

#include <cstdio>
#include <filesystem>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace cxrcl::service {

/// Append-only JSON-lines log. Every append is flushed (and fsync'd when
/// durable) before returning; appends from several threads are serialized.
class EventLog {
 public:
  explicit EventLog(std::filesystem::path path, bool durable = true);
  ~EventLog();
  EventLog(const EventLog&) = delete;
  EventLog& operator=(const EventLog&) = delete;

  void append(const nlohmann::json& event);
  const std::filesystem::path& path() const noexcept { return path_; }

  /// Parsed lines in order. A torn final line (no newline or unparsable) is
  /// dropped and truncated away; a bad line elsewhere is kIntegrity.
  static std::vector<nlohmann::json> replay(const std::filesystem::path& path);

 private:
  std::filesystem::path path_;
  bool durable_;
  std::FILE* file_ = nullptr;
  std::mutex mutex_;
};

/// Content-addressed blob directory: each blob lives at <dir>/<sha256>.
class ImageStore {
 public:
  explicit ImageStore(std::filesystem::path dir);
  /// Returns the digest. Storing the same bytes twice is a no-op.
  std::string put(std::span<const std::uint8_t> bytes);
  /// kNotFound for unknown digests, kIntegrity if the content no longer matches.
  std::vector<std::uint8_t> get(const std::string& digest) const;
  bool contains(const std::string& digest) const;

 private:
  std::filesystem::path dir_;
};

}  // namespace cxrcl::service
