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

#include "cxrcl/service/event_log.hpp"

#include <unistd.h>

#include <fstream>
#include <sstream>

#include "cxrcl/error.hpp"
#include "cxrcl/imaging/image_io.hpp"
#include "cxrcl/service/codec.hpp"

namespace cxrcl::service {

namespace fs = std::filesystem;
using nlohmann::json;

EventLog::EventLog(fs::path path, bool durable) : path_(std::move(path)), durable_(durable) {
  if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
  file_ = std::fopen(path_.c_str(), "ab");
  require(file_ != nullptr, ErrorCode::kIo, "cannot open event log " + path_.string());
}

EventLog::~EventLog() {
  if (file_ != nullptr) std::fclose(file_);
}

void EventLog::append(const json& event) {
  const std::string line = event.dump() + "\n";
  std::lock_guard lock(mutex_);
  require(std::fwrite(line.data(), 1, line.size(), file_) == line.size() && std::fflush(file_) == 0,
          ErrorCode::kIo, "event log write failed");
  if (durable_) ::fsync(::fileno(file_));
}

std::vector<json> EventLog::replay(const fs::path& path) {
  std::vector<json> events;
  if (!fs::exists(path)) return events;
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  std::size_t pos = 0, good_end = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const bool complete = nl != std::string::npos;
    const std::string line = text.substr(pos, complete ? nl - pos : std::string::npos);
    const std::size_t next = complete ? nl + 1 : text.size();
    json parsed = json::parse(line, nullptr, false);
    if (!complete || parsed.is_discarded()) {
      require(next >= text.size(), ErrorCode::kIntegrity,
              "corrupt event log line at byte " + std::to_string(pos) + " of " + path.string());
      break;  // torn tail
    }
    events.push_back(std::move(parsed));
    pos = good_end = next;
  }
  if (good_end < text.size()) fs::resize_file(path, good_end);
  return events;
}

ImageStore::ImageStore(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

std::string ImageStore::put(std::span<const std::uint8_t> bytes) {
  const std::string digest = sha256_hex(bytes);
  const fs::path target = dir_ / digest;
  if (!fs::exists(target)) {
    const fs::path tmp = dir_ / (digest + "." + random_hex(6) + ".tmp");
    write_file_bytes(tmp, bytes);
    fs::rename(tmp, target);
  }
  return digest;
}

std::vector<std::uint8_t> ImageStore::get(const std::string& digest) const {
  const fs::path target = dir_ / digest;
  require(fs::exists(target), ErrorCode::kNotFound, "image " + digest + " not in store");
  auto bytes = read_file_bytes(target);
  require(sha256_hex(bytes) == digest, ErrorCode::kIntegrity, "stored image " + digest + " is corrupt");
  return bytes;
}

bool ImageStore::contains(const std::string& digest) const { return fs::exists(dir_ / digest); }

}  // namespace cxrcl::service
