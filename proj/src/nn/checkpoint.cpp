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

#include "cxrcl/nn/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <iterator>

#include "cxrcl/clock.hpp"
#include "cxrcl/error.hpp"

namespace cxrcl::nn {
namespace {

using nlohmann::json;

void put_f32(std::string& out, float value) {
  const auto bits = std::bit_cast<std::uint32_t>(value);
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xffu));
}

float get_f32(const std::string& in, std::size_t offset) {
  std::uint32_t bits = 0;
  for (int b = 0; b < 4; ++b) {
    bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[offset + b])) << (8 * b);
  }
  return std::bit_cast<float>(bits);
}

struct SplitFile {
  json header;
  std::string payload;
};

SplitFile read_split(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kNotFound, "checkpoint not found: " + path.string());
  std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  const auto newline = bytes.find('\n');
  if (newline == std::string::npos) fail(ErrorCode::kIntegrity, path.string() + ": missing header line");
  SplitFile out;
  try {
    out.header = json::parse(bytes.substr(0, newline));
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kIntegrity, path.string() + ": unreadable header: " + e.what());
  }
  if (!out.header.is_object() || !out.header.contains("version") ||
      !out.header["version"].is_number_integer()) {
    fail(ErrorCode::kIntegrity, path.string() + ": header lacks an integer version");
  }
  const int version = out.header["version"].get<int>();
  if (version != kCheckpointVersion) {
    fail(ErrorCode::kUnsupportedVersion,
         path.string() + ": unsupported checkpoint version " + std::to_string(version));
  }
  out.payload = bytes.substr(newline + 1);
  return out;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Network& net, const json& meta,
                     const std::vector<CheckpointSection>& sections) {
  json header = {{"version", kCheckpointVersion},
                 {"layer_sizes", net.config().layer_sizes},
                 {"seed", net.config().seed},
                 {"created_at", utc_now_iso8601()}};
  if (!meta.is_null()) header["meta"] = meta;
  if (!sections.empty()) {
    json list = json::array();
    for (const auto& s : sections) list.push_back({{"name", s.name}, {"count", s.values.size()}});
    header["sections"] = std::move(list);
  }

  std::string blob = header.dump();
  blob.push_back('\n');
  const Vector flat = net.parameters().flatten();
  for (Eigen::Index i = 0; i < flat.size(); ++i) put_f32(blob, static_cast<float>(flat[i]));
  for (const auto& s : sections) {
    for (float v : s.values) put_f32(blob, v);
  }

  // Write to a sibling temp file first so a crash never leaves a torn checkpoint.
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::kIo, "cannot write checkpoint " + path.string());
    out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
    if (!out) fail(ErrorCode::kIo, "short write to " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

json read_checkpoint_header(const std::filesystem::path& path) { return read_split(path).header; }

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  SplitFile file = read_split(path);
  const json& h = file.header;

  NetworkConfig config;
  try {
    config.layer_sizes = h.at("layer_sizes").get<std::vector<std::size_t>>();
    config.seed = h.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    fail(ErrorCode::kIntegrity, path.string() + ": bad header field: " + e.what());
  }
  config.validate();

  Network net = Network::zeros(config);
  const std::size_t param_count = net.parameters().count();
  std::vector<std::pair<std::string, std::size_t>> layout;
  std::size_t total = param_count;
  if (h.contains("sections")) {
    for (const auto& s : h["sections"]) {
      layout.emplace_back(s.at("name").get<std::string>(), s.at("count").get<std::size_t>());
      total += layout.back().second;
    }
  }
  if (file.payload.size() != total * 4) {
    fail(ErrorCode::kIntegrity, path.string() + ": payload holds " +
                                    std::to_string(file.payload.size()) + " bytes, header implies " +
                                    std::to_string(total * 4));
  }

  Vector flat(static_cast<Eigen::Index>(param_count));
  for (std::size_t i = 0; i < param_count; ++i) {
    flat[static_cast<Eigen::Index>(i)] = static_cast<double>(get_f32(file.payload, i * 4));
  }
  net.mutable_parameters().assign(flat);

  Checkpoint out{std::move(net), h.value("created_at", std::string{}),
                 h.contains("meta") ? h["meta"] : json(nullptr), {}};
  std::size_t offset = param_count * 4;
  for (const auto& [name, count] : layout) {
    CheckpointSection section{name, std::vector<float>(count)};
    for (std::size_t i = 0; i < count; ++i) section.values[i] = get_f32(file.payload, offset + i * 4);
    offset += count * 4;
    out.sections.push_back(std::move(section));
  }
  return out;
}

}  // namespace cxrcl::nn
