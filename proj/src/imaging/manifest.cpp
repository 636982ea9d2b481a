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

#include "cxrcl/imaging/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cxrcl/error.hpp"
#include "cxrcl/imaging/image_io.hpp"

namespace cxrcl {
namespace {

using nlohmann::json;

std::vector<SampleRef> parse_split(const json& doc, const char* name,
                                   const std::filesystem::path& base) {
  std::vector<SampleRef> out;
  if (!doc.contains(name)) return out;
  const json& arr = doc.at(name);
  if (!arr.is_array()) fail(ErrorCode::kParse, std::string("split '") + name + "' is not an array");

  std::set<std::string> seen;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const json& rec = arr[i];
    const std::string where = std::string(name) + "[" + std::to_string(i) + "]";
    if (!rec.is_object() || !rec.contains("id") || !rec["id"].is_string() ||
        !rec.contains("image_path") || !rec["image_path"].is_string() ||
        !rec.contains("label") || !rec["label"].is_string()) {
      fail(ErrorCode::kParse, where + ": record needs string fields id, image_path, label");
    }
    SampleRef ref;
    ref.id = rec["id"].get<std::string>();
    const auto label = parse_label(rec["label"].get<std::string>());
    if (!label) fail(ErrorCode::kParse, where + ": unknown label '" + rec["label"].get<std::string>() + "'");
    ref.label = *label;
    ref.image_path = base / rec["image_path"].get<std::string>();
    if (rec.contains("mask_path") && !rec["mask_path"].is_null()) {
      if (!rec["mask_path"].is_string()) fail(ErrorCode::kParse, where + ": mask_path must be a string");
      ref.mask_path = base / rec["mask_path"].get<std::string>();
    }
    if (!seen.insert(ref.id).second) fail(ErrorCode::kParse, where + ": duplicate id '" + ref.id + "'");
    out.push_back(std::move(ref));
  }
  std::sort(out.begin(), out.end(), [](const SampleRef& a, const SampleRef& b) { return a.id < b.id; });
  return out;
}

std::string relative_or_absolute(const std::filesystem::path& p, const std::filesystem::path& base) {
  std::error_code ec;
  const auto rel = std::filesystem::relative(p, base, ec);
  if (ec || rel.empty()) return p.string();
  return rel.generic_string();
}

}  // namespace

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kNotFound, "manifest not found: " + path.string());
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};

  DatasetManifest manifest;
  if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); })) {
    return manifest;
  }
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kParse, path.string() + ": " + e.what());
  }
  if (!doc.is_object()) fail(ErrorCode::kParse, path.string() + ": manifest must be a JSON object");

  const auto base = path.parent_path();
  manifest.train = parse_split(doc, "train", base);
  manifest.validation = parse_split(doc, "validation", base);
  manifest.test = parse_split(doc, "test", base);

  if (doc.contains("preprocessing")) {
    const json& pre = doc["preprocessing"];
    if (!pre.is_object()) fail(ErrorCode::kParse, "preprocessing must be an object");
    if (pre.contains("strategy")) {
      const auto s = pre["strategy"].is_string() ? parse_strategy(pre["strategy"].get<std::string>())
                                                 : std::nullopt;
      if (!s) fail(ErrorCode::kParse, "preprocessing.strategy must be original|cropped|segmented");
      manifest.strategy = *s;
    }
    if (pre.contains("equalize")) {
      if (!pre["equalize"].is_boolean()) fail(ErrorCode::kParse, "preprocessing.equalize must be a bool");
      manifest.equalize = pre["equalize"].get<bool>();
    }
  }

  std::map<std::string, const char*> owner;
  const std::pair<const char*, const std::vector<SampleRef>*> splits[] = {
      {"train", &manifest.train}, {"validation", &manifest.validation}, {"test", &manifest.test}};
  for (const auto& [name, refs] : splits) {
    for (const auto& ref : *refs) {
      const auto [it, inserted] = owner.emplace(ref.id, name);
      if (!inserted) {
        fail(ErrorCode::kSplitOverlap,
             "id '" + ref.id + "' appears in both " + it->second + " and " + name);
      }
    }
  }
  return manifest;
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  const auto base = path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path();
  auto split = [&](const std::vector<SampleRef>& refs) {
    json arr = json::array();
    for (const auto& ref : refs) {
      json rec = {{"id", ref.id},
                  {"image_path", relative_or_absolute(ref.image_path, base)},
                  {"label", std::string(label_name(ref.label))}};
      if (ref.mask_path) rec["mask_path"] = relative_or_absolute(*ref.mask_path, base);
      arr.push_back(std::move(rec));
    }
    return arr;
  };
  const json doc = {{"train", split(manifest.train)},
                    {"validation", split(manifest.validation)},
                    {"test", split(manifest.test)},
                    {"preprocessing",
                     {{"strategy", std::string(strategy_name(manifest.strategy))},
                      {"equalize", manifest.equalize}}}};
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write manifest " + path.string());
  out << doc.dump(2) << '\n';
}

std::vector<Sample> load_samples(const std::vector<SampleRef>& refs, std::size_t width,
                                 std::size_t height) {
  std::vector<Sample> out;
  out.reserve(refs.size());
  for (const auto& ref : refs) {
    out.push_back({resize(load_image(ref.image_path), width, height), ordinal(ref.label), ref.id});
  }
  return out;
}

}  // namespace cxrcl
