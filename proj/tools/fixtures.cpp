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

#include <CLI11.hpp>

#include <iostream>
#include <random>

#include <json.hpp>

#include "cxrcl/error.hpp"
#include "cxrcl/imaging/image_io.hpp"
#include "cxrcl/imaging/manifest.hpp"
#include "cxrcl/random.hpp"
#include "cxrcl/synth.hpp"

namespace fs = std::filesystem;

namespace {

using namespace cxrcl;

void write_dataset(const fs::path& out, std::size_t per_class, std::size_t val, std::size_t test,
                   std::size_t size, std::uint64_t seed) {
  fs::create_directories(out / "images");
  fs::create_directories(out / "masks");
  const Image mask = synth::lung_mask(size, size);
  save_image(mask, out / "masks" / "lung.png");
  DatasetManifest m;
  auto split = [&](std::vector<SampleRef>& dst, const char* tag, std::size_t count, std::uint64_t stream) {
    std::mt19937_64 rng(derive_seed(seed, stream));
    for (std::size_t i = 0; i < count; ++i) {
      for (ClassLabel l : kAllLabels) {
        const std::string id = std::string(tag) + "-" + std::to_string(ordinal(l)) + "-" + std::to_string(i);
        const fs::path path = out / "images" / (id + ".png");
        save_image(synth::xray_like(l, size, size, rng), path);
        dst.push_back({id, path, out / "masks" / "lung.png", l});
      }
    }
  };
  split(m.train, "train", per_class, 0);
  split(m.validation, "val", val, 1);
  split(m.test, "test", test, 2);
  save_manifest(m, out / "manifest.json");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cxrcl_fixtures: synthetic fixture generator"};
  app.require_subcommand(1);
  fs::path out;
  std::size_t size = 64, per_class = 20, val = 4, test = 6;
  std::uint64_t seed = 0;
  std::string label = "Normal";
  std::string password = "secret";

  auto* dataset = app.add_subcommand("dataset", "Labelled chest-X-ray-like dataset with lung masks and manifest");
  dataset->add_option("--out", out)->required();
  dataset->add_option("--size", size);
  dataset->add_option("--per-class", per_class);
  dataset->add_option("--val", val, "Validation images per class");
  dataset->add_option("--test", test, "Test images per class");
  dataset->add_option("--seed", seed);

  auto* xray = app.add_subcommand("xray", "One chest-X-ray-like PNG");
  xray->add_option("--out", out)->required();
  xray->add_option("--label", label);
  xray->add_option("--size", size);
  xray->add_option("--seed", seed);

  auto* noise = app.add_subcommand("noise", "One non-X-ray PNG");
  noise->add_option("--out", out)->required();
  noise->add_option("--size", size);
  noise->add_option("--seed", seed);

  auto* users = app.add_subcommand("users", "User bootstrap file with one paired doctor and patient");
  users->add_option("--out", out)->required();
  users->add_option("--password", password);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    std::mt19937_64 rng(seed);
    if (dataset->parsed()) {
      write_dataset(out, per_class, val, test, size, seed);
      std::cout << "manifest: " << (out / "manifest.json").string() << "\n";
    } else if (xray->parsed()) {
      const auto l = parse_label(label);
      require(l.has_value(), ErrorCode::kInvalidArgument, "unknown label " + label);
      save_image(synth::xray_like(*l, size, size, rng), out);
    } else if (noise->parsed()) {
      save_image(synth::non_xray(size, size, rng), out);
    } else if (users->parsed()) {
      const nlohmann::json doc{
          {"users",
           {{{"id", "patient-1"}, {"role", "patient"}, {"password", password}},
            {{"id", "patient-2"}, {"role", "patient"}, {"password", password}},
            {{"id", "doctor-1"}, {"role", "doctor"}, {"password", password}},
            {{"id", "doctor-2"}, {"role", "doctor"}, {"password", password}},
            {{"id", "researcher-1"}, {"role", "researcher"}, {"password", password}}}},
          {"pairings", {{{"doctor", "doctor-1"}, {"patient", "patient-1"}}, {{"doctor", "doctor-2"}, {"patient", "patient-2"}}}}};
      std::string text = doc.dump(2) + "\n";
      write_file_bytes(out, std::vector<std::uint8_t>(text.begin(), text.end()));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
