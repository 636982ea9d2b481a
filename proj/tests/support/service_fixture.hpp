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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <random>
#include <vector>

#include <json.hpp>

#include "cxrcl/imaging/image_io.hpp"
#include "cxrcl/nn/network.hpp"
#include "cxrcl/nn/trainer.hpp"
#include "cxrcl/service/auth.hpp"
#include "cxrcl/service/registry.hpp"
#include "cxrcl/service/service.hpp"
#include "cxrcl/synth.hpp"
#include "test_support.hpp"

namespace cxrcl::testing {

inline constexpr std::size_t kSide = 32;

// Small screening and validator models trained once per process.
struct ModelFixture {
  TempDir dir;
  std::filesystem::path screening;
  std::filesystem::path validator;
  std::vector<Sample> xrays;    // validator positives, screening training set
  std::vector<Image> noise;     // validator negatives
};

inline const ModelFixture& model_fixture() {
  static const std::unique_ptr<ModelFixture> fixture = [] {
    auto f = std::make_unique<ModelFixture>();
    std::mt19937_64 rng(42);
    for (int i = 0; i < 90; ++i) {
      const ClassLabel label = kAllLabels[static_cast<std::size_t>(i % 3)];
      f->xrays.push_back({synth::xray_like(label, kSide, kSide, rng), ordinal(label), "x" + std::to_string(i)});
    }
    for (int i = 0; i < 90; ++i) f->noise.push_back(synth::non_xray(kSide, kSide, rng));

    nn::TrainConfig tc;
    tc.max_epochs = 12;
    tc.batch_size = 16;
    tc.patience = 3;
    tc.seed = 1;
    const auto screening = nn::fit(nn::Network(nn::NetworkConfig{{kSide * kSide, 32, 3}, 1}), f->xrays, {}, tc);
    f->screening = f->dir / "screening.ckpt";
    service::save_screening_checkpoint(f->screening, screening.network, {kSide, kSide});

    std::vector<Image> positives;
    for (const auto& s : f->xrays) positives.push_back(s.image);
    const auto validator =
        service::train_validator(positives, f->noise, nn::NetworkConfig{{kSide * kSide, 16, 2}, 2}, tc);
    f->validator = f->dir / "validator.ckpt";
    service::save_validator_checkpoint(f->validator, validator.network, {kSide, kSide});
    return f;
  }();
  return *fixture;
}

inline service::RegistryConfig registry_config(const std::filesystem::path& checkpoint_dir) {
  const auto& f = model_fixture();
  service::RegistryConfig rc;
  rc.screening_checkpoint = f.screening;
  rc.validator_checkpoint = f.validator;
  rc.checkpoint_dir = checkpoint_dir;
  return rc;
}

inline std::vector<std::uint8_t> xray_png(std::size_t index) {
  const auto& f = model_fixture();
  return encode_png(f.xrays[index % f.xrays.size()].image);
}

inline std::vector<std::uint8_t> noise_png(std::size_t index) {
  const auto& f = model_fixture();
  return encode_png(f.noise[index % f.noise.size()]);
}

inline nlohmann::json bootstrap_users() {
  return {{"users",
           {{{"id", "patient-1"}, {"role", "patient"}, {"password", "pw"}},
            {{"id", "patient-2"}, {"role", "patient"}, {"password", "pw"}},
            {{"id", "doctor-1"}, {"role", "doctor"}, {"password", "pw"}},
            {{"id", "doctor-2"}, {"role", "doctor"}, {"password", "pw"}},
            {{"id", "researcher-1"}, {"role", "researcher"}, {"password", "pw"}}}},
          {"pairings",
           {{{"doctor", "doctor-1"}, {"patient", "patient-1"}},
            {{"doctor", "doctor-2"}, {"patient", "patient-2"}}}}};
}

inline service::Principal patient(const std::string& id) { return {id, service::Role::kPatient, {}}; }
inline service::Principal doctor(const std::string& id, std::vector<std::string> patients) {
  return {id, service::Role::kDoctor, std::move(patients)};
}
inline service::Principal researcher() { return {"researcher-1", service::Role::kResearcher, {}}; }

// Manually advanced clock for expiry and timestamp tests.
struct ManualClock {
  std::shared_ptr<std::mutex> mu = std::make_shared<std::mutex>();
  std::shared_ptr<std::chrono::system_clock::time_point> now =
      std::make_shared<std::chrono::system_clock::time_point>(std::chrono::sys_days{std::chrono::year{2024} / 1 / 1});
  service::Clock clock() const {
    return [mu = mu, now = now] {
      std::lock_guard lock(*mu);
      return *now;
    };
  }
  void advance(std::chrono::milliseconds d) const {
    std::lock_guard lock(*mu);
    *now += d;
  }
};

}  // namespace cxrcl::testing
