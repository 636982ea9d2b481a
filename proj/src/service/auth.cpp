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

#include "cxrcl/service/auth.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>

#include <algorithm>
#include <fstream>

#include "cxrcl/error.hpp"
#include "cxrcl/service/codec.hpp"

namespace cxrcl::service {

using nlohmann::json;

namespace {

constexpr int kPbkdf2Iterations = 20000;

std::string derive(std::string_view password, const std::string& salt) {
  std::uint8_t out[32];
  require(PKCS5_PBKDF2_HMAC(password.data(), static_cast<int>(password.size()),
                            reinterpret_cast<const unsigned char*>(salt.data()), static_cast<int>(salt.size()),
                            kPbkdf2Iterations, EVP_sha256(), sizeof out, out) == 1,
          ErrorCode::kIo, "PBKDF2 failure");
  return sha256_hex(out);
}

}  // namespace

std::string_view role_name(Role role) noexcept {
  switch (role) {
    case Role::kPatient: return "patient";
    case Role::kDoctor: return "doctor";
    case Role::kResearcher: return "researcher";
  }
  return "patient";
}

std::optional<Role> parse_role(std::string_view name) noexcept {
  for (Role r : {Role::kPatient, Role::kDoctor, Role::kResearcher}) {
    if (role_name(r) == name) return r;
  }
  return std::nullopt;
}

Clock system_clock() {
  return [] { return std::chrono::system_clock::now(); };
}

UserDirectory UserDirectory::from_json(const json& doc) {
  UserDirectory dir;
  try {
    for (const auto& u : doc.at("users")) {
      User user;
      user.id = u.at("id").get<std::string>();
      require(!user.id.empty(), ErrorCode::kParse, "user id must not be empty");
      const auto role = parse_role(u.at("role").get<std::string>());
      require(role.has_value(), ErrorCode::kParse, "unknown role for user " + user.id);
      user.role = *role;
      user.salt = random_hex(16);
      user.digest = derive(u.at("password").get<std::string>(), user.salt);
      require(dir.users_.emplace(user.id, std::move(user)).second, ErrorCode::kParse,
              "duplicate user id " + u.at("id").get<std::string>());
    }
    for (const auto& p : doc.value("pairings", json::array())) {
      const auto doctor = p.at("doctor").get<std::string>();
      const auto patient = p.at("patient").get<std::string>();
      auto d = dir.users_.find(doctor);
      auto q = dir.users_.find(patient);
      require(d != dir.users_.end() && d->second.role == Role::kDoctor, ErrorCode::kParse,
              "pairing references unknown doctor " + doctor);
      require(q != dir.users_.end() && q->second.role == Role::kPatient, ErrorCode::kParse,
              "pairing references unknown patient " + patient);
      if (std::find(d->second.patients.begin(), d->second.patients.end(), patient) == d->second.patients.end()) {
        d->second.patients.push_back(patient);
      }
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, std::string("malformed user bootstrap: ") + e.what());
  }
  return dir;
}

UserDirectory UserDirectory::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::kNotFound, "user bootstrap file not found: " + path.string());
  const json doc = json::parse(in, nullptr, false);
  require(!doc.is_discarded(), ErrorCode::kParse, "user bootstrap is not valid JSON: " + path.string());
  return from_json(doc);
}

const User* UserDirectory::find(std::string_view id) const {
  const auto it = users_.find(id);
  return it == users_.end() ? nullptr : &it->second;
}

bool UserDirectory::verify(std::string_view id, std::string_view password) const {
  const User* u = find(id);
  if (u == nullptr) return false;
  const std::string candidate = derive(password, u->salt);
  return candidate.size() == u->digest.size() &&
         CRYPTO_memcmp(candidate.data(), u->digest.data(), candidate.size()) == 0;
}

bool UserDirectory::is_paired(std::string_view doctor, std::string_view patient) const {
  const User* d = find(doctor);
  return d != nullptr && d->role == Role::kDoctor &&
         std::find(d->patients.begin(), d->patients.end(), patient) != d->patients.end();
}

Authenticator::Authenticator(UserDirectory users, std::chrono::seconds ttl, Clock clock)
    : users_(std::move(users)), ttl_(ttl), clock_(std::move(clock)) {}

Authenticator::Session Authenticator::login(std::string_view user_id, std::string_view password) {
  require(users_.verify(user_id, password), ErrorCode::kUnauthenticated, "invalid credentials");
  Session s{random_hex(32), users_.find(user_id)->role, clock_() + ttl_};
  std::lock_guard lock(mutex_);
  const auto now = clock_();
  std::erase_if(sessions_, [&](const auto& kv) { return kv.second.expires_at <= now; });
  sessions_[s.token] = Entry{std::string(user_id), s.expires_at};
  return s;
}

Principal Authenticator::authenticate(std::string_view token) const {
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(token);
  require(it != sessions_.end(), ErrorCode::kUnauthenticated, "unknown token");
  require(clock_() < it->second.expires_at, ErrorCode::kUnauthenticated, "token expired");
  const User* u = users_.find(it->second.user_id);
  return Principal{u->id, u->role, u->patients};
}

void require_role(const Principal& who, std::initializer_list<Role> allowed) {
  require(std::find(allowed.begin(), allowed.end(), who.role) != allowed.end(), ErrorCode::kForbidden,
          "role " + std::string(role_name(who.role)) + " may not perform this action");
}

}  // namespace cxrcl::service
