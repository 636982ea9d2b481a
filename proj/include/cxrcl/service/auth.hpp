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
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace cxrcl::service {

enum class Role { kPatient, kDoctor, kResearcher };

std::string_view role_name(Role role) noexcept;
std::optional<Role> parse_role(std::string_view name) noexcept;

using Clock = std::function<std::chrono::system_clock::time_point()>;
Clock system_clock();

struct User {
  std::string id;
  Role role = Role::kPatient;
  std::string salt;    // hex
  std::string digest;  // hex PBKDF2-HMAC-SHA256
  std::vector<std::string> patients;  // doctors only
};

/// Authenticated caller, attached to each request.
struct Principal {
  std::string user_id;
  Role role = Role::kPatient;
  std::vector<std::string> patients;
};

class UserDirectory {
 public:
  /// Bootstrap document:
  ///   {"users": [{"id", "role", "password"}...],
  ///    "pairings": [{"doctor", "patient"}...]}
  /// Throws kParse on malformed input or pairings that reference unknown
  /// users or the wrong roles.
  static UserDirectory from_json(const nlohmann::json& doc);
  static UserDirectory load(const std::filesystem::path& path);

  const User* find(std::string_view id) const;
  bool verify(std::string_view id, std::string_view password) const;
  bool is_paired(std::string_view doctor, std::string_view patient) const;
  std::size_t size() const noexcept { return users_.size(); }

 private:
  std::map<std::string, User, std::less<>> users_;
};

/// Bearer tokens with a fixed lifetime against an injectable clock.
class Authenticator {
 public:
  Authenticator(UserDirectory users, std::chrono::seconds ttl = std::chrono::hours(8),
                Clock clock = system_clock());

  struct Session {
    std::string token;
    Role role = Role::kPatient;
    std::chrono::system_clock::time_point expires_at;
  };
  /// kUnauthenticated on bad credentials.
  Session login(std::string_view user_id, std::string_view password);
  /// kUnauthenticated for unknown or expired tokens.
  Principal authenticate(std::string_view token) const;

  const UserDirectory& users() const noexcept { return users_; }

 private:
  struct Entry {
    std::string user_id;
    std::chrono::system_clock::time_point expires_at;
  };
  UserDirectory users_;
  std::chrono::seconds ttl_;
  Clock clock_;
  mutable std::mutex mutex_;
  std::map<std::string, Entry, std::less<>> sessions_;
};

/// Throws kForbidden unless the principal holds one of the roles.
void require_role(const Principal& who, std::initializer_list<Role> allowed);

}  // namespace cxrcl::service
