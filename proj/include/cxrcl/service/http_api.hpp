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

#include <memory>
#include <string>
#include <thread>

#include "cxrcl/error.hpp"
#include "cxrcl/service/auth.hpp"
#include "cxrcl/service/service.hpp"

namespace httplib {
class Server;
}

namespace cxrcl::service {

/// HTTP status for an error kind.
int http_status(ErrorCode code) noexcept;

/// JSON-over-HTTP front end:
///   POST /auth/login                {user_id, password} -> {token, role, expires_at}
///   POST /submissions               {type, image_base64, label?} -> {id}
///   GET  /submissions/{id}
///   GET  /submissions?status=&type= -> {submissions: [...]}
///   POST /submissions/{id}/confirm  {label} -> {id}
///   GET  /metrics
///   GET  /healthz
/// Errors are {code, message} with the matching status.
class HttpApi {
 public:
  HttpApi(ScreeningService& service, Authenticator& auth);
  ~HttpApi();
  HttpApi(const HttpApi&) = delete;
  HttpApi& operator=(const HttpApi&) = delete;

  /// Binds and serves on a background thread. Port 0 picks a free port; the
  /// bound port is returned. kIo if the address cannot be bound.
  int start(const std::string& host, int port);
  void stop();
  /// Blocks until stop() is called from elsewhere.
  void wait();

 private:
  void routes();

  ScreeningService& service_;
  Authenticator& auth_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace cxrcl::service
