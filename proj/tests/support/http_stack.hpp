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
#include <memory>
#include <string>
#include <utility>

#include <json.hpp>

#include "cxrcl/service/codec.hpp"
#include "cxrcl/service/http_api.hpp"
#include "service_fixture.hpp"

// After Eigen: <resolv.h> defines _res.
#include <httplib.h>

namespace cxrcl::testing {

struct HttpReply {
  int status = 0;
  nlohmann::json body;
};

// Service, authenticator and HTTP front end on a loopback port.
class HttpStack {
 public:
  explicit HttpStack(std::filesystem::path root) : root_(std::move(root)) { open(); }
  ~HttpStack() { close(); }

  void open() {
    service::ServiceConfig sc;
    sc.data_dir = root_ / "data";
    sc.durable_log = false;
    service_ = std::make_unique<service::ScreeningService>(
        sc, service::ModelRegistry::open(registry_config(root_ / "ckpt")));
    auth_ = std::make_unique<service::Authenticator>(service::UserDirectory::from_json(bootstrap_users()));
    api_ = std::make_unique<service::HttpApi>(*service_, *auth_);
    port_ = api_->start("127.0.0.1", 0);
    service_->start();
  }

  // Stops the front end and the worker; queued work stays in the log.
  void close() {
    if (api_) api_->stop();
    api_.reset();
    if (service_) service_->stop();
    service_.reset();
    auth_.reset();
  }

  service::ScreeningService& service() { return *service_; }
  int port() const { return port_; }

  HttpReply request(const std::string& method, const std::string& path, const std::string& token = {},
                    const nlohmann::json& body = nullptr) {
    httplib::Client client("127.0.0.1", port_);
    client.set_read_timeout(60, 0);
    httplib::Headers headers;
    if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);
    httplib::Result res = method == "POST"
                              ? client.Post(path, headers, body.is_null() ? std::string("{}") : body.dump(),
                                            "application/json")
                              : client.Get(path, headers);
    if (!res) return {-1, nullptr};
    return {res->status, nlohmann::json::parse(res->body, nullptr, false)};
  }

  std::string login(const std::string& user) {
    return request("POST", "/auth/login", {}, {{"user_id", user}, {"password", "pw"}}).body.value("token", "");
  }

  HttpReply submit(const std::string& token, const std::string& type, const std::vector<std::uint8_t>& image,
                   const nlohmann::json& label = nullptr) {
    nlohmann::json body{{"type", type}, {"image_base64", service::base64_encode(image)}};
    if (!label.is_null()) body["label"] = label;
    return request("POST", "/submissions", token, body);
  }

 private:
  std::filesystem::path root_;
  std::unique_ptr<service::ScreeningService> service_;
  std::unique_ptr<service::Authenticator> auth_;
  std::unique_ptr<service::HttpApi> api_;
  int port_ = 0;
};

}  // namespace cxrcl::testing
