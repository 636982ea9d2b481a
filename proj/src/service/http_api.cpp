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

#include "cxrcl/service/http_api.hpp"

#include <httplib.h>

#include "cxrcl/clock.hpp"
#include "cxrcl/service/codec.hpp"

namespace cxrcl::service {

using nlohmann::json;

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kUnauthenticated: return 401;
    case ErrorCode::kForbidden: return 403;
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kState: return 409;
    case ErrorCode::kValidation:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kParse:
    case ErrorCode::kShapeMismatch: return 400;
    default: return 500;
  }
}

namespace {

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, ErrorCode code, const std::string& message) {
  reply(res, http_status(code), json{{"code", to_string(code)}, {"message", message}});
}

template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      reply_error(res, e.code(), e.what());
    } catch (const json::exception& e) {
      reply_error(res, ErrorCode::kValidation, std::string("malformed request body: ") + e.what());
    } catch (const std::exception& e) {
      reply_error(res, ErrorCode::kIo, e.what());
    }
  };
}

json body_of(const httplib::Request& req) {
  json doc = json::parse(req.body, nullptr, false);
  require(!doc.is_discarded() && doc.is_object(), ErrorCode::kValidation, "request body must be a JSON object");
  return doc;
}

ClassLabel label_of(const json& value) {
  require(value.is_string(), ErrorCode::kValidation, "label must be a string");
  const auto label = parse_label(value.get<std::string>());
  require(label.has_value(), ErrorCode::kValidation,
          "unknown label '" + value.get<std::string>() + "' (expected COVID-19, Pneumonia or Normal)");
  return *label;
}

std::uint64_t id_of(const httplib::Request& req) {
  try {
    return std::stoull(req.matches[1].str());
  } catch (const std::exception&) {
    fail(ErrorCode::kNotFound, "submission id out of range");
  }
}

}  // namespace

HttpApi::HttpApi(ScreeningService& service, Authenticator& auth)
    : service_(service), auth_(auth), server_(std::make_unique<httplib::Server>()) {
  // Plain SO_REUSEADDR, so binding a port in use fails.
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  routes();
}

HttpApi::~HttpApi() { stop(); }

void HttpApi::routes() {
  auto principal = [this](const httplib::Request& req) {
    const std::string header = req.get_header_value("Authorization");
    constexpr std::string_view kBearer = "Bearer ";
    require(header.rfind(kBearer, 0) == 0, ErrorCode::kUnauthenticated, "missing bearer token");
    return auth_.authenticate(std::string_view(header).substr(kBearer.size()));
  };

  server_->Get("/healthz", guarded([](const httplib::Request&, httplib::Response& res) {
    reply(res, 200, json{{"status", "ok"}});
  }));

  server_->Post("/auth/login", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const json body = body_of(req);
    const auto session = auth_.login(body.at("user_id").get<std::string>(), body.at("password").get<std::string>());
    json out{{"token", session.token}, {"role", role_name(session.role)},
             {"expires_at", format_iso8601(session.expires_at)}};
    if (session.role == Role::kDoctor) out["patients"] = auth_.users().find(body["user_id"].get<std::string>())->patients;
    reply(res, 200, out);
  }));

  server_->Post("/submissions", guarded([this, principal](const httplib::Request& req, httplib::Response& res) {
    const Principal who = principal(req);
    const json body = body_of(req);
    SubmissionRequest request;
    require(body.contains("type") && body["type"].is_string(), ErrorCode::kValidation, "type is required");
    const auto type = parse_type(body["type"].get<std::string>());
    require(type.has_value(), ErrorCode::kValidation, "type must be classify or learn");
    request.type = *type;
    require(body.contains("image_base64") && body["image_base64"].is_string(), ErrorCode::kValidation,
            "image_base64 is required");
    request.image = base64_decode(body["image_base64"].get<std::string>());
    if (body.contains("label") && !body["label"].is_null()) request.label = label_of(body["label"]);
    reply(res, 201, json{{"id", service_.enqueue(who, request)}});
  }));

  server_->Get(R"(/submissions/(\d+))", guarded([this, principal](const httplib::Request& req, httplib::Response& res) {
    reply(res, 200, service_.get(principal(req), id_of(req)));
  }));

  server_->Get("/submissions", guarded([this, principal](const httplib::Request& req, httplib::Response& res) {
    const Principal who = principal(req);
    SubmissionFilter filter;
    if (req.has_param("status") && !req.get_param_value("status").empty()) {
      filter.status = parse_status(req.get_param_value("status"));
      require(filter.status.has_value(), ErrorCode::kValidation, "unknown status filter");
    }
    if (req.has_param("type") && !req.get_param_value("type").empty()) {
      filter.type = parse_type(req.get_param_value("type"));
      require(filter.type.has_value(), ErrorCode::kValidation, "unknown type filter");
    }
    reply(res, 200, json{{"submissions", service_.list(who, filter)}});
  }));

  server_->Post(R"(/submissions/(\d+)/confirm)",
                guarded([this, principal](const httplib::Request& req, httplib::Response& res) {
                  const Principal who = principal(req);
                  const json body = body_of(req);
                  require(body.contains("label"), ErrorCode::kValidation, "label is required");
                  reply(res, 201, json{{"id", service_.confirm(who, id_of(req), label_of(body["label"]))}});
                }));

  server_->Get("/metrics", guarded([this, principal](const httplib::Request& req, httplib::Response& res) {
    require_role(principal(req), {Role::kDoctor, Role::kResearcher});
    reply(res, 200, service_.metrics());
  }));

  server_->set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) reply_error(res, res.status == 404 ? ErrorCode::kNotFound : ErrorCode::kValidation,
                                      "no route for this request");
  });
}

int HttpApi::start(const std::string& host, int port) {
  const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  require(bound > 0, ErrorCode::kIo, "cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return bound;
}

void HttpApi::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

void HttpApi::wait() {
  if (thread_.joinable()) thread_.join();
}

}  // namespace cxrcl::service
