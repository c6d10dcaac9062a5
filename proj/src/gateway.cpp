// Copyright 2026 The kbqa Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kbqa/gateway.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "kbqa/error.hpp"

namespace kbqa {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
  }
  return "user";
}

const std::string& Conversation::latest_user_text() const {
  static const std::string kEmpty;
  for (auto it = messages.rbegin(); it != messages.rend(); ++it)
    if (it->role == Role::User) return it->text;
  return kEmpty;
}

std::string GenerationGateway::complete(const Conversation& conversation) {
  if (conversation.empty()) throw PreconditionError("cannot complete an empty conversation");
  std::string reply = do_complete(conversation);
  ++calls_;
  return reply;
}

// ---------------------------------------------------------------------------

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

std::vector<MockRule> MockGateway::parse_rules(const Json& fixture, const std::string& source) {
  if (!fixture.is_array()) throw FormatError(source, 0, "mock fixture must be a JSON list");
  std::vector<MockRule> rules;
  std::size_t i = 0;
  for (const auto& entry : fixture) {
    ++i;
    try {
      MockRule r;
      const auto& match = entry.at("match");
      std::string kind = match.at("kind").get<std::string>();
      if (kind == "exact") r.kind = MockRule::Kind::Exact;
      else if (kind == "substring") r.kind = MockRule::Kind::Substring;
      else throw FormatError(source, 0, "rule " + std::to_string(i) + ": unknown match kind '" + kind + "'");
      r.text = match.at("text").get<std::string>();
      r.reply = entry.at("reply").get<std::string>();
      if (match.contains("after")) r.after = match.at("after").get<std::string>();
      rules.push_back(std::move(r));
    } catch (const Json::exception& e) {
      throw FormatError(source, 0, "rule " + std::to_string(i) + ": " + e.what());
    }
  }
  return rules;
}

std::unique_ptr<MockGateway> MockGateway::from_file(const std::filesystem::path& fixture) {
  std::ifstream in(fixture, std::ios::binary);
  if (!in) throw FormatError(fixture.string(), 0, "cannot open mock fixture");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw FormatError(fixture.string(), 0, e.what());
  }
  return std::make_unique<MockGateway>(parse_rules(j, fixture.string()));
}

std::string MockGateway::do_complete(const Conversation& conversation) {
  std::string_view prompt = trim(conversation.latest_user_text());
  std::string_view previous;
  for (auto it = conversation.messages.rbegin(); it != conversation.messages.rend(); ++it) {
    if (it->role == Role::Assistant) {
      previous = it->text;
      break;
    }
  }
  auto guard_ok = [&](const MockRule& r) {
    return r.after.empty() || previous.find(r.after) != std::string_view::npos;
  };
  for (const auto& r : rules_)
    if (r.kind == MockRule::Kind::Exact && trim(r.text) == prompt && guard_ok(r)) return r.reply;
  for (const auto& r : rules_)
    if (r.kind == MockRule::Kind::Substring && prompt.find(r.text) != std::string_view::npos && guard_ok(r))
      return r.reply;
  std::string head(prompt.substr(0, 160));
  throw GatewayError(GatewayError::Kind::MockMiss, "no mock rule matches prompt: " + head);
}

// ---------------------------------------------------------------------------

HttpGateway::HttpGateway(HttpConfig config)
    : config_(std::move(config)), slots_(std::max(1, config_.max_concurrency)) {
  const std::string& url = config_.endpoint;
  auto scheme_end = url.find("://");
  if (config_.endpoint.empty() || scheme_end == std::string::npos)
    throw PreconditionError("http backend needs an endpoint URL, got '" + url + "'");
  auto path_start = url.find('/', scheme_end + 3);
  origin_ = path_start == std::string::npos ? url : url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
  if (config_.model.empty()) throw PreconditionError("http backend needs a model name");
}

Json HttpGateway::request_body(const Conversation& conversation) const {
  Json body;
  body["model"] = config_.model;
  body["messages"] = Json::array();
  for (const auto& m : conversation.messages)
    body["messages"].push_back({{"role", std::string(to_string(m.role))}, {"content", m.text}});
  body["temperature"] = config_.temperature;
  return body;
}

std::string HttpGateway::parse_reply(const std::string& body) {
  try {
    Json j = Json::parse(body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const Json::exception& e) {
    throw GatewayError(GatewayError::Kind::Protocol, std::string("malformed completion response: ") + e.what());
  }
}

std::string HttpGateway::do_complete(const Conversation& conversation) {
  std::string payload = request_body(conversation).dump();
  httplib::Headers headers;
  if (!config_.token_env.empty()) {
    if (const char* token = std::getenv(config_.token_env.c_str()); token && *token)
      headers.emplace("Authorization", std::string("Bearer ") + token);
  }

  slots_.acquire();
  struct Release {
    std::counting_semaphore<>& s;
    ~Release() { s.release(); }
  } release{slots_};

  GatewayError last(GatewayError::Kind::Transport, "no attempt made");
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(config_.backoff_base * (1LL << (attempt - 1)));
    httplib::Client client(origin_);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
    auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    auto res = client.Post(path_, headers, payload, "application/json");
    if (!res) {
      auto err = res.error();
      auto kind = (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read)
                      ? GatewayError::Kind::Timeout
                      : GatewayError::Kind::Transport;
      last = GatewayError(kind, "request to " + config_.endpoint + " failed: " + httplib::to_string(err));
      continue;
    }
    int status = res->status;
    if (status == 200) return parse_reply(res->body);
    if (status == 401 || status == 403)
      throw GatewayError(GatewayError::Kind::Auth, "authentication rejected (HTTP " + std::to_string(status) +
                                                       "); check $" + config_.token_env);
    if (status == 429) {
      last = GatewayError(GatewayError::Kind::RateLimit, "rate limited (HTTP 429)");
      continue;
    }
    if (status >= 500) {
      last = GatewayError(GatewayError::Kind::Transport, "server error (HTTP " + std::to_string(status) + ")");
      continue;
    }
    throw GatewayError(GatewayError::Kind::Protocol, "unexpected HTTP " + std::to_string(status) + ": " +
                                                         res->body.substr(0, 200));
  }
  throw last;
}

}  // namespace kbqa
