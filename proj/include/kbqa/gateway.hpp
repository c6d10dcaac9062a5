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

#pragma once

// Text-generation backends: a chat-completion HTTP client and a scripted
// mock driven by a fixture file.

#include <atomic>
#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>
#include <vector>

#include "kbqa/json_io.hpp"

namespace kbqa {

enum class Role { System, User, Assistant };

std::string_view to_string(Role role);

struct Message {
  Role role = Role::User;
  std::string text;
  bool operator==(const Message&) const = default;
};

struct Conversation {
  std::vector<Message> messages;

  Conversation& add(Role role, std::string text) {
    messages.push_back(Message{role, std::move(text)});
    return *this;
  }
  bool empty() const { return messages.empty(); }
  // Text of the most recent user message, or "" when there is none.
  const std::string& latest_user_text() const;
};

// One prompt/reply pair, kept for traces.
struct Exchange {
  std::string purpose;
  std::string prompt;
  std::string reply;
};

class GenerationGateway {
 public:
  virtual ~GenerationGateway() = default;

  // Throws PreconditionError for an empty conversation and GatewayError on
  // backend failure. Never modifies `conversation`.
  std::string complete(const Conversation& conversation);

  // Number of completed calls so far.
  std::uint64_t calls() const { return calls_.load(); }

 protected:
  virtual std::string do_complete(const Conversation& conversation) = 0;

 private:
  std::atomic<std::uint64_t> calls_{0};
};

struct MockRule {
  enum class Kind { Exact, Substring };
  Kind kind = Kind::Exact;
  std::string text;
  std::string reply;
  // When set, the rule only fires if the latest assistant message contains
  // this text. Lets one fixture script different repairs for the same
  // feedback string.
  std::string after;
};

// Replies to the latest user message: the first exact (whitespace-trimmed)
// match in file order, otherwise the first substring match. No match raises
// GatewayError of kind MockMiss.
class MockGateway : public GenerationGateway {
 public:
  explicit MockGateway(std::vector<MockRule> rules) : rules_(std::move(rules)) {}
  static std::unique_ptr<MockGateway> from_file(const std::filesystem::path& fixture);
  static std::vector<MockRule> parse_rules(const Json& fixture, const std::string& source);

 protected:
  std::string do_complete(const Conversation& conversation) override;

 private:
  std::vector<MockRule> rules_;
};

struct HttpConfig {
  std::string endpoint;  // full URL of the chat-completion route
  std::string model;
  std::string token_env = "KBQA_API_KEY";
  double temperature = 0.0;
  int max_retries = 3;
  std::chrono::milliseconds timeout{60000};
  std::chrono::milliseconds backoff_base{500};
  int max_concurrency = 4;
};

// POSTs {model, messages:[{role,content}], temperature} and returns
// choices[0].message.content. Retries rate limits, server errors and
// transport failures with exponential backoff.
class HttpGateway : public GenerationGateway {
 public:
  explicit HttpGateway(HttpConfig config);

  // Request body for a conversation; exposed for tests.
  Json request_body(const Conversation& conversation) const;
  // Extracts the reply text; throws GatewayError(Protocol).
  static std::string parse_reply(const std::string& body);

 protected:
  std::string do_complete(const Conversation& conversation) override;

 private:
  HttpConfig config_;
  std::string origin_;
  std::string path_;
  std::counting_semaphore<> slots_;
};

}  // namespace kbqa
