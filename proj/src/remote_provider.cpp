// Copyright 2026 The dptext Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dptext/remote_provider.hpp"

#include <chrono>
#include <memory>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "dptext/errors.hpp"

namespace dptext {

using nlohmann::json;

namespace {

std::unique_ptr<httplib::Client> make_client(
    const RemoteEndpointConfig& config) {
  auto client = std::make_unique<httplib::Client>(config.base_url);
  if (!client->is_valid()) {
    throw ConfigError("remote provider: invalid base url " + config.base_url);
  }
  client->set_connection_timeout(std::chrono::milliseconds(config.timeout_ms));
  client->set_read_timeout(std::chrono::milliseconds(config.timeout_ms));
  client->set_write_timeout(std::chrono::milliseconds(config.timeout_ms));
  if (!config.auth_token.empty()) {
    client->set_bearer_token_auth(config.auth_token);
  }
  return client;
}

struct Reply {
  int status = 0;
  json body;
};

// POST (or GET when body is empty) with bounded exponential backoff on
// connection-level failures. HTTP error statuses are not retried: the
// server spoke, and its answer stands; callers map statuses to errors.
Reply request_json(httplib::Client& client, const RemoteEndpointConfig& config,
                   const std::string& path, const json* body) {
  int backoff_ms = config.backoff_base_ms;
  for (int attempt = 0;; ++attempt) {
    httplib::Result result =
        body ? client.Post(path, body->dump(), "application/json")
             : client.Get(path);
    if (result) {
      Reply reply;
      reply.status = result->status;
      reply.body = json::parse(result->body, nullptr, false);
      return reply;
    }
    if (attempt >= config.max_retries) {
      throw TransportError("remote provider: " + path + " unreachable after " +
                           std::to_string(attempt + 1) + " attempts (" +
                           httplib::to_string(result.error()) + ")");
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
    backoff_ms = std::min(backoff_ms * 2, 2000);
  }
}

std::string reply_message(const Reply& reply) {
  if (reply.body.is_object() && reply.body.contains("error")) {
    return reply.body.at("error").get<std::string>();
  }
  return "status " + std::to_string(reply.status);
}

json expect_ok(const Reply& reply, const std::string& path) {
  if (reply.status != 200) {
    throw TransportError("remote provider: " + path + " failed: " +
                         reply_message(reply));
  }
  if (reply.body.is_discarded()) {
    throw ContractViolationError("remote provider: " + path +
                                 " returned unparseable JSON");
  }
  return reply.body;
}

}  // namespace

class RemoteProvider::Session final : public ProviderSession {
 public:
  Session(const RemoteEndpointConfig& config, std::size_t vocab_size,
          TokenSequence prompt)
      : config_(config),
        vocab_size_(vocab_size),
        client_(make_client(config)),
        prefix_(std::move(prompt)) {}

  LogitVector next_logits() override {
    ensure_open();
    const json body{{"tokens", prefix_}, {"model", config_.model_name}};
    json reply =
        expect_ok(request_json(*client_, config_, "/v1/logits", &body),
                  "/v1/logits");
    if (!reply.is_object() || !reply.contains("logits") ||
        !reply.at("logits").is_array()) {
      throw ContractViolationError(
          "remote provider: /v1/logits reply lacks a logits array");
    }
    LogitVector logits = reply.at("logits").get<LogitVector>();
    if (logits.size() != vocab_size_) {
      throw ContractViolationError(
          "remote provider: expected " + std::to_string(vocab_size_) +
          " logits, got " + std::to_string(logits.size()) +
          "; full-vocabulary responses are required");
    }
    return logits;
  }

  void append_token(TokenId token) override {
    ensure_open();
    if (token < 0 || static_cast<std::size_t>(token) >= vocab_size_) {
      throw EncodingError("remote provider: token index " +
                          std::to_string(token) + " out of range");
    }
    prefix_.push_back(token);
  }

  const TokenSequence& prefix() const override { return prefix_; }

  void close() override { closed_ = true; }

 private:
  void ensure_open() const {
    if (closed_) {
      throw StateError("remote provider session is closed");
    }
  }

  const RemoteEndpointConfig& config_;
  std::size_t vocab_size_;
  std::unique_ptr<httplib::Client> client_;
  TokenSequence prefix_;
  bool closed_ = false;
};

RemoteProvider::RemoteProvider(RemoteEndpointConfig config)
    : config_(std::move(config)) {
  if (config_.timeout_ms <= 0) {
    throw ConfigError("remote provider: timeout must be positive");
  }
  if (config_.max_retries < 0) {
    throw ConfigError("remote provider: max_retries must be nonnegative");
  }
  auto client = make_client(config_);
  json info = expect_ok(request_json(*client, config_, "/v1/model", nullptr),
                        "/v1/model");
  if (!info.is_object() || !info.contains("vocab_size") ||
      !info.contains("eos_id")) {
    throw ContractViolationError(
        "remote provider: /v1/model reply lacks vocab_size or eos_id");
  }
  vocab_size_ = info.at("vocab_size").get<std::size_t>();
  eos_ = info.at("eos_id").get<TokenId>();
  if (vocab_size_ == 0 || eos_ < 0 ||
      static_cast<std::size_t>(eos_) >= vocab_size_) {
    throw ContractViolationError("remote provider: inconsistent model info");
  }
}

TokenSequence RemoteProvider::encode(const std::string& text) const {
  auto client = make_client(config_);
  const json body{{"text", text}, {"model", config_.model_name}};
  Reply raw = request_json(*client, config_, "/v1/encode", &body);
  if (raw.status == 400) {
    throw EncodingError("remote provider: " + reply_message(raw));
  }
  json reply = expect_ok(raw, "/v1/encode");
  if (!reply.is_object() || !reply.contains("tokens")) {
    throw ContractViolationError(
        "remote provider: /v1/encode reply lacks tokens");
  }
  return reply.at("tokens").get<TokenSequence>();
}

std::string RemoteProvider::decode(const TokenSequence& tokens) const {
  auto client = make_client(config_);
  const json body{{"tokens", tokens}, {"model", config_.model_name}};
  json reply = expect_ok(request_json(*client, config_, "/v1/decode", &body),
                         "/v1/decode");
  if (!reply.is_object() || !reply.contains("text")) {
    throw ContractViolationError(
        "remote provider: /v1/decode reply lacks text");
  }
  return reply.at("text").get<std::string>();
}

std::unique_ptr<ProviderSession> RemoteProvider::open_session(
    const TokenSequence& prompt_tokens) {
  for (TokenId t : prompt_tokens) {
    if (t < 0 || static_cast<std::size_t>(t) >= vocab_size_) {
      throw EncodingError("remote provider: prompt token " +
                          std::to_string(t) + " out of range");
    }
  }
  return std::make_unique<Session>(config_, vocab_size_, prompt_tokens);
}

}  // namespace dptext
