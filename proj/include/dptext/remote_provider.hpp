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

#pragma once

#include <string>

#include "dptext/provider.hpp"

namespace dptext {

struct RemoteEndpointConfig {
  std::string base_url;    // e.g. http://127.0.0.1:8080
  std::string model_name;
  int timeout_ms = 30000;
  int max_retries = 3;
  int backoff_base_ms = 50;  // doubles per retry, capped at 2s
  std::string auth_token;    // optional bearer token
};

// HTTP client for a logit server speaking the dense full-vocabulary
// protocol:
//
//   GET  /v1/model  -> {"model", "vocab_size", "eos_id"}
//   POST /v1/logits  {"tokens": [...], "model": ...} -> {"logits": [...]}
//   POST /v1/encode  {"text": ...}   -> {"tokens": [...]}
//   POST /v1/decode  {"tokens": ...} -> {"text": ...}
//
// One request per (session, step) carries the full prefix, so the server
// can reuse its cached prefix encoding. Responses must carry exactly
// vocab_size logits; any truncated or padded vocabulary is a hard
// ContractViolationError, never silently repaired. Each session owns its
// own connection, so distinct sessions may be driven from distinct threads.
class RemoteProvider final : public LogitProvider {
 public:
  explicit RemoteProvider(RemoteEndpointConfig config);

  std::size_t vocab_size() const override { return vocab_size_; }
  TokenId eos_token() const override { return eos_; }
  TokenSequence encode(const std::string& text) const override;
  std::string decode(const TokenSequence& tokens) const override;
  std::unique_ptr<ProviderSession> open_session(
      const TokenSequence& prompt_tokens) override;

 private:
  class Session;

  RemoteEndpointConfig config_;
  std::size_t vocab_size_ = 0;
  TokenId eos_ = -1;
};

}  // namespace dptext
