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

#include <memory>
#include <string>

#include "dptext/common.hpp"

namespace dptext {

// One autoregressive decode position over a fixed prefix. Sessions are
// single-owner: no concurrent calls on one session, but distinct sessions
// may run fully in parallel.
//
// Contract: appending token t and then querying logits is equivalent to
// querying logits on the full concatenated prefix, and repeated next_logits
// calls without an append return identical vectors. This is what lets the
// generation loop reuse cached prefix encodings and stay linear in the
// number of generated tokens.
class ProviderSession {
 public:
  virtual ~ProviderSession() = default;

  // Full-vocabulary logits for the next position. Throws StateError if the
  // session was closed.
  virtual LogitVector next_logits() = 0;

  // Extends the prefix by one token. Throws EncodingError for an
  // out-of-range token index.
  virtual void append_token(TokenId token) = 0;

  virtual const TokenSequence& prefix() const = 0;

  virtual void close() = 0;
};

// Model access used by every pipeline stage. The provider owns tokenization;
// everything above it deals in token indices only. Private and public
// inference must share one provider so their logits live over the same
// vocabulary.
class LogitProvider {
 public:
  virtual ~LogitProvider() = default;

  virtual std::size_t vocab_size() const = 0;
  virtual TokenId eos_token() const = 0;

  // Throws EncodingError if the text is not tokenizable in this vocabulary.
  virtual TokenSequence encode(const std::string& text) const = 0;
  virtual std::string decode(const TokenSequence& tokens) const = 0;

  virtual std::unique_ptr<ProviderSession> open_session(
      const TokenSequence& prompt_tokens) = 0;

  std::unique_ptr<ProviderSession> open_session_text(const std::string& prompt) {
    return open_session(encode(prompt));
  }
};

}  // namespace dptext
