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

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "dptext/provider.hpp"

namespace dptext {

// Table-driven stand-in for the language model, small enough to verify
// exhaustively. Logits are a pure function of (spec, prefix): table rows are
// looked up by the longest matching suffix of the prefix (length at most
// `order`), and unseen contexts fall back to logits hashed from
// (fallback_seed, context) scaled to [0, fallback_scale].
//
// Tokenization is character-level, except multi-character tokens written as
// <name> (always including the end-of-sequence token "<eos>").
struct ToyModelSpec {
  std::vector<std::string> vocab;
  int order = 3;  // context window; at most 3 so tables stay enumerable
  std::uint64_t fallback_seed = 0;
  double fallback_scale = 1.0;
  std::map<TokenSequence, LogitVector> table;

  // Plain-text table format, one line per context: context string, tab,
  // vocab-size space-separated logits. Header lines (no tab) declare
  // `vocab`, `order`, `fallback-seed` and `fallback-scale`; '#' starts a
  // comment. Space, newline and tab characters are escaped as <sp>, <nl>
  // and <tab> in the vocab and context fields.
  static ToyModelSpec load(const std::string& path);
  void save(const std::string& path) const;

  void validate() const;
};

class ToyModel final : public LogitProvider {
 public:
  explicit ToyModel(ToyModelSpec spec);

  std::size_t vocab_size() const override { return spec_.vocab.size(); }
  TokenId eos_token() const override { return eos_; }
  TokenSequence encode(const std::string& text) const override;
  std::string decode(const TokenSequence& tokens) const override;
  std::unique_ptr<ProviderSession> open_session(
      const TokenSequence& prompt_tokens) override;

  // Direct evaluation on an arbitrary prefix; open_session/next_logits is
  // equivalent by construction.
  LogitVector logits_for_prefix(const TokenSequence& prefix) const;

  const ToyModelSpec& spec() const { return spec_; }

 private:
  class Session;

  LogitVector fallback_logits(const TokenSequence& context) const;

  ToyModelSpec spec_;
  std::map<std::string, TokenId> token_ids_;
  TokenId eos_ = -1;
};

// Accumulates observed next-token transitions from example texts and emits a
// table whose rows peak on the observed continuations. Useful for building
// models that memorize specific strings (canaries) in leakage tests.
class ToyTableBuilder {
 public:
  explicit ToyTableBuilder(ToyModelSpec base);

  // Records every (context -> next token) transition in the text. When
  // append_eos is set the text is terminated with <eos> so the final
  // transition is learned too.
  void observe_text(const std::string& text, bool append_eos = true);

  // Rows get peak_logit * (count / max count in row) per token; unobserved
  // tokens stay at zero.
  ToyModelSpec build(double peak_logit = 20.0) const;

 private:
  ToyModelSpec base_;
  std::map<TokenSequence, std::map<TokenId, double>> counts_;
};

}  // namespace dptext
