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

#include "dptext/toy_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dptext/errors.hpp"

namespace dptext {

namespace {

constexpr const char* kEos = "<eos>";

std::string escape_token(const std::string& tok) {
  std::string out;
  for (char c : tok) {
    switch (c) {
      case ' ': out += "<sp>"; break;
      case '\n': out += "<nl>"; break;
      case '\t': out += "<tab>"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape(const std::string& text) {
  std::string out;
  for (std::size_t i = 0; i < text.size();) {
    if (text.compare(i, 4, "<sp>") == 0) {
      out += ' ';
      i += 4;
    } else if (text.compare(i, 4, "<nl>") == 0) {
      out += '\n';
      i += 4;
    } else if (text.compare(i, 5, "<tab>") == 0) {
      out += '\t';
      i += 5;
    } else {
      out += text[i];
      ++i;
    }
  }
  return out;
}

std::uint64_t hash_context(std::uint64_t seed, const TokenSequence& context) {
  std::uint64_t h = splitmix64(seed);
  for (TokenId t : context) {
    h = splitmix64(h ^ static_cast<std::uint64_t>(t + 1));
  }
  return h;
}

}  // namespace

void ToyModelSpec::validate() const {
  if (vocab.empty()) {
    throw InvalidParameterError("toy model: vocabulary is empty");
  }
  if (std::find(vocab.begin(), vocab.end(), kEos) == vocab.end()) {
    throw InvalidParameterError("toy model: vocabulary must include <eos>");
  }
  if (order < 0 || order > 3) {
    throw InvalidParameterError("toy model: order must lie in [0, 3]");
  }
  if (!(fallback_scale >= 0.0) || !std::isfinite(fallback_scale)) {
    throw InvalidParameterError("toy model: fallback scale must be finite");
  }
  for (const auto& [context, row] : table) {
    if (row.size() != vocab.size()) {
      throw InvalidParameterError(
          "toy model: table row length " + std::to_string(row.size()) +
          " does not match vocab size " + std::to_string(vocab.size()));
    }
    for (double v : row) {
      if (!std::isfinite(v)) {
        throw InvalidParameterError("toy model: non-finite table entry");
      }
    }
    if (static_cast<int>(context.size()) > order) {
      throw InvalidParameterError("toy model: context longer than order");
    }
  }
}

ToyModel::ToyModel(ToyModelSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  for (std::size_t i = 0; i < spec_.vocab.size(); ++i) {
    if (!token_ids_.emplace(spec_.vocab[i], static_cast<TokenId>(i)).second) {
      throw InvalidParameterError("toy model: duplicate vocab token " +
                                  spec_.vocab[i]);
    }
  }
  eos_ = token_ids_.at(kEos);
  for (const auto& [context, row] : spec_.table) {
    for (TokenId t : context) {
      if (t < 0 || static_cast<std::size_t>(t) >= spec_.vocab.size()) {
        throw InvalidParameterError("toy model: table context token out of range");
      }
    }
    (void)row;
  }
}

TokenSequence ToyModel::encode(const std::string& text) const {
  TokenSequence out;
  for (std::size_t i = 0; i < text.size();) {
    // Multi-character tokens are written <name>; try the longest match.
    if (text[i] == '<') {
      auto close = text.find('>', i);
      if (close != std::string::npos) {
        auto it = token_ids_.find(text.substr(i, close - i + 1));
        if (it != token_ids_.end()) {
          out.push_back(it->second);
          i = close + 1;
          continue;
        }
      }
    }
    auto it = token_ids_.find(text.substr(i, 1));
    if (it == token_ids_.end()) {
      throw EncodingError(std::string("toy model: character '") + text[i] +
                          "' is not in the vocabulary");
    }
    out.push_back(it->second);
    ++i;
  }
  return out;
}

std::string ToyModel::decode(const TokenSequence& tokens) const {
  std::string out;
  for (TokenId t : tokens) {
    if (t < 0 || static_cast<std::size_t>(t) >= spec_.vocab.size()) {
      throw EncodingError("toy model: token index " + std::to_string(t) +
                          " out of range");
    }
    if (t != eos_) {
      out += spec_.vocab[static_cast<std::size_t>(t)];
    }
  }
  return out;
}

LogitVector ToyModel::fallback_logits(const TokenSequence& context) const {
  const std::uint64_t h = hash_context(spec_.fallback_seed, context);
  LogitVector out(spec_.vocab.size());
  for (std::size_t v = 0; v < out.size(); ++v) {
    const std::uint64_t bits = splitmix64(h ^ (0x51ed2701u + v));
    out[v] = spec_.fallback_scale *
             (static_cast<double>(bits >> 11) * 0x1.0p-53);
  }
  return out;
}

LogitVector ToyModel::logits_for_prefix(const TokenSequence& prefix) const {
  const std::size_t window =
      std::min<std::size_t>(prefix.size(), static_cast<std::size_t>(spec_.order));
  // Longest matching suffix wins; the empty context acts as a default row.
  for (std::size_t len = window + 1; len-- > 0;) {
    TokenSequence key(prefix.end() - static_cast<std::ptrdiff_t>(len),
                      prefix.end());
    auto it = spec_.table.find(key);
    if (it != spec_.table.end()) {
      return it->second;
    }
  }
  TokenSequence context(prefix.end() - static_cast<std::ptrdiff_t>(window),
                        prefix.end());
  return fallback_logits(context);
}

class ToyModel::Session final : public ProviderSession {
 public:
  Session(const ToyModel& model, TokenSequence prompt)
      : model_(model), prefix_(std::move(prompt)) {}

  LogitVector next_logits() override {
    ensure_open();
    return model_.logits_for_prefix(prefix_);
  }

  void append_token(TokenId token) override {
    ensure_open();
    if (token < 0 ||
        static_cast<std::size_t>(token) >= model_.vocab_size()) {
      throw EncodingError("toy model session: token index " +
                          std::to_string(token) + " out of range");
    }
    prefix_.push_back(token);
  }

  const TokenSequence& prefix() const override { return prefix_; }

  void close() override { closed_ = true; }

 private:
  void ensure_open() const {
    if (closed_) {
      throw StateError("toy model session is closed");
    }
  }

  const ToyModel& model_;
  TokenSequence prefix_;
  bool closed_ = false;
};

std::unique_ptr<ProviderSession> ToyModel::open_session(
    const TokenSequence& prompt_tokens) {
  for (TokenId t : prompt_tokens) {
    if (t < 0 || static_cast<std::size_t>(t) >= spec_.vocab.size()) {
      throw EncodingError("toy model: prompt token " + std::to_string(t) +
                          " out of range");
    }
  }
  return std::make_unique<Session>(*this, prompt_tokens);
}

ToyModelSpec ToyModelSpec::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("toy model: cannot open " + path);
  }
  ToyModelSpec spec;
  spec.order = 3;
  std::vector<std::pair<std::string, LogitVector>> pending_rows;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') {
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      std::istringstream header(line);
      std::string keyword;
      header >> keyword;
      if (keyword == "vocab") {
        std::string tok;
        while (header >> tok) {
          spec.vocab.push_back(unescape(tok));
        }
      } else if (keyword == "order") {
        header >> spec.order;
      } else if (keyword == "fallback-seed") {
        header >> spec.fallback_seed;
      } else if (keyword == "fallback-scale") {
        header >> spec.fallback_scale;
      } else {
        throw ParseError("toy model: unknown directive '" + keyword +
                         "' at line " + std::to_string(line_no));
      }
      if (header.fail() && keyword != "vocab") {
        throw ParseError("toy model: malformed directive at line " +
                         std::to_string(line_no));
      }
      continue;
    }

    LogitVector row;
    std::istringstream values(line.substr(tab + 1));
    double v = 0.0;
    while (values >> v) {
      row.push_back(v);
    }
    if (!values.eof()) {
      throw ParseError("toy model: malformed logit at line " +
                       std::to_string(line_no));
    }
    pending_rows.emplace_back(unescape(line.substr(0, tab)), std::move(row));
  }

  if (spec.vocab.empty()) {
    throw ParseError("toy model: missing vocab directive in " + path);
  }
  // Contexts tokenize with the model's own vocabulary, so resolve them
  // through a throwaway model with an empty table.
  ToyModelSpec probe = spec;
  ToyModel tokenizer(probe);
  for (auto& [context_text, row] : pending_rows) {
    if (row.size() != spec.vocab.size()) {
      throw ParseError("toy model: row for context '" + context_text +
                       "' has " + std::to_string(row.size()) +
                       " logits, expected " + std::to_string(spec.vocab.size()));
    }
    spec.table.emplace(tokenizer.encode(context_text), std::move(row));
  }
  spec.validate();
  return spec;
}

void ToyModelSpec::save(const std::string& path) const {
  validate();
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("toy model: cannot write " + path);
  }
  out << "vocab";
  for (const auto& tok : vocab) {
    out << ' ' << escape_token(tok);
  }
  out << "\norder " << order << "\nfallback-seed " << fallback_seed
      << "\nfallback-scale " << fallback_scale << "\n";
  out.precision(17);
  for (const auto& [context, row] : table) {
    std::string text;
    for (TokenId t : context) {
      text += escape_token(vocab[static_cast<std::size_t>(t)]);
    }
    out << text << '\t';
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << (i ? " " : "") << row[i];
    }
    out << '\n';
  }
  if (!out) {
    throw ConfigError("toy model: write to " + path + " failed");
  }
}

ToyTableBuilder::ToyTableBuilder(ToyModelSpec base) : base_(std::move(base)) {
  base_.table.clear();
  base_.validate();
}

void ToyTableBuilder::observe_text(const std::string& text, bool append_eos) {
  ToyModel tokenizer(base_);
  TokenSequence tokens = tokenizer.encode(text);
  if (append_eos) {
    tokens.push_back(tokenizer.eos_token());
  }
  for (std::size_t pos = 0; pos < tokens.size(); ++pos) {
    const std::size_t window =
        std::min<std::size_t>(pos, static_cast<std::size_t>(base_.order));
    TokenSequence context(tokens.begin() + static_cast<std::ptrdiff_t>(pos - window),
                          tokens.begin() + static_cast<std::ptrdiff_t>(pos));
    counts_[context][tokens[pos]] += 1.0;
  }
}

ToyModelSpec ToyTableBuilder::build(double peak_logit) const {
  ToyModelSpec spec = base_;
  for (const auto& [context, observed] : counts_) {
    double max_count = 0.0;
    for (const auto& [token, count] : observed) {
      max_count = std::max(max_count, count);
    }
    LogitVector row(spec.vocab.size(), 0.0);
    for (const auto& [token, count] : observed) {
      row[static_cast<std::size_t>(token)] = peak_logit * count / max_count;
    }
    spec.table.emplace(context, std::move(row));
  }
  spec.validate();
  return spec;
}

}  // namespace dptext
