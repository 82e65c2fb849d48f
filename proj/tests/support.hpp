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

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "dptext/common.hpp"
#include "dptext/errors.hpp"
#include "dptext/provider.hpp"
#include "dptext/toy_model.hpp"

namespace testsupport {

inline dptext::ToyModelSpec make_spec(const std::string& chars, int order = 3,
                                      std::uint64_t fallback_seed = 7,
                                      double fallback_scale = 1.0) {
  dptext::ToyModelSpec spec;
  for (char c : chars) {
    spec.vocab.emplace_back(1, c);
  }
  spec.vocab.emplace_back("<eos>");
  spec.order = order;
  spec.fallback_seed = fallback_seed;
  spec.fallback_scale = fallback_scale;
  return spec;
}

inline dptext::LogitVector random_logits(std::size_t vocab,
                                         std::mt19937_64& rng,
                                         double scale = 20.0) {
  dptext::LogitVector out(vocab);
  for (double& v : out) {
    v = (dptext::uniform01(rng) - 0.5) * 2.0 * scale;
  }
  return out;
}

// Scoped temporary directory for file-shaped fixtures.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    dir_ = std::filesystem::temp_directory_path() /
           ("dptext_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    std::filesystem::create_directories(dir_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(dir_, ec);
  }
  std::filesystem::path path(const std::string& name) const {
    return dir_ / name;
  }
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

// Provider that spells scripted answer strings, one per opened session, in
// open order. Used to drive the evaluation harness to exact accuracies.
class ScriptedAnswerProvider final : public dptext::LogitProvider {
 public:
  explicit ScriptedAnswerProvider(std::vector<std::string> answers)
      : answers_(std::move(answers)) {
    for (int c = 32; c < 127; ++c) {
      vocab_.emplace_back(1, static_cast<char>(c));
    }
    vocab_.emplace_back("\n");
    vocab_.emplace_back("<eos>");
  }

  std::size_t vocab_size() const override { return vocab_.size(); }
  dptext::TokenId eos_token() const override {
    return static_cast<dptext::TokenId>(vocab_.size() - 1);
  }

  dptext::TokenSequence encode(const std::string& text) const override {
    dptext::TokenSequence out;
    for (char c : text) {
      if (c == '\n') {
        out.push_back(static_cast<dptext::TokenId>(vocab_.size() - 2));
      } else if (c >= 32 && c < 127) {
        out.push_back(static_cast<dptext::TokenId>(c - 32));
      } else {
        throw dptext::EncodingError("scripted provider: unsupported char");
      }
    }
    return out;
  }

  std::string decode(const dptext::TokenSequence& tokens) const override {
    std::string out;
    for (dptext::TokenId t : tokens) {
      if (t != eos_token()) {
        out += vocab_[static_cast<std::size_t>(t)];
      }
    }
    return out;
  }

  std::unique_ptr<dptext::ProviderSession> open_session(
      const dptext::TokenSequence& prompt_tokens) override {
    std::string answer;
    if (next_ < answers_.size()) {
      answer = answers_[next_++];
    }
    return std::make_unique<Session>(*this, prompt_tokens, answer);
  }

 private:
  class Session final : public dptext::ProviderSession {
   public:
    Session(const ScriptedAnswerProvider& owner, dptext::TokenSequence prompt,
            std::string answer)
        : owner_(owner),
          prefix_(std::move(prompt)),
          answer_tokens_(owner.encode(answer)) {}

    dptext::LogitVector next_logits() override {
      dptext::LogitVector logits(owner_.vocab_size(), 0.0);
      const dptext::TokenId target =
          position_ < answer_tokens_.size()
              ? answer_tokens_[position_]
              : owner_.eos_token();
      logits[static_cast<std::size_t>(target)] = 50.0;
      return logits;
    }

    void append_token(dptext::TokenId token) override {
      prefix_.push_back(token);
      ++position_;
    }

    const dptext::TokenSequence& prefix() const override { return prefix_; }
    void close() override {}

   private:
    const ScriptedAnswerProvider& owner_;
    dptext::TokenSequence prefix_;
    dptext::TokenSequence answer_tokens_;
    std::size_t position_ = 0;
  };

  std::vector<std::string> vocab_;
  std::vector<std::string> answers_;
  std::size_t next_ = 0;
};

// Wrapper that records every opened prompt, for taint checks on the public
// session.
class RecordingProvider final : public dptext::LogitProvider {
 public:
  explicit RecordingProvider(dptext::LogitProvider& inner) : inner_(inner) {}

  std::size_t vocab_size() const override { return inner_.vocab_size(); }
  dptext::TokenId eos_token() const override { return inner_.eos_token(); }
  dptext::TokenSequence encode(const std::string& text) const override {
    return inner_.encode(text);
  }
  std::string decode(const dptext::TokenSequence& tokens) const override {
    return inner_.decode(tokens);
  }
  std::unique_ptr<dptext::ProviderSession> open_session(
      const dptext::TokenSequence& prompt_tokens) override {
    opened_prompts.push_back(inner_.decode(prompt_tokens));
    return inner_.open_session(prompt_tokens);
  }

  std::vector<std::string> opened_prompts;

 private:
  dptext::LogitProvider& inner_;
};

// Direct transcription of the private prediction loop: fresh full-prefix
// model evaluations each step (no session reuse) and locally written clip,
// mean, blend, softmax and inverse-CDF sampling. Only the toy table
// evaluation is shared with the implementation under test.
struct BruteForceResult {
  dptext::TokenSequence tokens;
  std::vector<std::vector<double>> step_distributions;
  bool eos_terminated = false;
};

inline BruteForceResult brute_force_generate(
    const dptext::ToyModel& model,
    const std::vector<dptext::TokenSequence>& private_prompts,
    const dptext::TokenSequence& public_prompt, double clip_bound,
    std::size_t subset_size, double tau, int max_tokens, std::uint64_t seed) {
  const std::size_t vocab = model.vocab_size();
  BruteForceResult result;
  std::mt19937_64 rng(seed);
  dptext::TokenSequence generated;

  const auto clip = [&](const dptext::LogitVector& z) {
    double max = z[0];
    for (double v : z) {
      max = std::max(max, v);
    }
    dptext::LogitVector out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
      out[i] = std::max(-clip_bound, z[i] - max + clip_bound);
    }
    return out;
  };

  for (int step = 0; step < max_tokens; ++step) {
    std::vector<double> mean(vocab, 0.0);
    for (const auto& prompt : private_prompts) {
      dptext::TokenSequence full = prompt;
      full.insert(full.end(), generated.begin(), generated.end());
      const dptext::LogitVector clipped = clip(model.logits_for_prefix(full));
      for (std::size_t v = 0; v < vocab; ++v) {
        mean[v] += clipped[v];
      }
    }
    for (std::size_t v = 0; v < vocab; ++v) {
      mean[v] /= static_cast<double>(subset_size);
    }

    dptext::TokenSequence full_public = public_prompt;
    full_public.insert(full_public.end(), generated.begin(), generated.end());
    const dptext::LogitVector public_clipped =
        clip(model.logits_for_prefix(full_public));

    std::vector<double> blended(vocab);
    for (std::size_t v = 0; v < vocab; ++v) {
      blended[v] = 0.5 * (mean[v] + public_clipped[v]);
    }

    double max = blended[0];
    for (double v : blended) {
      max = std::max(max, v);
    }
    std::vector<double> probs(vocab);
    double total = 0.0;
    for (std::size_t v = 0; v < vocab; ++v) {
      probs[v] = std::exp((blended[v] - max) / tau);
      total += probs[v];
    }
    for (double& p : probs) {
      p /= total;
    }
    result.step_distributions.push_back(probs);

    const double u = dptext::uniform01(rng);
    std::size_t sampled = vocab - 1;
    double cumulative = 0.0;
    for (std::size_t v = 0; v < vocab; ++v) {
      cumulative += probs[v];
      if (u < cumulative) {
        sampled = v;
        break;
      }
    }

    if (static_cast<dptext::TokenId>(sampled) == model.eos_token()) {
      result.eos_terminated = true;
      break;
    }
    generated.push_back(static_cast<dptext::TokenId>(sampled));
  }
  result.tokens = generated;
  return result;
}

}  // namespace testsupport
