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

#include "dptext/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dptext/errors.hpp"

namespace dptext {

namespace {

void check_finite(const LogitVector& logits, const char* what) {
  for (double v : logits) {
    if (!std::isfinite(v)) {
      throw InvalidInputError(std::string(what) +
                              ": logit vector contains a non-finite entry");
    }
  }
}

void check_temperature(double temperature) {
  if (!(temperature > 0.0)) {
    throw InvalidParameterError("temperature must be positive, got " +
                                std::to_string(temperature));
  }
}

}  // namespace

ClippedLogits clip_logits(const LogitVector& logits, double clip_bound) {
  if (!(clip_bound > 0.0)) {
    throw InvalidParameterError("clip bound must be positive, got " +
                                std::to_string(clip_bound));
  }
  if (logits.empty()) {
    throw InvalidInputError("clip_logits: empty logit vector");
  }
  check_finite(logits, "clip_logits");

  const double max = *std::max_element(logits.begin(), logits.end());
  ClippedLogits out;
  out.clip_bound = clip_bound;
  out.values.resize(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out.values[i] = std::max(-clip_bound, logits[i] - max + clip_bound);
  }
  return out;
}

LogitVector aggregate_private(const std::vector<LogitVector>& private_logits,
                              double clip_bound, std::size_t subset_size) {
  if (subset_size < 1) {
    throw InvalidParameterError("subset size must be at least 1");
  }
  if (private_logits.empty()) {
    throw InvalidInputError("aggregate_private: no logit vectors");
  }
  if (private_logits.size() > subset_size) {
    throw InvalidInputError(
        "aggregate_private: got " + std::to_string(private_logits.size()) +
        " vectors for fixed subset size " + std::to_string(subset_size));
  }
  const std::size_t vocab = private_logits.front().size();
  for (const auto& z : private_logits) {
    if (z.size() != vocab) {
      throw DimensionError("aggregate_private: vocab size mismatch, " +
                           std::to_string(z.size()) + " vs " +
                           std::to_string(vocab));
    }
  }

  LogitVector sum(vocab, 0.0);
  for (const auto& z : private_logits) {
    ClippedLogits clipped = clip_logits(z, clip_bound);
    for (std::size_t i = 0; i < vocab; ++i) {
      sum[i] += clipped.values[i];
    }
  }
  const double inv = 1.0 / static_cast<double>(subset_size);
  for (double& v : sum) {
    v *= inv;
  }
  return sum;
}

LogitVector blend(const LogitVector& private_mean,
                  const ClippedLogits& public_logits) {
  if (private_mean.size() != public_logits.values.size()) {
    throw DimensionError("blend: vocab size mismatch, " +
                         std::to_string(private_mean.size()) + " vs " +
                         std::to_string(public_logits.values.size()));
  }
  LogitVector out(private_mean.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = 0.5 * (private_mean[i] + public_logits.values[i]);
  }
  return out;
}

double sensitivity(double clip_bound, std::size_t subset_size) {
  if (!(clip_bound > 0.0)) {
    throw InvalidParameterError("clip bound must be positive");
  }
  if (subset_size < 1) {
    throw InvalidParameterError("subset size must be at least 1");
  }
  return clip_bound / (2.0 * static_cast<double>(subset_size));
}

TokenDistribution token_distribution(const LogitVector& logits,
                                     double temperature) {
  check_temperature(temperature);
  if (logits.empty()) {
    throw InvalidInputError("token_distribution: empty logit vector");
  }
  check_finite(logits, "token_distribution");

  // Max-subtracted form. Clipped inputs cannot overflow anyway, but the
  // stable form is used unconditionally.
  const double max = *std::max_element(logits.begin(), logits.end());
  TokenDistribution dist;
  dist.temperature = temperature;
  dist.probs.resize(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    dist.probs[i] = std::exp((logits[i] - max) / temperature);
    total += dist.probs[i];
  }
  for (double& p : dist.probs) {
    p /= total;
  }
  return dist;
}

TokenId sample_token(const LogitVector& logits, double temperature,
                     std::mt19937_64& rng) {
  TokenDistribution dist = token_distribution(logits, temperature);
  const double u = uniform01(rng);
  double cumulative = 0.0;
  for (std::size_t i = 0; i < dist.probs.size(); ++i) {
    cumulative += dist.probs[i];
    if (u < cumulative) {
      return static_cast<TokenId>(i);
    }
  }
  // Rounding can leave the final cumulative a hair below 1.
  return static_cast<TokenId>(dist.probs.size() - 1);
}

}  // namespace dptext
