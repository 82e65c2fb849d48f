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

#include <cstddef>
#include <random>
#include <vector>

#include "dptext/common.hpp"

namespace dptext {

// Logits after clip-and-recenter: every entry lies in [-clip_bound,
// clip_bound], the maximum entry equals clip_bound exactly, and the argmax
// set matches the pre-clip vector.
struct ClippedLogits {
  std::vector<double> values;
  double clip_bound = 0.0;
};

// Exact temperature-scaled softmax of a logit vector. probs sums to 1
// within 1e-12 absolute at desk-scale vocabularies.
struct TokenDistribution {
  std::vector<double> probs;
  double temperature = 1.0;
};

// clip(z)[i] = max(-c, z[i] - max_j z[j] + c).
//
// Re-centers so the best token sits exactly at +c and floors everything else
// at -c, bounding each vector's influence in the infinity norm without
// changing the softmax argmax. Throws InvalidParameterError for c <= 0 and
// InvalidInputError for non-finite or empty input.
ClippedLogits clip_logits(const LogitVector& logits, double clip_bound);

// Mean of clipped private logit vectors with the divisor held at
// subset_size, not at |private_logits|. The fixed divisor is what gives the
// add/remove neighbor bound of c/(2s) after blending: a missing record
// contributes a zero vector, whose clipped counterpart has infinity norm at
// most c. Accepts between 1 and subset_size vectors; every output entry lies
// in [-c, c].
LogitVector aggregate_private(const std::vector<LogitVector>& private_logits,
                              double clip_bound, std::size_t subset_size);

// Entrywise mean of the private aggregate and the clipped public logits.
// Halves the per-record sensitivity to c/(2s) and preserves token
// preferences common to both sources.
LogitVector blend(const LogitVector& private_mean,
                  const ClippedLogits& public_logits);

// Worst-case infinity-norm sensitivity of the blended aggregate under
// add/remove adjacency: c / (2s).
double sensitivity(double clip_bound, std::size_t subset_size);

// Exact softmax(logits / temperature) with max-subtracted normalization.
TokenDistribution token_distribution(const LogitVector& logits,
                                     double temperature);

// Samples one token index from softmax(logits / temperature). Consumes
// exactly one engine draw, so identical rng state yields identical indices.
TokenId sample_token(const LogitVector& logits, double temperature,
                     std::mt19937_64& rng);

}  // namespace dptext
