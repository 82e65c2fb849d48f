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

#include <cstdint>
#include <string>

namespace dptext {

// Target privacy budget for one generation run.
struct DpParams {
  double epsilon = 0.0;      // total (epsilon, delta) budget
  double delta = 0.0;        // in (0, 1]
  int max_tokens = 0;        // T, composition steps per generated example
  double clip_bound = 0.0;   // c
  int subset_size = 0;       // s, records per disjoint private subset

  // Throws InvalidParameterError if any invariant fails.
  void validate() const;
};

// Quantities derived from DpParams by the temperature solve:
//   sensitivity       Delta = c / (2s)
//   temperature       tau = 2 * Delta * sqrt(2T ln(1/delta)) / epsilon
//   per_token_epsilon eps' = 2 * Delta / tau = c / (s * tau)
struct DerivedPrivacy {
  double sensitivity = 0.0;
  double temperature = 0.0;
  double per_token_epsilon = 0.0;
};

// Both advanced-composition readings of T steps of an eps'-DP mechanism.
// `simplified` is the small-eps' form the temperature solve inverts;
// `full` keeps the T * eps' * (e^eps' - 1) term and is never smaller.
struct ComposedEpsilon {
  double simplified = 0.0;
  double full = 0.0;
};

// Solves the sampling temperature so that composing the per-token cost over
// max_tokens steps meets the (epsilon, delta) target exactly under the
// simplified composition form. Rejects delta >= 1 (the solve degenerates to
// tau = 0) in addition to the DpParams invariants.
DerivedPrivacy solve_temperature(const DpParams& params);

// eps' = c / (s * tau): the exponential-mechanism cost of one token sampled
// at temperature tau from logits with sensitivity c / (2s).
double per_token_epsilon(double clip_bound, int subset_size,
                         double temperature);

// Advanced composition of `steps` sequential eps'-DP releases.
ComposedEpsilon compose(double eps_prime, int steps, double delta);

// Full audit block for a run: parameters, derived quantities, and both
// composed bounds. to_text() renders the structured report emitted into run
// metadata.
struct AccountantReport {
  DpParams params;
  DerivedPrivacy derived;
  ComposedEpsilon composed;

  std::string to_text() const;
};

AccountantReport audit(const DpParams& params);

// Runtime counter enforcing that at most max_tokens privacy-charged steps
// occur per generated example. Each generation run owns its own ledger;
// mutation is not synchronized.
class BudgetLedger {
 public:
  BudgetLedger(const DpParams& params, double eps_prime);

  // Records one charged token. Throws BudgetExhaustedError once
  // spent_tokens reaches max_tokens; the generation loop must stop.
  void charge();

  int spent_tokens() const { return spent_; }
  int remaining() const { return params_.max_tokens - spent_; }
  bool exhausted() const { return spent_ >= params_.max_tokens; }
  double per_token_epsilon() const { return eps_prime_; }
  const DpParams& params() const { return params_; }

 private:
  DpParams params_;
  double eps_prime_ = 0.0;
  int spent_ = 0;
};

}  // namespace dptext
