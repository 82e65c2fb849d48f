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

#include "dptext/accountant.hpp"

#include <cmath>
#include <sstream>

#include "dptext/errors.hpp"
#include "dptext/mechanism.hpp"

namespace dptext {

void DpParams::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InvalidParameterError("epsilon must be positive and finite");
  }
  if (!(delta > 0.0) || !(delta <= 1.0)) {
    throw InvalidParameterError("delta must lie in (0, 1]");
  }
  if (max_tokens < 1) {
    throw InvalidParameterError("max_tokens must be at least 1");
  }
  if (!(clip_bound > 0.0) || !std::isfinite(clip_bound)) {
    throw InvalidParameterError("clip_bound must be positive and finite");
  }
  if (subset_size < 1) {
    throw InvalidParameterError("subset_size must be at least 1");
  }
}

DerivedPrivacy solve_temperature(const DpParams& params) {
  params.validate();
  if (params.delta >= 1.0) {
    throw InvalidParameterError(
        "delta = 1 makes the composition term vanish and the solved "
        "temperature zero; pick delta < 1");
  }

  DerivedPrivacy derived;
  derived.sensitivity =
      sensitivity(params.clip_bound, static_cast<std::size_t>(params.subset_size));
  const double comp =
      std::sqrt(2.0 * params.max_tokens * std::log(1.0 / params.delta));
  derived.temperature = 2.0 * derived.sensitivity * comp / params.epsilon;
  derived.per_token_epsilon = per_token_epsilon(
      params.clip_bound, params.subset_size, derived.temperature);
  return derived;
}

double per_token_epsilon(double clip_bound, int subset_size,
                         double temperature) {
  if (!(clip_bound > 0.0)) {
    throw InvalidParameterError("clip_bound must be positive");
  }
  if (subset_size < 1) {
    throw InvalidParameterError("subset_size must be at least 1");
  }
  if (!(temperature > 0.0)) {
    throw InvalidParameterError("temperature must be positive");
  }
  return clip_bound / (static_cast<double>(subset_size) * temperature);
}

ComposedEpsilon compose(double eps_prime, int steps, double delta) {
  if (!(eps_prime > 0.0) || !std::isfinite(eps_prime)) {
    throw InvalidParameterError("per-token epsilon must be positive");
  }
  if (steps < 1) {
    throw InvalidParameterError("composition steps must be at least 1");
  }
  if (!(delta > 0.0) || !(delta <= 1.0)) {
    throw InvalidParameterError("delta must lie in (0, 1]");
  }
  ComposedEpsilon out;
  out.simplified =
      std::sqrt(2.0 * steps * std::log(1.0 / delta)) * eps_prime;
  out.full = out.simplified +
             steps * eps_prime * std::expm1(eps_prime);
  return out;
}

AccountantReport audit(const DpParams& params) {
  AccountantReport report;
  report.params = params;
  report.derived = solve_temperature(params);
  report.composed = compose(report.derived.per_token_epsilon,
                            params.max_tokens, params.delta);
  return report;
}

std::string AccountantReport::to_text() const {
  std::ostringstream os;
  os.precision(10);
  os << "privacy accountant report\n"
     << "  epsilon (target)      " << params.epsilon << "\n"
     << "  delta                 " << params.delta << "\n"
     << "  max tokens (T)        " << params.max_tokens << "\n"
     << "  clip bound (c)        " << params.clip_bound << "\n"
     << "  subset size (s)       " << params.subset_size << "\n"
     << "  sensitivity (Delta)   " << derived.sensitivity << "\n"
     << "  temperature (tau)     " << derived.temperature << "\n"
     << "  per-token epsilon     " << derived.per_token_epsilon << "\n"
     << "  composed (simplified) " << composed.simplified << "\n"
     << "  composed (full)       " << composed.full << "\n";
  return os.str();
}

BudgetLedger::BudgetLedger(const DpParams& params, double eps_prime)
    : params_(params), eps_prime_(eps_prime) {
  params_.validate();
  if (!(eps_prime > 0.0)) {
    throw InvalidParameterError("per-token epsilon must be positive");
  }
}

void BudgetLedger::charge() {
  if (spent_ >= params_.max_tokens) {
    throw BudgetExhaustedError(
        "privacy budget exhausted: " + std::to_string(spent_) + " of " +
        std::to_string(params_.max_tokens) + " token charges spent");
  }
  ++spent_;
}

}  // namespace dptext
