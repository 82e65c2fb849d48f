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

#include <doctest.h>

#include "dptext/common.hpp"
#include "dptext/errors.hpp"

using namespace dptext;

namespace {

DpParams reference_params() {
  return DpParams{1.0, 1e-6, 100, 10.0, 500};
}

DpParams random_params(std::mt19937_64& rng) {
  DpParams params;
  params.epsilon = 0.1 + uniform01(rng) * 8.0;
  params.delta = std::pow(10.0, -1.0 - uniform01(rng) * 8.0);
  params.max_tokens = 1 + static_cast<int>(uniform01(rng) * 400);
  params.clip_bound = 0.5 + uniform01(rng) * 20.0;
  params.subset_size = 1 + static_cast<int>(uniform01(rng) * 600);
  return params;
}

}  // namespace

TEST_CASE("temperature solve reproduces the worked example") {
  const DerivedPrivacy derived = solve_temperature(reference_params());
  CHECK(derived.sensitivity == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(std::abs(derived.temperature - 1.05130) < 1e-4);
  CHECK(std::abs(derived.per_token_epsilon - 0.0190240) < 1e-6);

  // Direct evaluation of the formula as an independent cross-check.
  const double expected_tau =
      2.0 * 0.01 * std::sqrt(2.0 * 100.0 * std::log(1e6)) / 1.0;
  CHECK(derived.temperature == doctest::Approx(expected_tau).epsilon(1e-14));
}

TEST_CASE("temperature scaling relations") {
  const DpParams base = reference_params();
  const DerivedPrivacy reference = solve_temperature(base);

  DpParams doubled_subset = base;
  doubled_subset.subset_size *= 2;
  CHECK(solve_temperature(doubled_subset).temperature ==
        doctest::Approx(reference.temperature / 2.0).epsilon(1e-12));

  DpParams scaled_epsilon = base;
  scaled_epsilon.epsilon *= 4.0;
  CHECK(solve_temperature(scaled_epsilon).temperature ==
        doctest::Approx(reference.temperature / 4.0).epsilon(1e-12));
}

TEST_CASE("temperature monotonicity") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const DpParams params = random_params(rng);
    const double tau = solve_temperature(params).temperature;

    DpParams more_steps = params;
    more_steps.max_tokens += 1 + static_cast<int>(uniform01(rng) * 50);
    CHECK(solve_temperature(more_steps).temperature > tau);

    DpParams smaller_delta = params;
    smaller_delta.delta = params.delta / 10.0;
    CHECK(solve_temperature(smaller_delta).temperature > tau);

    DpParams bigger_epsilon = params;
    bigger_epsilon.epsilon = params.epsilon * 1.5;
    CHECK(solve_temperature(bigger_epsilon).temperature < tau);

    DpParams bigger_subset = params;
    bigger_subset.subset_size += 1;
    CHECK(solve_temperature(bigger_subset).temperature < tau);
  }
}

TEST_CASE("per-token epsilon formula") {
  CHECK(std::abs(per_token_epsilon(10.0, 500, 1.05130) - 0.0190240) < 1e-6);
  // Lemma setting: tau = 2 * Delta at epsilon = 1.
  CHECK(per_token_epsilon(10.0, 500, 0.02) ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK(per_token_epsilon(10.0, 500, 1e12) < 1e-10);
  CHECK_THROWS_AS(per_token_epsilon(0.0, 5, 1.0), InvalidParameterError);
  CHECK_THROWS_AS(per_token_epsilon(1.0, 0, 1.0), InvalidParameterError);
  CHECK_THROWS_AS(per_token_epsilon(1.0, 5, 0.0), InvalidParameterError);
}

TEST_CASE("composition forms") {
  SUBCASE("single step") {
    const ComposedEpsilon one = compose(0.01, 1, 1e-6);
    CHECK(std::abs(one.simplified - 0.05256) < 1e-5);
    CHECK(one.simplified ==
          doctest::Approx(std::sqrt(2.0 * std::log(1e6)) * 0.01)
              .epsilon(1e-14));
  }

  SUBCASE("full bound dominates and the gap vanishes") {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 200; ++trial) {
      const double eps_prime = std::pow(10.0, -6.0 + uniform01(rng) * 6.0);
      const int steps = 1 + static_cast<int>(uniform01(rng) * 500);
      const double delta = std::pow(10.0, -1.0 - uniform01(rng) * 8.0);
      const ComposedEpsilon bounds = compose(eps_prime, steps, delta);
      CHECK(bounds.full >= bounds.simplified);
    }
    const ComposedEpsilon tiny = compose(1e-9, 100, 1e-6);
    CHECK(tiny.full - tiny.simplified < 1e-12);
    CHECK(tiny.simplified < 1e-6);
  }

  SUBCASE("rejects bad delta") {
    CHECK_THROWS_AS(compose(0.01, 10, 0.0), InvalidParameterError);
    CHECK_THROWS_AS(compose(0.01, 10, 1.5), InvalidParameterError);
    CHECK_THROWS_AS(compose(0.0, 10, 1e-6), InvalidParameterError);
  }
}

TEST_CASE("round trip: solve then compose recovers the target epsilon") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const DpParams params = random_params(rng);
    const DerivedPrivacy derived = solve_temperature(params);
    const double recovered =
        compose(per_token_epsilon(params.clip_bound, params.subset_size,
                                  derived.temperature),
                params.max_tokens, params.delta)
            .simplified;
    CHECK(std::abs(recovered - params.epsilon) <=
          1e-9 * std::abs(params.epsilon));
  }
}

TEST_CASE("parameter validation") {
  DpParams params = reference_params();
  params.delta = 0.0;
  CHECK_THROWS_AS(solve_temperature(params), InvalidParameterError);

  params = reference_params();
  params.epsilon = 0.0;
  CHECK_THROWS_AS(solve_temperature(params), InvalidParameterError);

  params = reference_params();
  params.epsilon = -2.0;
  CHECK_THROWS_AS(params.validate(), InvalidParameterError);

  params = reference_params();
  params.max_tokens = 0;
  CHECK_THROWS_AS(params.validate(), InvalidParameterError);

  params = reference_params();
  params.subset_size = 0;
  CHECK_THROWS_AS(params.validate(), InvalidParameterError);

  // delta = 1 satisfies the type invariant but degenerates the solve.
  params = reference_params();
  params.delta = 1.0;
  CHECK_NOTHROW(params.validate());
  CHECK_THROWS_AS(solve_temperature(params), InvalidParameterError);
}

TEST_CASE("budget ledger enforces the token cap") {
  DpParams params = reference_params();
  params.max_tokens = 5;
  BudgetLedger ledger(params, 0.02);

  for (int i = 0; i < 5; ++i) {
    CHECK(ledger.remaining() == 5 - i);
    ledger.charge();
  }
  CHECK(ledger.spent_tokens() == 5);
  CHECK(ledger.exhausted());
  CHECK_THROWS_AS(ledger.charge(), BudgetExhaustedError);
  CHECK(ledger.spent_tokens() == 5);

  params.max_tokens = 0;
  CHECK_THROWS_AS(BudgetLedger(params, 0.02), InvalidParameterError);
}

TEST_CASE("audit report carries every quantity") {
  const AccountantReport report = audit(reference_params());
  const std::string text = report.to_text();
  CHECK(text.find("sensitivity") != std::string::npos);
  CHECK(text.find("temperature") != std::string::npos);
  CHECK(text.find("1.05130") != std::string::npos);
  CHECK(text.find("per-token epsilon") != std::string::npos);
  CHECK(report.composed.simplified == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(report.composed.full > report.composed.simplified);
}
