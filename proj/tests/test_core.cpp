// Copyright 2026 The dpplan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>

#include "dpplan/bounds.hpp"
#include "dpplan/core.hpp"
#include "test_helpers.hpp"

using namespace dpplan;
using Catch::Approx;

TEST_CASE("beta must lie strictly inside (0,1)") {
  CHECK_THROWS_AS(Beta(0.0), DomainError);
  CHECK_THROWS_AS(Beta(1.0), DomainError);
  CHECK_THROWS_AS(Beta(-0.2), DomainError);
  CHECK(Beta(0.5).value() == 0.5);
}

TEST_CASE("alpha is non-negative and may be infinite") {
  CHECK_THROWS_AS(Alpha(-1.0), DomainError);
  CHECK(Alpha::infinity().is_infinite());
  CHECK(Alpha(0.0).value() == 0.0);
}

TEST_CASE("epsilon rejects negative and NaN") {
  CHECK_THROWS_AS(Epsilon(-0.1), DomainError);
  CHECK(Epsilon(0.0).value() == 0.0);
}

TEST_CASE("stability factor is at least one") {
  CHECK_THROWS_AS(StabilityFactor(0), DomainError);
  CHECK(StabilityFactor(3).value() == 3);
}

TEST_CASE("icdf_eval validates the beta domain") {
  ICdf f = laplace_icdf(1.0);
  CHECK_THROWS_AS(icdf_eval(f, Beta(1.5)), DomainError);
  CHECK(icdf_eval(f, Beta(0.5)).value() == Approx(std::log(2.0)));
}

TEST_CASE("laplace icdf matches the closed form") {
  // b = 1, beta ~ 1: alpha ~ 0
  CHECK(laplace_icdf(1.0).eval(1.0 - 1e-12) == Approx(0.0).margin(1e-9));
  // b = 1, beta = 0.05
  CHECK(laplace_icdf(1.0).eval(0.05) == Approx(2.995732273553991));
  // b = 10, beta = 0.005
  CHECK(laplace_icdf(10.0).eval(0.005) == Approx(52.983173665480365));
}

TEST_CASE("icdf monotonicity: smaller beta gives larger or equal alpha") {
  testutil::TestRng rng(11);
  std::vector<ICdf> cases;
  cases.push_back(laplace_icdf(0.7));
  cases.push_back(union_bound({laplace_icdf(1.0), laplace_icdf(2.5)}));
  cases.push_back(chernoff_bound({1.0, 1.0, 0.5, 3.0}));
  for (const ICdf& f : cases) {
    double prev = std::numeric_limits<double>::infinity();
    for (double beta = 0.001; beta < 1.0; beta += 0.013) {
      double a = f.eval(beta);
      CHECK(a <= prev + 1e-12);
      CHECK(a >= 0.0);
      prev = a;
    }
  }
}

TEST_CASE("default noisy value is the symbolic placeholder") {
  NoisyValue v;
  CHECK(v.symbolic());
  CHECK(v.tainted());
  CHECK(v.labels().empty());
  CHECK_THROWS_AS(v.icdf(), ContractError);
}

TEST_CASE("untainted values carry exactly one label") {
  NoisyValue v = detail::NoisyValueAccess::make(laplace_icdf(2.0), 2.0, {4});
  CHECK(!v.tainted());
  CHECK(v.labels().size() == 1);
  // combining drops the witness and unions the labels
  NoisyValue w = detail::NoisyValueAccess::make(laplace_icdf(1.0), 1.0, {5});
  NoisyValue s = add({v, w});
  CHECK(s.tainted());
  CHECK(s.labels() == std::vector<LabelId>{4, 5});
}
