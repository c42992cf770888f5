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
#include <limits>

#include "dpplan/optimizer.hpp"
#include "dpplan/workloads.hpp"
#include "test_helpers.hpp"

using namespace dpplan;
namespace wl = dpplan::workloads;
using Catch::Approx;

namespace {

std::function<Plan(double)> histogram_prog(int keys) {
  return [keys](double eps) {
    Analysis a = keys == 2    ? wl::hist_by_gender(eps)
                 : keys == 16 ? wl::hist_by_gender_age(eps)
                              : wl::hist_by_gender_age_nat(eps);
    return a(DatasetHandle::root());
  };
}

OptimizerInput table_input(double tol) {
  return OptimizerInput{1.0, kOptimizerMinEps, kOptimizerDelta, Beta(0.05),
                        tol, kOptimizerIter};
}

}  // namespace

TEST_CASE("budgeting table rows, one analysis at a time") {
  struct Row {
    int keys;
    double tol;
    OptimizerStatus status;
    double eps;
    double alpha;
  };
  const Row rows[] = {
      {2, 100, OptimizerStatus::kSuccess, 0.06, 61.48},
      {16, 100, OptimizerStatus::kSuccess, 0.06, 96.13},
      {624, 100, OptimizerStatus::kSuccess, 0.11, 85.74},
      {2, 10, OptimizerStatus::kSuccess, 0.41, 8.99},
      {16, 50, OptimizerStatus::kSuccess, 0.16, 36.05},
      {624, 5, OptimizerStatus::kMaxBudget, 1.0, 9.43},
      {2, 5, OptimizerStatus::kSuccess, 0.76, 4.85},
      {16, 5, OptimizerStatus::kMaxBudget, 1.0, 5.76},
      {624, 10, OptimizerStatus::kSuccess, 0.96, 9.82},
  };
  for (const Row& r : rows) {
    CAPTURE(r.keys, r.tol);
    OptimizerOutcome o = iterate_error(histogram_prog(r.keys), table_input(r.tol));
    CHECK(o.status == r.status);
    CHECK(o.epsilon == Approx(r.eps).margin(1e-9));
    CHECK(o.alpha == Approx(r.alpha).margin(0.01));
  }
}

TEST_CASE("choose_eps splits the total budget uniformly") {
  std::vector<std::function<Plan(double)>> analyses = {
      histogram_prog(2), histogram_prog(16), histogram_prog(624)};
  OptimizerInput input{3.0, kOptimizerMinEps, kOptimizerDelta, Beta(0.05), 0.0,
                       kOptimizerIter};
  auto out = choose_eps(analyses, input, {10.0, 50.0, 5.0});
  REQUIRE(out.size() == 3);
  CHECK(out[0].status == OptimizerStatus::kSuccess);
  CHECK(out[0].epsilon == Approx(0.41).margin(1e-9));
  CHECK(out[0].alpha == Approx(8.99).margin(0.01));
  CHECK(out[1].status == OptimizerStatus::kSuccess);
  CHECK(out[1].epsilon == Approx(0.16).margin(1e-9));
  CHECK(out[1].alpha == Approx(36.05).margin(0.01));
  CHECK(out[2].status == OptimizerStatus::kMaxBudget);
  CHECK(out[2].epsilon == Approx(1.0));
  CHECK(out[2].alpha == Approx(9.43).margin(0.01));
}

TEST_CASE("choose_eps validates lengths and handles empty input") {
  OptimizerInput input{3.0, 0.01, 0.05, Beta(0.05), 1.0, 10};
  CHECK_THROWS_AS(choose_eps({histogram_prog(2)}, input, {1.0, 2.0}),
                  ContractError);
  CHECK(choose_eps({}, input, {}).empty());
}

TEST_CASE("an infinite tolerance succeeds at the first probe") {
  OptimizerInput input = table_input(std::numeric_limits<double>::infinity());
  OptimizerOutcome o = iterate_error(histogram_prog(2), input);
  CHECK(o.status == OptimizerStatus::kSuccess);
  CHECK(o.epsilon == Approx(kOptimizerMinEps));
}

TEST_CASE("accuracy is non-increasing in eps for the in-scope analyses") {
  for (int keys : {2, 16, 624}) {
    auto prog = histogram_prog(keys);
    double prev = std::numeric_limits<double>::infinity();
    for (double eps = 0.05; eps <= 2.0; eps += 0.1) {
      double a = accuracy(prog(eps), Beta(0.05)).alpha.value();
      CHECK(a <= prev + 1e-12);
      prev = a;
    }
  }
}

TEST_CASE("successful outcomes are grid-minimal") {
  for (double tol : {100.0, 40.0, 10.0, 5.0}) {
    OptimizerOutcome o = iterate_error(histogram_prog(2), table_input(tol));
    if (o.status != OptimizerStatus::kSuccess) continue;
    CHECK(o.alpha <= tol);
    double prev_eps = o.epsilon - kOptimizerDelta;
    if (prev_eps >= kOptimizerMinEps - 1e-12) {
      double prev_alpha =
          accuracy(histogram_prog(2)(prev_eps), Beta(0.05)).alpha.value();
      CHECK(prev_alpha > tol);
    }
  }
}

TEST_CASE("iteration cap reports MaxIteration with the last probe") {
  OptimizerInput input{1.0, 0.01, 0.05, Beta(0.05), 0.0, 3};
  OptimizerOutcome o = iterate_error(histogram_prog(624), input);
  CHECK(o.status == OptimizerStatus::kMaxIteration);
  CHECK(o.epsilon == Approx(0.01 + 3 * 0.05));
}

TEST_CASE("a budget probe lands exactly on bud_total when the grid overshoots") {
  // tolerance met only above the last grid point, so the final probe at the
  // budget itself decides
  OptimizerInput input{1.0, 0.01, 0.05, Beta(0.05), 9.5, kOptimizerIter};
  OptimizerOutcome o = iterate_error(histogram_prog(624), input);
  CHECK(o.status == OptimizerStatus::kSuccess);
  CHECK(o.epsilon == 1.0);  // ln(12480)/0.96 = 9.82 > 9.5, /1.0 = 9.43 <= 9.5
}

TEST_CASE("optimizer input validation") {
  CHECK_THROWS_AS(
      iterate_error(histogram_prog(2),
                    OptimizerInput{1.0, 0.0, 0.05, Beta(0.05), 1.0, 10}),
      ContractError);
  CHECK_THROWS_AS(
      iterate_error(histogram_prog(2),
                    OptimizerInput{0.005, 0.01, 0.05, Beta(0.05), 1.0, 10}),
      ContractError);
}
