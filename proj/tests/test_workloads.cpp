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
#include <cmath>
#include <map>

#include "dpplan/eval.hpp"
#include "dpplan/workloads.hpp"
#include "test_helpers.hpp"

using namespace dpplan;
namespace wl = dpplan::workloads;
using Catch::Approx;

TEST_CASE("identity strategy matrix") {
  auto m = wl::build_strategy(wl::StrategyKind::kIdentity, 4);
  REQUIRE(m.rows.size() == 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(m.rows[i][j] == (i == j ? 1 : 0));
}

TEST_CASE("hierarchical strategy matrix for four ranges") {
  auto m = wl::build_strategy(wl::StrategyKind::kHierarchical, 4);
  const std::vector<std::vector<int>> expected = {
      {1, 1, 1, 1}, {1, 1, 0, 0}, {0, 0, 1, 1}, {1, 0, 0, 0},
      {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};
  CHECK(m.rows == expected);
}

TEST_CASE("wavelet strategy matrix for four ranges") {
  auto m = wl::build_strategy(wl::StrategyKind::kWavelet, 4);
  const std::vector<std::vector<int>> expected = {
      {1, 1, 1, 1}, {1, 1, -1, -1}, {1, -1, 0, 0}, {0, 0, 1, -1}};
  CHECK(m.rows == expected);
}

TEST_CASE("hierarchical and wavelet need power-of-two domains") {
  CHECK_THROWS_AS(wl::build_strategy(wl::StrategyKind::kHierarchical, 6),
                  ContractError);
  CHECK_THROWS_AS(wl::build_strategy(wl::StrategyKind::kWavelet, 3),
                  ContractError);
  CHECK_NOTHROW(wl::build_strategy(wl::StrategyKind::kIdentity, 6));
}

TEST_CASE("executed cdfs equal the true cdf in the noiseless limit") {
  auto rows = testutil::packet_rows();
  auto bins = wl::default_bins(10);

  // brute-force oracle: count lengths <= bin
  std::vector<double> truth;
  for (auto bin : bins) {
    long c = 0;
    for (const Datum& r : *rows)
      if (r.as_list()[wl::kPacketLengthCol].as_int() <= bin) ++c;
    truth.push_back(static_cast<double>(c));
  }

  for (Analysis a : {wl::cdf_sequential(bins, 1e6), wl::cdf_parallel(bins, 1e6)}) {
    auto got = result_vector(eval_noiseless(a, rows).root.value());
    REQUIRE(got.size() == truth.size());
    for (std::size_t i = 0; i < got.size(); ++i)
      CHECK(got[i] == Approx(truth[i]));
  }
}

TEST_CASE("bottom-up histograms aggregate to the direct counts") {
  auto rows = testutil::demographic_rows();
  EvalResult res = eval_noiseless(wl::hierarchical_bottom_up(1.0), rows);
  const auto& tuple = res.root.tuple();
  const KeyedResultMap& level1 = tuple[0].map();
  const KeyedResultMap& level2 = tuple[1].map();
  const KeyedResultMap& level3 = tuple[2].map();
  REQUIRE(level1.size() == 2);
  REQUIRE(level2.size() == 16);
  REQUIRE(level3.size() == 624);

  // oracle: direct aggregation of the fixture
  std::map<Datum, double> by_gen, by_gen_age;
  for (const Datum& r : *rows) {
    by_gen[wl::gender_of(r)] += 1.0;
    by_gen_age[wl::gender_age_of(r)] += 1.0;
  }
  for (const auto& [k, v] : level1)
    CHECK(result_scalar(v) == Approx(by_gen[k]));
  for (const auto& [k, v] : level2)
    CHECK(result_scalar(v) == Approx(by_gen_age[k]).margin(1e-9));

  double total3 = 0.0;
  for (const auto& [k, v] : level3) total3 += result_scalar(v);
  CHECK(total3 == Approx(static_cast<double>(rows->size())));
}

TEST_CASE("split histograms run under their summed budget") {
  auto rows = testutil::demographic_rows();
  EvalResult res = eval(wl::hierarchical_split(1.0, 1.0, 1.0), rows, 3.0, 11);
  REQUIRE(res.root.tuple().size() == 3);
  CHECK(res.root.tuple()[0].map().size() == 2);
}

TEST_CASE("range workload: singleton ranges carry the plain laplace bound") {
  auto rep = wl::answer_range_workload(
      wl::build_strategy(wl::StrategyKind::kIdentity, 8), 1.0, Beta(0.05));
  REQUIRE(rep.answers.size() == 36);
  double nq = 36.0;
  for (const auto& a : rep.answers)
    if (a.lo == a.hi)
      CHECK(a.alpha == Approx(testutil::oracle_laplace(1.0, 0.05 / nq)));
}

TEST_CASE("identity per-query error is non-decreasing in range length") {
  for (int n : {8, 16}) {
    auto rep = wl::answer_range_workload(
        wl::build_strategy(wl::StrategyKind::kIdentity, n), 1.0, Beta(0.05));
    std::map<int, double> by_len;
    for (const auto& a : rep.answers) by_len[a.hi - a.lo + 1] = a.alpha;
    double prev = 0.0;
    for (const auto& [len, alpha] : by_len) {
      CHECK(alpha >= prev - 1e-12);
      prev = alpha;
    }
  }
}

TEST_CASE("hierarchical and wavelet never beat the identity strategy") {
  for (int n : {4, 8}) {
    auto id = wl::answer_range_workload(
        wl::build_strategy(wl::StrategyKind::kIdentity, n), 1.0, Beta(0.05));
    auto h = wl::answer_range_workload(
        wl::build_strategy(wl::StrategyKind::kHierarchical, n), 1.0,
        Beta(0.05));
    auto y = wl::answer_range_workload(
        wl::build_strategy(wl::StrategyKind::kWavelet, n), 1.0, Beta(0.05));
    REQUIRE(h.answers.size() == id.answers.size());
    REQUIRE(y.answers.size() == id.answers.size());
    for (std::size_t i = 0; i < id.answers.size(); ++i) {
      CHECK(h.answers[i].alpha >= id.answers[i].alpha - 1e-9);
      CHECK(y.answers[i].alpha >= id.answers[i].alpha - 1e-9);
    }
  }
}

TEST_CASE("executed identity range answers match the exact range counts") {
  auto rows = testutil::packet_rows();
  const int n = 8;
  auto rep = wl::answer_range_workload(
      wl::build_strategy(wl::StrategyKind::kIdentity, n), 1e6, Beta(0.05),
      rows, 21);

  // oracle: unit histogram by the same binning, then prefix sums
  std::vector<double> units(n, 0.0);
  auto unit_of = wl::packet_unit_of(n);
  for (const Datum& r : *rows) units[unit_of(r).as_int() - 1] += 1.0;

  for (const auto& a : rep.answers) {
    double expected = 0.0;
    for (int i = a.lo; i <= a.hi; ++i) expected += units[i - 1];
    REQUIRE(a.value.has_value());
    CHECK(*a.value == Approx(expected).margin(1e-2));
  }
}

TEST_CASE("full-range identity error at the published operating point") {
  // n = 512: chernoff over 512 unit scales at beta split over 131328 queries
  auto strat = wl::build_strategy(wl::StrategyKind::kIdentity, 512);
  std::vector<double> scales(512, 1.0);
  double nq = 512.0 * 513.0 / 2.0;
  double expected = testutil::oracle_chernoff(scales, 0.05 / nq);
  CHECK(expected == Approx(251.8).margin(0.5));
}

TEST_CASE("crossover count for unit scales at beta 0.1 is fixed") {
  // implementation-verified constant: the smallest operand count where the
  // chernoff bound undercuts the union bound
  auto table = wl::compare_bounds_table(1.0, Beta(0.1), 10);
  int crossover = 0;
  for (const auto& r : table)
    if (r.chernoff_alpha < r.union_alpha) {
      crossover = r.n;
      break;
    }
  CHECK(crossover == 3);
}

TEST_CASE("bound comparison table is plot-ready and crosses over") {
  auto table = wl::compare_bounds_table(1.0, Beta(0.1), 100);
  REQUIRE(table.size() == 99);
  CHECK(table.front().n == 2);
  CHECK(table.front().union_alpha == Approx(5.991464547107982));
  CHECK(table.front().chernoff_alpha == Approx(8.473259375934296));
  CHECK(table.back().union_alpha == Approx(690.775527898212));
  CHECK(table.back().chernoff_alpha == Approx(48.95498556855294));
  CHECK(table.front().union_alpha < table.front().chernoff_alpha);
  CHECK(table.back().chernoff_alpha < table.back().union_alpha);
}

TEST_CASE("demographic key domains have the published cardinalities") {
  CHECK(wl::gender_keys().size() == 2);
  CHECK(wl::gender_age_keys().size() == 16);
  CHECK(wl::gender_age_nat_keys().size() == 624);
  CHECK(wl::nationalities().size() == 39);
}

TEST_CASE("bin construction validates its input") {
  CHECK_THROWS_AS(wl::default_bins(0), ContractError);
  CHECK_THROWS_AS(wl::cdf_sequential({10, 10}, 1.0), ContractError);
  CHECK_THROWS_AS(wl::cdf_parallel({}, 1.0), ContractError);
}
