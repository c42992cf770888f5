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

#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "dpplan/budget.hpp"
#include "dpplan/interpret.hpp"

namespace dpplan {

/// Concrete execution output. Wraps the final plan value; the helpers below
/// read the numeric content (curator-side surface — plans themselves never
/// observe these numbers during construction).
struct EvalResult {
  PlanValue root;
};

/// Concrete scalar carried by an executed noisy value.
inline double result_scalar(const NoisyValue& v) {
  const auto& c = detail::NoisyValueAccess::scalar(v);
  if (!c) throw ContractError("noisy value carries no concrete scalar");
  return *c;
}

/// Concrete vector carried by an executed norm-aggregated value.
inline const std::vector<double>& result_vector(const NoisyValue& v) {
  const auto& c = detail::NoisyValueAccess::vector(v);
  if (!c) throw ContractError("noisy value carries no concrete vector");
  return *c;
}

namespace detail {

inline EvalResult eval_impl(const Analysis& analysis,
                            std::shared_ptr<const std::vector<Datum>> rows,
                            double budget_cap, bool gate, bool noiseless,
                            std::uint64_t seed) {
  DatasetHandle root = DatasetHandle::root(rows);
  Plan plan = analysis(root);
  if (gate) {
    // Static checks run first: a refused plan never draws a single sample.
    BudgetReport report = budget(plan);
    if (report.total.value() > budget_cap)
      throw BudgetExceededError(report.total.value(), budget_cap);
  }
  Walker w(Walker::Mode::kExecute, noiseless, seed);
  return EvalResult{w.run(plan)};
}

}  // namespace detail

/// Execute an analysis on materialized rows under a privacy-budget cap.
/// Refuses (before any sampling) when the static budget exceeds the cap or
/// when the partition-safety check fails. Identical seeds give identical
/// outputs.
inline EvalResult eval(const Analysis& analysis, std::vector<Datum> rows,
                       double budget_cap, std::uint64_t seed) {
  auto shared = std::make_shared<const std::vector<Datum>>(std::move(rows));
  return detail::eval_impl(analysis, shared, budget_cap, /*gate=*/true,
                           /*noiseless=*/false, seed);
}

/// Shared-rows overload for repeated runs over one fixture.
inline EvalResult eval(const Analysis& analysis,
                       std::shared_ptr<const std::vector<Datum>> rows,
                       double budget_cap, std::uint64_t seed) {
  return detail::eval_impl(analysis, std::move(rows), budget_cap, true, false,
                           seed);
}

/// Reference evaluator: same routing and statistics, zero noise, no budget
/// gate. Used as the exact-answer oracle in validation runs.
inline EvalResult eval_noiseless(const Analysis& analysis,
                                 std::vector<Datum> rows) {
  auto shared = std::make_shared<const std::vector<Datum>>(std::move(rows));
  return detail::eval_impl(analysis, shared, 0.0, /*gate=*/false,
                           /*noiseless=*/true, 0);
}

inline EvalResult eval_noiseless(
    const Analysis& analysis,
    std::shared_ptr<const std::vector<Datum>> rows) {
  return detail::eval_impl(analysis, std::move(rows), 0.0, false, true, 0);
}

}  // namespace dpplan
