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

#include <functional>
#include <vector>

#include "dpplan/accuracy.hpp"

namespace dpplan {

/// Brute-force search parameters: probe epsilon = min_eps, min_eps + delta,
/// ... up to bud_total (with a final probe exactly at bud_total when the
/// grid overshoots it), stopping at the first epsilon whose error meets
/// error_tol.
struct OptimizerInput {
  double bud_total;
  double min_eps;
  double delta;
  Beta beta;
  double error_tol;
  int iter = 1000;

  void validate() const {
    if (!(min_eps > 0.0)) throw ContractError("optimizer: min_eps must be > 0");
    if (!(delta > 0.0)) throw ContractError("optimizer: delta must be > 0");
    if (iter < 1) throw ContractError("optimizer: iter must be >= 1");
    if (!(bud_total >= min_eps))
      throw ContractError("optimizer: bud_total must be >= min_eps");
  }
};

enum class OptimizerStatus { kSuccess, kMaxIteration, kMaxBudget };

inline const char* to_string(OptimizerStatus s) {
  switch (s) {
    case OptimizerStatus::kSuccess: return "ok";
    case OptimizerStatus::kMaxIteration: return "MaxIter";
    case OptimizerStatus::kMaxBudget: return "MaxBud";
  }
  return "?";
}

struct OptimizerOutcome {
  OptimizerStatus status;
  double epsilon;
  double alpha;
};

/// Default probe grid; reproduces the published budgeting table.
inline constexpr double kOptimizerMinEps = 0.01;
inline constexpr double kOptimizerDelta = 0.05;
inline constexpr int kOptimizerIter = 1000;

/// Smallest grid epsilon whose static error meets the tolerance. Purely
/// static: only the accuracy analyzer runs, never the executor.
inline OptimizerOutcome iterate_error(
    const std::function<Plan(double)>& prog, const OptimizerInput& input) {
  input.validate();
  double eps = input.min_eps;
  int remaining = input.iter;
  int k = 0;  // probes sit at min_eps + k*delta to keep the grid drift-free
  for (;;) {
    double err = accuracy(prog(eps), input.beta).alpha.value();
    if (!(err > input.error_tol))
      return {OptimizerStatus::kSuccess, eps, err};
    if (remaining <= 0) return {OptimizerStatus::kMaxIteration, eps, err};
    --remaining;
    double next = input.min_eps + (++k) * input.delta;
    if (next <= input.bud_total) {
      eps = next;
    } else if (eps < input.bud_total) {
      eps = input.bud_total;
    } else {
      return {OptimizerStatus::kMaxBudget, eps, err};
    }
  }
}

/// Split the total budget uniformly across the analyses and search each one
/// against its own tolerance.
inline std::vector<OptimizerOutcome> choose_eps(
    const std::vector<std::function<Plan(double)>>& analyses,
    OptimizerInput input, const std::vector<double>& tolerances) {
  if (analyses.size() != tolerances.size())
    throw ContractError("choose_eps: one tolerance per analysis required");
  std::vector<OptimizerOutcome> out;
  if (analyses.empty()) return out;
  input.bud_total /= static_cast<double>(analyses.size());
  out.reserve(analyses.size());
  for (std::size_t i = 0; i < analyses.size(); ++i) {
    OptimizerInput local = input;
    local.error_tol = tolerances[i];
    out.push_back(iterate_error(analyses[i], local));
  }
  return out;
}

}  // namespace dpplan
