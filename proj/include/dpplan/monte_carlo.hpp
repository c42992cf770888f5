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

#include <cmath>
#include <memory>
#include <utility>
#include <vector>

#include "dpplan/accuracy.hpp"
#include "dpplan/eval.hpp"

namespace dpplan {

/// Distance between an executed result and the exact answer, measured in
/// the norm the plan itself declared (abs for scalars).
inline double observed_error(const NoisyValue& got, const NoisyValue& truth) {
  if (!got.is_vector())
    return std::abs(result_scalar(got) - result_scalar(truth));
  const std::vector<double>& g = result_vector(got);
  const std::vector<double>& t = result_vector(truth);
  if (g.size() != t.size())
    throw ContractError("observed_error: result arity mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double d = std::abs(g[i] - t[i]);
    switch (got.norm_kind()) {
      case NormKind::kInf: acc = std::max(acc, d); break;
      case NormKind::kOne: acc += d; break;
      case NormKind::kTwo:
      case NormKind::kRmsd: acc += d * d; break;
      case NormKind::kScalar: break;
    }
  }
  switch (got.norm_kind()) {
    case NormKind::kTwo: return std::sqrt(acc);
    case NormKind::kRmsd: return std::sqrt(acc / static_cast<double>(g.size()));
    default: return acc;
  }
}

struct SimulationResult {
  double alpha;            // static bound the trials are compared against
  double beta;
  std::vector<double> observed;  // one error per trial
  int exceed_count = 0;
  double exceed_fraction = 0.0;
};

/// Derive a per-trial seed from a master seed; distinct trials get
/// independent streams.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial) {
  RngState s(master);
  RngState child = s.split(trial);
  return child.next_u64();
}

/// Run the executor `trials` times and report the fraction of runs whose
/// observed error (in the plan's declared norm, against the noiseless
/// reference answer) exceeds the static bound accuracy(plan, beta). For a
/// sound analysis this stays at or below beta up to binomial fluctuation.
inline SimulationResult empirical_icdf_check(
    const Analysis& analysis,
    std::shared_ptr<const std::vector<Datum>> rows, Beta beta, int trials,
    std::uint64_t seed) {
  if (trials < 1) throw ContractError("empirical_icdf_check: trials >= 1");

  SimulationResult out;
  out.beta = beta.value();
  out.alpha = accuracy(analysis, beta).alpha.value();

  EvalResult truth = eval_noiseless(analysis, rows);
  const NoisyValue& exact = truth.root.value();

  const double cap = budget(analysis).total.value();
  out.observed.reserve(trials);
  for (int t = 0; t < trials; ++t) {
    EvalResult run = eval(analysis, rows, cap, derive_seed(seed, t));
    double err = observed_error(run.root.value(), exact);
    out.observed.push_back(err);
    if (err > out.alpha) ++out.exceed_count;
  }
  out.exceed_fraction =
      static_cast<double>(out.exceed_count) / static_cast<double>(trials);
  return out;
}

/// Binomial three-sigma envelope around beta for the exceed fraction.
inline double exceed_envelope(double beta, int trials) {
  return beta + 3.0 * std::sqrt(beta * (1.0 - beta) / trials);
}

}  // namespace dpplan
