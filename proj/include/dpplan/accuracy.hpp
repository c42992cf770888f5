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

#include <utility>
#include <vector>

#include "dpplan/interpret.hpp"

namespace dpplan {

/// Result of the static accuracy analysis: the error bound alpha holding
/// with probability at least 1 - beta, plus a trace of which bound won at
/// every combinator node evaluated along the way.
struct AccuracyReport {
  Alpha alpha;
  Beta beta;
  std::vector<BoundChoice> trace;
};

/// Symbolically interpret a plan for accuracy: aggregations yield fresh
/// labelled values with their Laplace iCDFs, partitions run every branch,
/// combinators run their real error algebra on the symbolic values. Never
/// reads rows, never samples.
inline PlanValue interpret_accuracy(const Plan& p) {
  detail::Walker w(detail::Walker::Mode::kAccuracy, /*noiseless=*/true, 0);
  return w.run(p);
}

inline PlanValue interpret_accuracy(const Analysis& a) {
  return interpret_accuracy(a(DatasetHandle::root()));
}

/// Static (beta -> alpha) accuracy of a plan yielding a noisy value.
inline AccuracyReport accuracy(const Plan& p, Beta beta) {
  PlanValue root = interpret_accuracy(p);
  const NoisyValue& v = root.value();
  TraceSink sink;
  double a = v.icdf().eval(beta.value(), &sink);
  if (sink.entries.empty() && v.scale().has_value())
    sink.entries.push_back(
        {BoundKind::kLaplaceDirect, 1, {*v.scale()}, beta.value(), a});
  return AccuracyReport{Alpha(a), beta, std::move(sink.entries)};
}

inline AccuracyReport accuracy(const Analysis& a, Beta beta) {
  return accuracy(a(DatasetHandle::root()), beta);
}

}  // namespace dpplan
