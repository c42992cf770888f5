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

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dpplan/interpret.hpp"

namespace dpplan {

/// Output of the symbolic privacy interpretation: an upper bound on the
/// epsilon a plan will spend, with per-node contributions. Sequential
/// contributions sum; each partition contributes the maximum over its
/// branches.
struct BudgetReport {
  Epsilon total;
  std::vector<BudgetEntry> breakdown;
};

/// Reported when a partition branch touches data from outside its own slice.
struct SafetyViolation {
  std::string node_path;
  int offending_region;
  int expected_region;
  std::string message;
};

/// Statically compute an upper bound on the privacy budget of a plan. Walks
/// the tree feeding row-free handles and field-free values into
/// continuations; never touches rows, never samples.
inline BudgetReport budget(const Plan& p) {
  detail::Walker w(detail::Walker::Mode::kBudget, /*noiseless=*/true, 0);
  w.run(p);
  return BudgetReport{Epsilon(w.total_epsilon()), w.breakdown()};
}

/// budget() of an analysis applied to a fresh stability-1 root dataset.
inline BudgetReport budget(const Analysis& a) {
  return budget(a(DatasetHandle::root()));
}

/// Run the symbolic walk purely for its partition-safety (IFC) check.
/// Returns the first violation, or nullopt when the plan is safe.
inline std::optional<SafetyViolation> check_partition_safety(const Plan& p) {
  try {
    detail::Walker w(detail::Walker::Mode::kBudget, true, 0);
    w.run(p);
  } catch (const PartitionSafetyError& e) {
    return SafetyViolation{e.node_path, e.offending_region, e.expected_region,
                           e.what()};
  }
  return std::nullopt;
}

inline std::optional<SafetyViolation> check_partition_safety(
    const Analysis& a) {
  return check_partition_safety(a(DatasetHandle::root()));
}

}  // namespace dpplan
