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

#include <algorithm>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "dpplan/bounds.hpp"
#include "dpplan/core.hpp"
#include "dpplan/plan.hpp"
#include "dpplan/rng.hpp"

namespace dpplan {

/// One line of a budget breakdown: where in the plan the contribution sits
/// and how large it is. Partition entries carry the max over their branches.
struct BudgetEntry {
  std::string path;
  double eps;
  bool is_partition = false;
};

/// Hard-coded global sensitivities of the aggregation kinds (sum and avg
/// apply clipping to [-1,1] first).
inline const SensitivityDelta kCountSensitivity{1.0};
inline const SensitivityDelta kSumSensitivity{1.0};
inline const SensitivityDelta kAvgSensitivity{2.0};
inline const SensitivityDelta kNoisyMaxSensitivity{1.0};

namespace detail {

/// Shared recursive interpreter behind budget(), accuracy() and eval().
/// The walk itself (sequencing, stability propagation, partition handling,
/// region-based partition safety) is identical across the three
/// interpretations; only what happens at aggregation nodes differs:
///   budget    - accumulate epsilon, thread field-free placeholder values
///   accuracy  - mint fresh labels and Laplace iCDFs, no data access
///   execute   - compute the exact statistic on rows and add Laplace noise
class Walker {
 public:
  enum class Mode { kBudget, kAccuracy, kExecute };

  Walker(Mode mode, bool noiseless, std::uint64_t seed)
      : mode_(mode), noiseless_(noiseless), rng_(seed) {
    region_parent_ = {-1};  // region 0 is the root
  }

  PlanValue run(const Plan& p) { return walk(p); }

  double total_epsilon() const { return eps_total_.value(); }
  const std::vector<BudgetEntry>& breakdown() const { return breakdown_; }
  int labels_assigned() const { return next_label_; }

 private:
  // ---- region tree ----

  int fresh_region(int parent) {
    region_parent_.push_back(parent);
    return static_cast<int>(region_parent_.size()) - 1;
  }

  bool region_within(int r, int scope) const {
    while (r >= 0 && r < static_cast<int>(region_parent_.size())) {
      if (r == scope) return true;
      r = region_parent_[r];
    }
    return false;
  }

  void check_region(const DatasetHandle& d, const char* what) {
    if (!region_within(d.region().id, current_region_))
      throw PartitionSafetyError(path_string(what), d.region().id,
                                 current_region_);
  }

  std::string path_string(const char* leaf) const {
    std::string out;
    for (const std::string& seg : path_) {
      out += "/";
      out += seg;
    }
    out += "/";
    out += leaf;
    return out;
  }

  // ---- dataset plumbing ----

  static const std::vector<Datum>& rows_of(const DatasetHandle& d) {
    if (!d.rows_)
      throw ContractError(
          "executor reached a dataset without materialized rows");
    return *d.rows_;
  }

  DatasetHandle derived(const DatasetHandle& src, int stability,
                        std::shared_ptr<const std::vector<Datum>> rows) const {
    DatasetHandle d;
    d.stability_ = stability;
    d.region_ = src.region();
    d.rows_ = std::move(rows);
    return d;
  }

  DatasetHandle branch_handle(const DatasetHandle& src, int region,
                              std::shared_ptr<const std::vector<Datum>> rows)
      const {
    DatasetHandle d;
    d.stability_ = src.stability();
    d.region_ = RegionId{region};
    d.rows_ = std::move(rows);
    return d;
  }

  bool executing() const { return mode_ == Mode::kExecute; }

  // ---- aggregation helper ----

  NoisyValue aggregation_result(const char* kind, const DatasetHandle& src,
                                double eps, const SensitivityDelta& sens,
                                double exact_stat) {
    if (mode_ == Mode::kBudget) {
      eps_total_.add(eps);
      breakdown_.push_back(
          {path_string((std::string(kind) + "#" +
                        std::to_string(aggregation_ordinal_++))
                           .c_str()),
           eps, false});
      return NoisyValue();  // all fields absent
    }
    const double b = src.stability() * sens.value() / eps;
    LabelId label = next_label_++;
    NoisyValue v = NoisyValueAccess::make(laplace_icdf(b), b, {label});
    if (executing()) {
      double noise = noiseless_ ? 0.0 : sample_laplace(b, rng_);
      NoisyValueAccess::set_scalar(v, exact_stat + noise);
    }
    return v;
  }

  // ---- the walk ----

  PlanValue walk(const Plan& p) {
    const node::Variant& n = p.node();

    if (const auto* x = std::get_if<node::Pure>(&n)) return x->value;

    if (const auto* x = std::get_if<node::Bind>(&n)) {
      PlanValue v = walk(*x->first);
      return walk(x->cont(v));
    }

    if (const auto* x = std::get_if<node::Where>(&n)) {
      check_region(x->source, "where");
      std::shared_ptr<const std::vector<Datum>> rows;
      if (executing()) {
        auto out = std::make_shared<std::vector<Datum>>();
        for (const Datum& r : rows_of(x->source))
          if (x->pred(r)) out->push_back(r);
        rows = std::move(out);
      }
      return PlanValue(derived(x->source, x->source.stability(), rows));
    }

    if (const auto* x = std::get_if<node::Select>(&n)) {
      check_region(x->source, "select");
      std::shared_ptr<const std::vector<Datum>> rows;
      if (executing()) {
        auto out = std::make_shared<std::vector<Datum>>();
        out->reserve(rows_of(x->source).size());
        for (const Datum& r : rows_of(x->source)) out->push_back(x->fn(r));
        rows = std::move(out);
      }
      return PlanValue(derived(x->source, x->source.stability(), rows));
    }

    if (const auto* x = std::get_if<node::GroupBy>(&n)) {
      check_region(x->source, "group_by");
      std::shared_ptr<const std::vector<Datum>> rows;
      if (executing()) {
        // One output row per distinct key, keys in first-occurrence order.
        std::vector<std::pair<Datum, Datum::List>> groups;
        std::map<Datum, std::size_t> index;
        for (const Datum& r : rows_of(x->source)) {
          Datum k = x->key(r);
          auto [it, inserted] = index.emplace(k, groups.size());
          if (inserted) groups.push_back({k, {}});
          groups[it->second].second.push_back(r);
        }
        auto out = std::make_shared<std::vector<Datum>>();
        out->reserve(groups.size());
        for (auto& [k, members] : groups)
          out->push_back(Datum(Datum::List{k, Datum(std::move(members))}));
        rows = std::move(out);
      }
      return PlanValue(derived(x->source, 2 * x->source.stability(), rows));
    }

    if (const auto* x = std::get_if<node::Intersect>(&n)) {
      check_region(x->left, "intersect");
      check_region(x->right, "intersect");
      std::shared_ptr<const std::vector<Datum>> rows;
      if (executing()) {
        std::map<Datum, int> budgeted;
        for (const Datum& r : rows_of(x->right)) budgeted[r]++;
        auto out = std::make_shared<std::vector<Datum>>();
        for (const Datum& r : rows_of(x->left)) {
          auto it = budgeted.find(r);
          if (it != budgeted.end() && it->second > 0) {
            out->push_back(r);
            it->second--;
          }
        }
        rows = std::move(out);
      }
      return PlanValue(derived(
          x->left, x->left.stability() + x->right.stability(), rows));
    }

    if (const auto* x = std::get_if<node::UnionData>(&n)) {
      check_region(x->left, "union");
      check_region(x->right, "union");
      std::shared_ptr<const std::vector<Datum>> rows;
      if (executing()) {
        auto out = std::make_shared<std::vector<Datum>>(rows_of(x->left));
        const std::vector<Datum>& rhs = rows_of(x->right);
        out->insert(out->end(), rhs.begin(), rhs.end());
        rows = std::move(out);
      }
      return PlanValue(derived(
          x->left, x->left.stability() + x->right.stability(), rows));
    }

    if (const auto* x = std::get_if<node::Part>(&n)) return walk_part(*x);

    if (const auto* x = std::get_if<node::Count>(&n)) {
      check_region(x->source, "count");
      double stat = executing()
                        ? static_cast<double>(rows_of(x->source).size())
                        : 0.0;
      return PlanValue(aggregation_result(
          "count", x->source, x->eps.value(), kCountSensitivity, stat));
    }

    if (const auto* x = std::get_if<node::Sum>(&n)) {
      check_region(x->source, "sum");
      double stat = 0.0;
      if (executing())
        for (const Datum& r : rows_of(x->source))
          stat += std::clamp(x->clip(r), -1.0, 1.0);
      return PlanValue(aggregation_result(
          "sum", x->source, x->eps.value(), kSumSensitivity, stat));
    }

    if (const auto* x = std::get_if<node::Avg>(&n)) {
      check_region(x->source, "avg");
      double stat = 0.0;
      if (executing()) {
        const std::vector<Datum>& rows = rows_of(x->source);
        for (const Datum& r : rows) stat += std::clamp(x->clip(r), -1.0, 1.0);
        if (!rows.empty()) stat /= static_cast<double>(rows.size());
      }
      return PlanValue(aggregation_result(
          "avg", x->source, x->eps.value(), kAvgSensitivity, stat));
    }

    if (const auto* x = std::get_if<node::NoisyMax>(&n)) {
      check_region(x->source, "noisy_max");
      if (mode_ == Mode::kBudget) {
        eps_total_.add(x->eps.value());
        breakdown_.push_back(
            {path_string(("noisy_max#" +
                          std::to_string(aggregation_ordinal_++))
                             .c_str()),
             x->eps.value(), false});
        return PlanValue(NoisyValue());
      }
      LabelId label = next_label_++;
      NoisyValue v = NoisyValueAccess::make(
          ICdf([](double, TraceSink*) {
            return std::numeric_limits<double>::infinity();
          }),
          std::nullopt, {label});
      if (executing()) {
        const std::vector<Datum>& rows = rows_of(x->source);
        const double b = kNoisyMaxSensitivity.value() / x->eps.value();
        std::int64_t best = -1;  // no rows, no index
        double best_score = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < rows.size(); ++i) {
          double s = x->score(rows[i]) +
                     (noiseless_ ? 0.0 : sample_laplace(b, rng_));
          if (s > best_score) {
            best_score = s;
            best = static_cast<std::int64_t>(i);
          }
        }
        NoisyValueAccess::set_scalar(v, static_cast<double>(best));
      }
      return PlanValue(v);
    }

    throw ContractError("unknown plan node");
  }

  PlanValue walk_part(const node::Part& part) {
    check_region(part.source, "part");

    // Route rows once; branches with no matching rows still run on the
    // empty partition, and rows whose key is unmapped are dropped.
    std::map<Datum, std::shared_ptr<std::vector<Datum>>> buckets;
    if (executing()) {
      for (const auto& [k, q] : part.branches)
        buckets[k] = std::make_shared<std::vector<Datum>>();
      for (const Datum& r : rows_of(part.source)) {
        auto it = buckets.find(part.key(r));
        if (it != buckets.end()) it->second->push_back(r);
      }
    }

    const double saved = eps_total_.value();
    double max_branch = 0.0;
    const int parent_region = current_region_;

    KeyedResultMap results;
    std::size_t index = 0;
    for (const auto& [key, branch] : part.branches) {
      int region = fresh_region(parent_region);
      std::shared_ptr<const std::vector<Datum>> rows;
      if (executing()) rows = buckets[key];
      DatasetHandle slice = branch_handle(part.source, region, rows);

      path_.push_back("part[" + key.to_string() + "]");
      current_region_ = region;
      RngState saved_rng = rng_;
      if (executing()) rng_ = saved_rng.split(index);
      if (mode_ == Mode::kBudget) eps_total_.reset(0.0);

      PlanValue out = walk(branch(slice));

      if (mode_ == Mode::kBudget) {
        max_branch = std::max(max_branch, eps_total_.value());
      }
      if (executing()) rng_ = saved_rng;  // saved_rng already advanced by split
      current_region_ = parent_region;
      path_.pop_back();

      if (!out.is_value())
        throw ContractError("partition branch must yield a noisy value");
      results.emplace(key, out.value());
      ++index;
    }

    if (mode_ == Mode::kBudget) {
      eps_total_.reset(saved);
      eps_total_.add(max_branch);
      breakdown_.push_back({path_string("part"), max_branch, true});
    }
    return PlanValue(std::move(results));
  }

  Mode mode_;
  bool noiseless_;
  RngState rng_;
  KahanSum eps_total_;
  std::vector<BudgetEntry> breakdown_;
  int next_label_ = 0;
  int aggregation_ordinal_ = 0;
  std::vector<int> region_parent_;
  int current_region_ = 0;
  std::vector<std::string> path_;
};

}  // namespace detail
}  // namespace dpplan
