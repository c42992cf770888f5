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
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dpplan/core.hpp"
#include "dpplan/datum.hpp"

namespace dpplan {

// ---------------------------------------------------------------------------
// Datasets
// ---------------------------------------------------------------------------

/// Metadata-only view of a sensitive table: stability factor, provenance
/// region, and (during concrete execution only) the materialized rows. There
/// is deliberately no row-inspection accessor; analyst code can route a
/// handle into transformations and aggregations but never look inside.
class DatasetHandle {
 public:
  DatasetHandle() = default;

  int stability() const { return stability_; }
  RegionId region() const { return region_; }

  /// Root handle the engine hands to a top-level analysis: stability 1,
  /// root region. Rows present only when the executor supplies them.
  static DatasetHandle root(
      std::shared_ptr<const std::vector<Datum>> rows = nullptr) {
    DatasetHandle d;
    d.stability_ = 1;
    d.region_ = kRootRegion;
    d.rows_ = std::move(rows);
    return d;
  }

 private:
  int stability_ = 1;
  RegionId region_ = kRootRegion;
  std::shared_ptr<const std::vector<Datum>> rows_;

  friend class detail::Walker;
};

// ---------------------------------------------------------------------------
// Plan values
// ---------------------------------------------------------------------------

class PlanValue;

/// Ordered key -> noisy value mapping produced by a partition.
using KeyedResultMap = std::map<Datum, NoisyValue>;

/// Result of interpreting a plan: a plain datum, a dataset view, a noisy
/// value, a keyed result map, or a tuple of such results.
class PlanValue {
 public:
  using Tuple = std::vector<PlanValue>;

  PlanValue() : v_(std::monostate{}) {}
  PlanValue(Datum d) : v_(std::move(d)) {}
  PlanValue(DatasetHandle d) : v_(std::move(d)) {}
  PlanValue(NoisyValue v) : v_(std::move(v)) {}
  PlanValue(KeyedResultMap m) : v_(std::move(m)) {}
  PlanValue(Tuple t) : v_(std::make_shared<const Tuple>(std::move(t))) {}

  bool is_unit() const { return std::holds_alternative<std::monostate>(v_); }
  bool is_datum() const { return std::holds_alternative<Datum>(v_); }
  bool is_dataset() const { return std::holds_alternative<DatasetHandle>(v_); }
  bool is_value() const { return std::holds_alternative<NoisyValue>(v_); }
  bool is_map() const { return std::holds_alternative<KeyedResultMap>(v_); }
  bool is_tuple() const {
    return std::holds_alternative<std::shared_ptr<const Tuple>>(v_);
  }

  const Datum& datum() const { return get<Datum>("datum"); }
  const DatasetHandle& dataset() const {
    return get<DatasetHandle>("dataset");
  }
  const NoisyValue& value() const { return get<NoisyValue>("noisy value"); }
  const KeyedResultMap& map() const {
    return get<KeyedResultMap>("keyed result map");
  }
  const Tuple& tuple() const {
    if (!is_tuple()) throw ContractError("plan result is not a tuple");
    return *std::get<std::shared_ptr<const Tuple>>(v_);
  }

 private:
  template <typename T>
  const T& get(const char* what) const {
    const T* p = std::get_if<T>(&v_);
    if (!p) throw ContractError(std::string("plan result is not a ") + what);
    return *p;
  }

  std::variant<std::monostate, Datum, DatasetHandle, NoisyValue,
               KeyedResultMap, std::shared_ptr<const Tuple>>
      v_;
};

/// Convenience views used inside plan continuations.
inline const DatasetHandle& as_dataset(const PlanValue& v) {
  return v.dataset();
}
inline const NoisyValue& as_value(const PlanValue& v) { return v.value(); }
inline const KeyedResultMap& as_map(const PlanValue& v) { return v.map(); }
inline std::vector<NoisyValue> map_values(const KeyedResultMap& m) {
  std::vector<NoisyValue> out;
  out.reserve(m.size());
  for (const auto& [k, v] : m) out.push_back(v);
  return out;
}

// ---------------------------------------------------------------------------
// Plan nodes
// ---------------------------------------------------------------------------

class Plan;

using RowPredicate = std::function<bool(const Datum&)>;
using RowMapper = std::function<Datum(const Datum&)>;
using RowToReal = std::function<double(const Datum&)>;
using Continuation = std::function<Plan(const PlanValue&)>;
using BranchFn = std::function<Plan(const DatasetHandle&)>;

namespace node {

struct Pure {
  PlanValue value;
};
struct Bind {
  std::shared_ptr<const Plan> first;
  Continuation cont;
};
struct Where {
  RowPredicate pred;
  DatasetHandle source;
};
struct Select {
  RowMapper fn;
  DatasetHandle source;
};
struct GroupBy {
  RowMapper key;
  DatasetHandle source;
};
struct Intersect {
  DatasetHandle left, right;
};
struct UnionData {
  DatasetHandle left, right;
};
struct Part {
  RowMapper key;
  DatasetHandle source;
  std::map<Datum, BranchFn> branches;
};
struct Count {
  Epsilon eps;
  DatasetHandle source;
};
struct Sum {
  Epsilon eps;
  RowToReal clip;
  DatasetHandle source;
};
struct Avg {
  Epsilon eps;
  RowToReal clip;
  DatasetHandle source;
};
struct NoisyMax {
  Epsilon eps;
  RowToReal score;
  DatasetHandle source;
};

using Variant =
    std::variant<Pure, Bind, Where, Select, GroupBy, Intersect, UnionData,
                 Part, Count, Sum, Avg, NoisyMax>;

}  // namespace node

/// Immutable, shareable description of a data analysis. Interpreters walk
/// the tree; continuations are pure and re-invocable, so one plan can be
/// interpreted for budget, for accuracy, and for concrete execution without
/// interference. Plans never branch on noisy results by construction.
class Plan {
 public:
  explicit Plan(node::Variant n)
      : node_(std::make_shared<const node::Variant>(std::move(n))) {}

  const node::Variant& node() const { return *node_; }

 private:
  std::shared_ptr<const node::Variant> node_;
};

/// A reusable analysis: a pure function from the (engine-provided) root
/// dataset to a plan.
using Analysis = std::function<Plan(const DatasetHandle&)>;

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

/// Plan that yields a fixed value with no side effects and zero budget.
inline Plan pure(PlanValue v) { return Plan(node::Pure{std::move(v)}); }

/// Sequencing: run p, feed its result to f, run the plan f returns.
inline Plan bind(Plan p, Continuation f) {
  return Plan(node::Bind{std::make_shared<const Plan>(std::move(p)),
                         std::move(f)});
}

/// Keep the rows satisfying pred. Stability and region are preserved.
inline Plan where(RowPredicate pred, const DatasetHandle& d) {
  return Plan(node::Where{std::move(pred), d});
}

/// Map every row through fn. Stability and region are preserved.
inline Plan select(RowMapper fn, const DatasetHandle& d) {
  return Plan(node::Select{std::move(fn), d});
}

/// Group rows by key; yields one (key, rows) row per distinct key and
/// doubles the stability.
inline Plan group_by(RowMapper key, const DatasetHandle& d) {
  return Plan(node::GroupBy{std::move(key), d});
}

namespace detail {
inline void require_same_region(const DatasetHandle& a, const DatasetHandle& b,
                                const char* who) {
  if (!(a.region() == b.region()))
    throw PartitionSafetyError(who, b.region().id, a.region().id);
}
inline void require_aggregation_eps(const Epsilon& eps, const char* who) {
  if (!(eps.value() > 0.0))
    throw PlanConstructionError(std::string(who) +
                                ": epsilon must be strictly positive");
}
}  // namespace detail

/// Multiset intersection; stabilities add. Both operands must live in the
/// same provenance region.
inline Plan intersect(const DatasetHandle& a, const DatasetHandle& b) {
  detail::require_same_region(a, b, "intersect");
  return Plan(node::Intersect{a, b});
}

/// Multiset union (concatenation); stabilities add. Same-region rule as
/// intersect.
inline Plan union_rows(const DatasetHandle& a, const DatasetHandle& b) {
  detail::require_same_region(a, b, "union");
  return Plan(node::UnionData{a, b});
}

/// Partition d by key and run the per-key branch query on each partition.
/// Branches receive a handle tagged with a fresh region; rows whose key is
/// absent from the branch map are dropped. Budget-wise a partition costs the
/// maximum over its branches.
inline Plan partition(RowMapper key, const DatasetHandle& d,
                      std::map<Datum, BranchFn> branches) {
  return Plan(node::Part{std::move(key), d, std::move(branches)});
}

/// partition with the same branch query at every key.
inline Plan partition_repeat(BranchFn q, const std::vector<Datum>& keys,
                             RowMapper key_of, const DatasetHandle& d) {
  std::map<Datum, BranchFn> branches;
  for (const Datum& k : keys) branches.emplace(k, q);
  return partition(std::move(key_of), d, std::move(branches));
}

/// Noisy row count; sensitivity 1, Laplace scale s * 1 / eps.
inline Plan count(Epsilon eps, const DatasetHandle& d) {
  detail::require_aggregation_eps(eps, "count");
  return Plan(node::Count{eps, d});
}

/// Noisy sum of clip(row), with clip outputs clamped to [-1,1];
/// sensitivity 1.
inline Plan sum(Epsilon eps, RowToReal clip, const DatasetHandle& d) {
  detail::require_aggregation_eps(eps, "sum");
  return Plan(node::Sum{eps, std::move(clip), d});
}

/// Noisy average of clip(row), clamped to [-1,1]; sensitivity 2.
inline Plan avg(Epsilon eps, RowToReal clip, const DatasetHandle& d) {
  detail::require_aggregation_eps(eps, "avg");
  return Plan(node::Avg{eps, std::move(clip), d});
}

/// Index of the row with the highest noisy score. Requires stability exactly
/// 1; the returned value is tainted and carries an unbounded error estimate.
inline Plan noisy_max(Epsilon eps, RowToReal score, const DatasetHandle& d) {
  detail::require_aggregation_eps(eps, "noisy_max");
  if (d.stability() != 1)
    throw PlanConstructionError(
        "noisy_max requires a dataset of stability 1, got stability " +
        std::to_string(d.stability()));
  return Plan(node::NoisyMax{eps, std::move(score), d});
}

/// Run plans left to right and collect their results into a tuple.
inline Plan sequence(std::vector<Plan> plans) {
  struct Fold {
    std::vector<Plan> plans;
    Plan run(const std::shared_ptr<const Fold>& self, std::size_t i,
             PlanValue::Tuple acc) const {
      if (i == plans.size()) return pure(PlanValue(std::move(acc)));
      return bind(plans[i],
                  [self, i, acc = std::move(acc)](const PlanValue& v) {
                    PlanValue::Tuple next = acc;
                    next.push_back(v);
                    return self->run(self, i + 1, std::move(next));
                  });
    }
  };
  auto fold = std::make_shared<Fold>(Fold{std::move(plans)});
  return fold->run(fold, 0, {});
}

}  // namespace dpplan
