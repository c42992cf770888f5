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
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dpplan/accuracy.hpp"
#include "dpplan/bounds.hpp"
#include "dpplan/budget.hpp"
#include "dpplan/csv.hpp"
#include "dpplan/eval.hpp"
#include "dpplan/plan.hpp"

namespace dpplan::workloads {

// ---------------------------------------------------------------------------
// Network-packet table (CDF analyses)
// ---------------------------------------------------------------------------

inline Schema packet_schema() {
  return Schema{{{"id", ColumnType::kInteger},
                 {"timestamp", ColumnType::kInteger},
                 {"src", ColumnType::kText},
                 {"dest", ColumnType::kText},
                 {"protocol", ColumnType::kText},
                 {"length", ColumnType::kInteger},
                 {"payload", ColumnType::kText}}};
}

inline constexpr int kPacketLengthCol = 5;
inline constexpr int kPacketProtocolCol = 4;
inline constexpr std::int64_t kMaxPacketLength = 1500;

inline RowMapper packet_length() {
  return [](const Datum& row) { return row.as_list()[kPacketLengthCol]; };
}

inline RowMapper packet_protocol() {
  return [](const Datum& row) { return row.as_list()[kPacketProtocolCol]; };
}

/// n equally spaced upper bin bounds over (0, kMaxPacketLength].
inline std::vector<std::int64_t> default_bins(int n) {
  if (n < 1) throw ContractError("need at least one bin");
  std::vector<std::int64_t> bins;
  bins.reserve(n);
  for (int i = 1; i <= n; ++i) bins.push_back(kMaxPacketLength * i / n);
  return bins;
}

namespace detail {

inline void require_ascending_bins(const std::vector<std::int64_t>& bins) {
  if (bins.empty()) throw ContractError("bin list must be non-empty");
  for (std::size_t i = 1; i < bins.size(); ++i)
    if (bins[i] <= bins[i - 1])
      throw ContractError("bin list must be strictly ascending");
}

/// Smallest bin >= len; precondition len <= bins.back().
inline Datum assign_bin(const std::vector<std::int64_t>& bins,
                        std::int64_t len) {
  for (std::int64_t b : bins)
    if (len <= b) return Datum(b);
  return Datum(bins.back());
}

}  // namespace detail

/// Sequential CDF: one filtered noisy count per bin, each at eps/|bins|,
/// combined under the l-infinity norm.
inline Analysis cdf_sequential(std::vector<std::int64_t> bins, double eps,
                               bool naive_budget = false) {
  detail::require_ascending_bins(bins);
  const double local = naive_budget ? eps : eps / static_cast<double>(bins.size());
  return [bins = std::move(bins), local](const DatasetHandle& data) {
    return bind(select(packet_length(), data), [bins, local](
                                                   const PlanValue& v) {
      const DatasetHandle& sizes = as_dataset(v);
      std::vector<Plan> per_bin;
      per_bin.reserve(bins.size());
      for (std::int64_t bin : bins) {
        Plan filtered = where(
            [bin](const Datum& len) { return len.as_int() <= bin; }, sizes);
        per_bin.push_back(bind(filtered, [local](const PlanValue& w) {
          return count(local, as_dataset(w));
        }));
      }
      return bind(sequence(std::move(per_bin)), [](const PlanValue& t) {
        std::vector<NoisyValue> counts;
        counts.reserve(t.tuple().size());
        for (const PlanValue& pv : t.tuple()) counts.push_back(as_value(pv));
        return pure(PlanValue(norm_inf(counts)));
      });
    });
  };
}

/// Parallel CDF: histogram via partition (full eps per disjoint branch),
/// cumulative sums built with add over prefixes, l-infinity combined.
inline Analysis cdf_parallel(std::vector<std::int64_t> bins, double eps) {
  detail::require_ascending_bins(bins);
  return [bins = std::move(bins), eps](const DatasetHandle& data) {
    const std::int64_t max_bin = bins.back();
    Plan sizes_plan = select(packet_length(), data);
    return bind(sizes_plan, [bins, eps, max_bin](const PlanValue& v) {
      Plan kept = where(
          [max_bin](const Datum& len) { return len.as_int() <= max_bin; },
          as_dataset(v));
      return bind(kept, [bins, eps](const PlanValue& w) {
        std::vector<Datum> keys(bins.begin(), bins.end());
        Plan parts = partition_repeat(
            [eps](const DatasetHandle& slice) { return count(eps, slice); },
            keys,
            [bins](const Datum& len) {
              return detail::assign_bin(bins, len.as_int());
            },
            as_dataset(w));
        return bind(parts, [](const PlanValue& pv) {
          std::vector<NoisyValue> counts = map_values(as_map(pv));
          std::vector<NoisyValue> cumulative;
          cumulative.reserve(counts.size());
          for (std::size_t i = 1; i <= counts.size(); ++i)
            cumulative.push_back(add(std::vector<NoisyValue>(
                counts.begin(), counts.begin() + i)));
          return pure(PlanValue(norm_inf(cumulative)));
        });
      });
    });
  };
}

// ---------------------------------------------------------------------------
// Demographic table (hierarchical histograms)
// ---------------------------------------------------------------------------

inline Schema demographic_schema() {
  return Schema{{{"gender", ColumnType::kText},
                 {"age", ColumnType::kInteger},
                 {"nationality", ColumnType::kText}}};
}

inline const std::vector<std::string>& genders() {
  static const std::vector<std::string> v = {"female", "male"};
  return v;
}

inline constexpr int kAgeGroups = 8;
inline constexpr std::int64_t kMinAge = 17;
inline constexpr std::int64_t kAgeGroupWidth = 9;

inline std::int64_t age_group(std::int64_t age) {
  std::int64_t g = (age - kMinAge) / kAgeGroupWidth;
  return std::clamp<std::int64_t>(g, 0, kAgeGroups - 1);
}

inline const std::vector<std::string>& nationalities() {
  static const std::vector<std::string> v = {
      "argentina", "australia", "austria",  "belgium",   "brazil",
      "canada",    "chile",     "china",    "colombia",  "cuba",
      "denmark",   "ecuador",   "egypt",    "finland",   "france",
      "germany",   "greece",    "hungary",  "india",     "iran",
      "ireland",   "italy",     "jamaica",  "japan",     "mexico",
      "nicaragua", "norway",    "peru",     "poland",    "portugal",
      "scotland",  "spain",     "sweden",   "taiwan",    "thailand",
      "turkey",    "ukraine",   "vietnam",  "yugoslavia"};
  return v;
}

inline Datum gender_of(const Datum& row) { return row.as_list()[0]; }
inline Datum gender_age_of(const Datum& row) {
  const Datum::List& f = row.as_list();
  return Datum(Datum::List{f[0], Datum(age_group(f[1].as_int()))});
}
inline Datum gender_age_nat_of(const Datum& row) {
  const Datum::List& f = row.as_list();
  return Datum(Datum::List{f[0], Datum(age_group(f[1].as_int())), f[2]});
}

inline std::vector<Datum> gender_keys() {
  std::vector<Datum> out;
  for (const std::string& g : genders()) out.push_back(Datum(g));
  return out;
}
inline std::vector<Datum> gender_age_keys() {
  std::vector<Datum> out;
  for (const std::string& g : genders())
    for (std::int64_t a = 0; a < kAgeGroups; ++a)
      out.push_back(Datum(Datum::List{Datum(g), Datum(a)}));
  return out;
}
inline std::vector<Datum> gender_age_nat_keys() {
  std::vector<Datum> out;
  for (const std::string& g : genders())
    for (std::int64_t a = 0; a < kAgeGroups; ++a)
      for (const std::string& n : nationalities())
        out.push_back(Datum(Datum::List{Datum(g), Datum(a), Datum(n)}));
  return out;
}

namespace detail {

/// Histogram over a fixed key domain, reported through norm_inf so the
/// analysis yields one (vector) noisy value.
inline Analysis keyed_histogram(std::vector<Datum> keys, RowMapper key_of,
                                double eps) {
  return [keys = std::move(keys), key_of = std::move(key_of),
          eps](const DatasetHandle& data) {
    Plan parts = partition_repeat(
        [eps](const DatasetHandle& slice) { return count(eps, slice); }, keys,
        key_of, data);
    return bind(parts, [](const PlanValue& pv) {
      return pure(PlanValue(norm_inf(map_values(as_map(pv)))));
    });
  };
}

}  // namespace detail

/// Gender histogram (2 cells) at the given per-level epsilon.
inline Analysis hist_by_gender(double eps) {
  return detail::keyed_histogram(gender_keys(), gender_of,
                                 eps);
}

/// Gender x age-group histogram (16 cells).
inline Analysis hist_by_gender_age(double eps) {
  return detail::keyed_histogram(gender_age_keys(),
                                 gender_age_of, eps);
}

/// Gender x age-group x nationality histogram (624 cells).
inline Analysis hist_by_gender_age_nat(double eps) {
  return detail::keyed_histogram(gender_age_nat_keys(),
                                 gender_age_nat_of, eps);
}

/// Three independent histograms, one per level, each with its own budget.
/// Total budget is e1 + e2 + e3. Yields a tuple of three keyed maps, most
/// detailed last.
inline Analysis hierarchical_split(double e1, double e2, double e3) {
  return [e1, e2, e3](const DatasetHandle& data) {
    Plan level1 = partition_repeat(
        [e1](const DatasetHandle& s) { return count(e1, s); },
        gender_keys(), gender_of, data);
    Plan level2 = partition_repeat(
        [e2](const DatasetHandle& s) { return count(e2, s); },
        gender_age_keys(), gender_age_of, data);
    Plan level3 = partition_repeat(
        [e3](const DatasetHandle& s) { return count(e3, s); },
        gender_age_nat_keys(), gender_age_nat_of, data);
    return bind(level1, [level2, level3](const PlanValue& h1) {
      return bind(level2, [h1, level3](const PlanValue& h2) {
        return bind(level3, [h1, h2](const PlanValue& h3) {
          return pure(PlanValue(PlanValue::Tuple{h1, h2, h3}));
        });
      });
    });
  };
}

namespace detail {

/// Coarser histograms derived from the most detailed one by adding cells.
inline KeyedResultMap derive_level2(const KeyedResultMap& level3) {
  KeyedResultMap out;
  for (const Datum& key : gender_age_keys()) {
    std::vector<NoisyValue> cells;
    cells.reserve(nationalities().size());
    const Datum::List& ga = key.as_list();
    for (const std::string& n : nationalities()) {
      Datum full(Datum::List{ga[0], ga[1], Datum(n)});
      cells.push_back(level3.at(full));
    }
    out.emplace(key, add(cells));
  }
  return out;
}

inline KeyedResultMap derive_level1(const KeyedResultMap& level3) {
  KeyedResultMap out;
  for (const Datum& key : gender_keys()) {
    std::vector<NoisyValue> cells;
    cells.reserve(kAgeGroups * nationalities().size());
    for (std::int64_t a = 0; a < kAgeGroups; ++a)
      for (const std::string& n : nationalities())
        cells.push_back(
            level3.at(Datum(Datum::List{key, Datum(a), Datum(n)})));
    out.emplace(key, add(cells));
  }
  return out;
}

}  // namespace detail

/// Spend the whole budget on the most detailed histogram and derive the
/// coarser levels by adding its cells; budget is just eps. Yields a tuple of
/// three keyed maps, most detailed last.
inline Analysis hierarchical_bottom_up(double eps) {
  return [eps](const DatasetHandle& data) {
    Plan level3 = partition_repeat(
        [eps](const DatasetHandle& s) { return count(eps, s); },
        gender_age_nat_keys(), gender_age_nat_of, data);
    return bind(level3, [](const PlanValue& pv) {
      const KeyedResultMap& h3 = as_map(pv);
      KeyedResultMap h2 = detail::derive_level2(h3);
      KeyedResultMap h1 = detail::derive_level1(h3);
      return pure(PlanValue(PlanValue::Tuple{PlanValue(std::move(h1)),
                                             PlanValue(std::move(h2)),
                                             PlanValue(h3)}));
    });
  };
}

/// Accuracy surface for one level of the bottom-up histogram: norm_inf over
/// that level's (possibly derived) cells. level is 1, 2 or 3.
inline Analysis hierarchical_bottom_up_level(int level, double eps) {
  if (level < 1 || level > 3)
    throw ContractError("hierarchical level must be 1, 2 or 3");
  Analysis full = hierarchical_bottom_up(eps);
  return [full, level](const DatasetHandle& data) {
    return bind(full(data), [level](const PlanValue& pv) {
      const KeyedResultMap& m = pv.tuple()[level - 1].map();
      return pure(PlanValue(norm_inf(map_values(m))));
    });
  };
}

// ---------------------------------------------------------------------------
// Partition-safety demonstration pair
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& protocols() {
  static const std::vector<std::string> v = {"icmp", "tcp", "udp"};
  return v;
}

inline std::vector<Datum> protocol_keys() {
  std::vector<Datum> out;
  for (const std::string& p : protocols()) out.push_back(Datum(p));
  return out;
}

/// Per-protocol packet histogram; each branch counts its own partition.
inline Analysis protocol_histogram_good(double eps) {
  return [eps](const DatasetHandle& data) {
    Plan parts = partition_repeat(
        [eps](const DatasetHandle& slice) { return count(eps, slice); },
        protocol_keys(), packet_protocol(), data);
    return bind(parts, [](const PlanValue& pv) {
      return pure(PlanValue(norm_inf(map_values(as_map(pv)))));
    });
  };
}

/// Broken variant: every branch counts the captured outer dataset instead of
/// its own slice. The partition-safety check rejects this plan.
inline Analysis protocol_histogram_bad(double eps) {
  return [eps](const DatasetHandle& data) {
    Plan parts = partition_repeat(
        [eps, data](const DatasetHandle&) { return count(eps, data); },
        protocol_keys(), packet_protocol(), data);
    return bind(parts, [](const PlanValue& pv) {
      return pure(PlanValue(norm_inf(map_values(as_map(pv)))));
    });
  };
}

// ---------------------------------------------------------------------------
// Range-query workloads and strategies
// ---------------------------------------------------------------------------

enum class StrategyKind { kIdentity, kHierarchical, kWavelet };

inline const char* to_string(StrategyKind k) {
  switch (k) {
    case StrategyKind::kIdentity: return "identity";
    case StrategyKind::kHierarchical: return "hierarchical";
    case StrategyKind::kWavelet: return "wavelet";
  }
  return "?";
}

/// Query strategy as a row matrix with entries in {-1, 0, 1} over n unit
/// ranges.
struct StrategyMatrix {
  StrategyKind kind;
  int n;
  std::vector<std::vector<int>> rows;
};

namespace detail {
inline bool power_of_two(int n) { return n >= 1 && (n & (n - 1)) == 0; }
}  // namespace detail

/// Identity I_n, binary-hierarchy H_n (2n-1 rows) or Haar-wavelet Y_n
/// (n rows); H and Y require n to be a power of two.
inline StrategyMatrix build_strategy(StrategyKind kind, int n) {
  if (n < 1) throw ContractError("strategy domain must be non-empty");
  StrategyMatrix m{kind, n, {}};
  switch (kind) {
    case StrategyKind::kIdentity: {
      for (int i = 0; i < n; ++i) {
        std::vector<int> row(n, 0);
        row[i] = 1;
        m.rows.push_back(std::move(row));
      }
      break;
    }
    case StrategyKind::kHierarchical: {
      if (!detail::power_of_two(n))
        throw ContractError("hierarchical strategy needs a power-of-two domain");
      for (int block = n; block >= 1; block /= 2)
        for (int start = 0; start < n; start += block) {
          std::vector<int> row(n, 0);
          for (int i = start; i < start + block; ++i) row[i] = 1;
          m.rows.push_back(std::move(row));
        }
      break;
    }
    case StrategyKind::kWavelet: {
      if (!detail::power_of_two(n))
        throw ContractError("wavelet strategy needs a power-of-two domain");
      m.rows.push_back(std::vector<int>(n, 1));
      for (int block = n; block >= 2; block /= 2)
        for (int start = 0; start < n; start += block) {
          std::vector<int> row(n, 0);
          for (int i = start; i < start + block / 2; ++i) row[i] = 1;
          for (int i = start + block / 2; i < start + block; ++i) row[i] = -1;
          m.rows.push_back(std::move(row));
        }
      break;
    }
  }
  return m;
}

/// One answered range query: bounds are 1-based inclusive.
struct RangeAnswer {
  int lo;
  int hi;
  double alpha;
  std::optional<double> value;
};

struct RangeWorkloadReport {
  StrategyKind kind;
  int n;
  double eps;
  double beta;
  std::vector<RangeAnswer> answers;  // ordered by (lo, hi)
};

namespace detail {

/// Aligned dyadic blocks exactly covering [lo, hi] (0-based, inclusive).
inline void dyadic_cover(int lo, int hi, int start, int len,
                         std::vector<std::pair<int, int>>& out) {
  if (hi < start || lo > start + len - 1) return;
  if (lo <= start && start + len - 1 <= hi) {
    out.push_back({start, len});
    return;
  }
  dyadic_cover(lo, hi, start, len / 2, out);
  dyadic_cover(lo, hi, start + len / 2, len / 2, out);
}

/// Constituent unit counts involved in answering [lo, hi] (0-based,
/// inclusive) with the given strategy; false sign means the unit enters
/// negated. The combination is exact for identity and hierarchical; for
/// wavelet it lists the units of every Haar row with a nonzero
/// reconstruction coefficient, which is the query set the strategy touches.
inline std::vector<std::pair<int, bool>> constituents(
    const StrategyMatrix& strat, int lo, int hi) {
  std::vector<std::pair<int, bool>> out;
  switch (strat.kind) {
    case StrategyKind::kIdentity: {
      for (int i = lo; i <= hi; ++i) out.push_back({i, true});
      break;
    }
    case StrategyKind::kHierarchical: {
      std::vector<std::pair<int, int>> blocks;
      dyadic_cover(lo, hi, 0, strat.n, blocks);
      for (auto [start, len] : blocks)
        for (int i = start; i < start + len; ++i) out.push_back({i, true});
      break;
    }
    case StrategyKind::kWavelet: {
      for (const std::vector<int>& row : strat.rows) {
        int nnz = 0;
        long dot = 0;
        for (int i = 0; i < strat.n; ++i) {
          if (row[i] != 0) ++nnz;
          if (i >= lo && i <= hi) dot += row[i];
        }
        if (dot == 0) continue;  // reconstruction coefficient is zero
        const bool positive = dot > 0;
        for (int i = 0; i < strat.n; ++i)
          if (row[i] != 0)
            out.push_back({i, (row[i] > 0) == positive});
      }
      break;
    }
  }
  return out;
}

}  // namespace detail

/// Unit-range assignment for packet rows: lengths spread over n equal bins.
inline RowMapper packet_unit_of(int n) {
  return [n](const Datum& row) {
    std::int64_t len = row.as_list()[kPacketLengthCol].as_int();
    std::int64_t unit = 1 + (len - 1) * n / kMaxPacketLength;
    return Datum(std::clamp<std::int64_t>(unit, 1, n));
  };
}

/// Answer the full workload of contiguous range queries with a strategy:
/// partition into n unit counts at eps (budget = eps), keep each strategy
/// row as its list of constituent noisy unit counts, and answer every range
/// by add over the involved constituents, letting add pick the tighter of
/// the union and Chernoff bounds. beta is split uniformly over the
/// n(n+1)/2 queries. With rows absent the answers carry error bounds only.
inline RangeWorkloadReport answer_range_workload(
    const StrategyMatrix& strat, double eps, Beta beta,
    std::shared_ptr<const std::vector<Datum>> rows = nullptr,
    std::uint64_t seed = 0) {
  const int n = strat.n;
  std::vector<Datum> keys;
  keys.reserve(n);
  for (int i = 1; i <= n; ++i) keys.push_back(Datum(std::int64_t{i}));

  Analysis units_analysis = [&](const DatasetHandle& data) {
    return partition_repeat(
        [eps](const DatasetHandle& slice) { return count(eps, slice); }, keys,
        packet_unit_of(n), data);
  };

  PlanValue unit_map =
      rows ? eval(units_analysis, rows, eps, seed).root
           : interpret_accuracy(units_analysis(DatasetHandle::root()));

  std::vector<NoisyValue> units = map_values(unit_map.map());

  RangeWorkloadReport report{strat.kind, n, eps, beta.value(), {}};
  const double query_count = static_cast<double>(n) * (n + 1) / 2.0;
  const double split_beta = beta.value() / query_count;

  for (int lo = 0; lo < n; ++lo) {
    for (int hi = lo; hi < n; ++hi) {
      std::vector<std::pair<int, bool>> parts =
          detail::constituents(strat, lo, hi);
      std::vector<NoisyValue> ops;
      ops.reserve(parts.size());
      for (auto [i, positive] : parts)
        ops.push_back(positive ? units[i] : neg(units[i]));
      NoisyValue ans = add(ops);
      RangeAnswer ra{lo + 1, hi + 1, ans.icdf().eval(split_beta),
                     std::nullopt};
      if (rows) ra.value = result_scalar(ans);
      report.answers.push_back(std::move(ra));
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Union-vs-Chernoff comparison data
// ---------------------------------------------------------------------------

struct BoundComparisonRow {
  int n;
  double union_alpha;
  double chernoff_alpha;
};

/// Evaluate both composition bounds for the sum of n equal-scale Laplace
/// values, n = 2..n_max; plot-ready.
inline std::vector<BoundComparisonRow> compare_bounds_table(double scale,
                                                            Beta beta,
                                                            int n_max) {
  if (n_max < 2) throw ContractError("compare_bounds_table: need n_max >= 2");
  std::vector<BoundComparisonRow> out;
  out.reserve(n_max - 1);
  for (int n = 2; n <= n_max; ++n) {
    std::vector<ICdf> parts(n, laplace_icdf(scale));
    double u = union_bound(parts).eval(beta.value());
    double c = chernoff_bound(std::vector<double>(n, scale)).eval(beta.value());
    out.push_back({n, u, c});
  }
  return out;
}

}  // namespace dpplan::workloads
