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
#include <cmath>
#include <numeric>
#include <optional>
#include <set>
#include <vector>

#include "dpplan/core.hpp"

namespace dpplan {

// ---------------------------------------------------------------------------
// Elementary iCDFs
// ---------------------------------------------------------------------------

/// iCDF of a Laplace(0, scale) noise term: beta -> ln(1/beta) * scale.
inline ICdf laplace_icdf(double scale) {
  if (!(scale > 0.0)) throw ContractError("laplace_icdf: scale must be > 0");
  return ICdf([scale](double beta, TraceSink*) {
    return std::log(1.0 / beta) * scale;
  });
}

/// Union-bound composition of n >= 2 iCDFs: beta -> sum_j icdf_j(beta / n).
/// Makes no independence assumption.
inline ICdf union_bound(std::vector<ICdf> parts) {
  if (parts.size() < 2)
    throw ContractError("union_bound needs at least two operands");
  return ICdf([parts = std::move(parts)](double beta, TraceSink* sink) {
    const double split = beta / static_cast<double>(parts.size());
    double total = 0.0;
    for (const ICdf& f : parts) total += f.eval(split, sink);
    return total;
  });
}

/// Chernoff-style bound for the sum of n >= 2 independent Laplace(0, b_j)
/// terms:
///   nu    = max( sqrt(sum_j b_j^2), b_max * sqrt(ln(2/beta)) )
///   alpha = (nu + 0.00001) * sqrt(8 * ln(2/beta))
/// The additive 0.00001 keeps the first factor strictly above nu.
inline ICdf chernoff_bound(std::vector<double> scales) {
  if (scales.size() < 2)
    throw ContractError("chernoff_bound needs at least two operands");
  for (double b : scales)
    if (!(b > 0.0)) throw ContractError("chernoff_bound: scales must be > 0");
  double sum_sq = 0.0;
  double b_max = 0.0;
  for (double b : scales) {
    sum_sq += b * b;
    b_max = std::max(b_max, b);
  }
  const double root_sum_sq = std::sqrt(sum_sq);
  return ICdf([root_sum_sq, b_max](double beta, TraceSink*) {
    const double log_term = std::log(2.0 / beta);
    const double nu = std::max(root_sum_sq, b_max * std::sqrt(log_term));
    return (nu + 0.00001) * std::sqrt(8.0 * log_term);
  });
}

// ---------------------------------------------------------------------------
// Value combinators
// ---------------------------------------------------------------------------

namespace detail {

inline bool any_symbolic(const std::vector<NoisyValue>& vs) {
  for (const NoisyValue& v : vs)
    if (v.symbolic()) return true;
  return false;
}

inline void reject_vector_operands(const std::vector<NoisyValue>& vs,
                                   const char* who) {
  for (const NoisyValue& v : vs)
    if (v.is_vector())
      throw ContractError(std::string(who) +
                          ": operands must be scalar values");
}

/// All operands untainted and their label sets pairwise disjoint: the values
/// were drawn from distinct independent noise sources.
inline bool chernoff_eligible(const std::vector<NoisyValue>& vs) {
  std::size_t total = 0;
  for (const NoisyValue& v : vs) {
    if (v.tainted()) return false;
    total += v.labels().size();
  }
  std::vector<LabelId> all;
  all.reserve(total);
  for (const NoisyValue& v : vs)
    all.insert(all.end(), v.labels().begin(), v.labels().end());
  std::sort(all.begin(), all.end());
  return std::adjacent_find(all.begin(), all.end()) == all.end();
}

inline std::vector<LabelId> union_of_labels(const std::vector<NoisyValue>& vs) {
  std::vector<LabelId> out;
  for (const NoisyValue& v : vs) out = merge_labels(out, v.labels());
  return out;
}

inline std::vector<double> concrete_scalars(const std::vector<NoisyValue>& vs) {
  std::vector<double> out;
  out.reserve(vs.size());
  for (const NoisyValue& v : vs) {
    const auto& c = NoisyValueAccess::scalar(v);
    if (!c) return {};
    out.push_back(*c);
  }
  return out;
}

}  // namespace detail

/// Sum of noisy values. The result is tainted; its iCDF is the pointwise
/// minimum of the Chernoff and union bounds when every operand is untainted
/// with pairwise-disjoint labels, and the union bound otherwise. A singleton
/// list is returned unchanged; an empty list is an error.
inline NoisyValue add(const std::vector<NoisyValue>& values) {
  if (values.empty()) throw ContractError("add: nothing to add");
  if (values.size() == 1) return values.front();
  detail::reject_vector_operands(values, "add");
  if (detail::any_symbolic(values)) return NoisyValue();

  std::vector<ICdf> icdfs;
  icdfs.reserve(values.size());
  for (const NoisyValue& v : values) icdfs.push_back(v.icdf());
  ICdf union_icdf = union_bound(std::move(icdfs));

  const std::size_t n = values.size();
  ICdf combined = [&]() -> ICdf {
    if (detail::chernoff_eligible(values)) {
      std::vector<double> scales;
      scales.reserve(n);
      for (const NoisyValue& v : values) scales.push_back(*v.scale());
      ICdf chernoff_icdf = chernoff_bound(scales);
      return ICdf([union_icdf, chernoff_icdf, scales,
                   n](double beta, TraceSink* sink) {
        const double u = union_icdf.eval(beta, sink);
        const double c = chernoff_icdf.eval(beta, sink);
        const double a = std::min(u, c);
        if (sink)
          sink->entries.push_back(
              {c < u ? BoundKind::kChernoff : BoundKind::kUnion, n, scales,
               beta, a});
        return a;
      });
    }
    return ICdf([union_icdf, n](double beta, TraceSink* sink) {
      const double a = union_icdf.eval(beta, sink);
      if (sink)
        sink->entries.push_back({BoundKind::kUnion, n, {}, beta, a});
      return a;
    });
  }();

  NoisyValue out = detail::NoisyValueAccess::make(
      std::move(combined), std::nullopt, detail::union_of_labels(values));
  std::vector<double> xs = detail::concrete_scalars(values);
  if (!xs.empty())
    detail::NoisyValueAccess::set_scalar(
        out, std::accumulate(xs.begin(), xs.end(), 0.0));
  return out;
}

/// Negation. Laplace noise is symmetric about zero, so the error bound and
/// the independence witness carry over unchanged.
inline NoisyValue neg(const NoisyValue& v) {
  if (v.symbolic()) return v;
  if (v.is_vector()) throw ContractError("neg: operand must be scalar");
  NoisyValue out =
      detail::NoisyValueAccess::make(v.icdf(), v.scale(), v.labels());
  const auto& c = detail::NoisyValueAccess::scalar(v);
  if (c) detail::NoisyValueAccess::set_scalar(out, -*c);
  return out;
}

namespace detail {

template <typename Fold>
NoisyValue norm_impl(const std::vector<NoisyValue>& values, NormKind kind,
                     const char* who, Fold fold) {
  if (values.empty()) throw ContractError(std::string(who) + ": empty input");
  reject_vector_operands(values, who);
  if (any_symbolic(values)) return NoisyValue();

  std::vector<ICdf> icdfs;
  icdfs.reserve(values.size());
  for (const NoisyValue& v : values) icdfs.push_back(v.icdf());
  const std::size_t n = values.size();

  ICdf combined([icdfs = std::move(icdfs), fold, n](double beta,
                                                    TraceSink* sink) {
    const double split = beta / static_cast<double>(n);
    std::vector<double> alphas;
    alphas.reserve(n);
    for (const ICdf& f : icdfs) alphas.push_back(f.eval(split, sink));
    const double a = fold(alphas);
    if (sink)
      sink->entries.push_back({BoundKind::kNormCombination, n, {}, beta, a});
    return a;
  });

  NoisyValue out = NoisyValueAccess::make(std::move(combined), std::nullopt,
                                          union_of_labels(values), kind);
  std::vector<double> xs = concrete_scalars(values);
  if (xs.size() == values.size() && !xs.empty())
    NoisyValueAccess::set_vector(out, std::move(xs));
  return out;
}

}  // namespace detail

/// l-infinity aggregation of per-entry error bounds:
/// beta -> max_j icdf_j(beta / n).
inline NoisyValue norm_inf(const std::vector<NoisyValue>& values) {
  return detail::norm_impl(values, NormKind::kInf, "norm_inf",
                           [](const std::vector<double>& a) {
                             return *std::max_element(a.begin(), a.end());
                           });
}

/// l1 aggregation: beta -> sum_j icdf_j(beta / n).
inline NoisyValue norm_1(const std::vector<NoisyValue>& values) {
  return detail::norm_impl(values, NormKind::kOne,
                           "norm_1", [](const std::vector<double>& a) {
                             return std::accumulate(a.begin(), a.end(), 0.0);
                           });
}

/// l2 aggregation: beta -> sqrt(sum_j icdf_j(beta / n)^2).
inline NoisyValue norm_2(const std::vector<NoisyValue>& values) {
  return detail::norm_impl(values, NormKind::kTwo, "norm_2",
                           [](const std::vector<double>& a) {
                             double s = 0.0;
                             for (double x : a) s += x * x;
                             return std::sqrt(s);
                           });
}

/// Root-mean-square aggregation: beta -> sqrt(mean_j icdf_j(beta / n)^2).
inline NoisyValue rmsd(const std::vector<NoisyValue>& values) {
  return detail::norm_impl(values, NormKind::kRmsd, "rmsd",
                           [](const std::vector<double>& a) {
                             double s = 0.0;
                             for (double x : a) s += x * x;
                             return std::sqrt(s / static_cast<double>(a.size()));
                           });
}

}  // namespace dpplan
