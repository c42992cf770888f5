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
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dpplan {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid parameter or out-of-domain argument (e.g. beta outside (0,1)).
struct DomainError : Error {
  using Error::Error;
};

/// Violated API contract (empty operand list, length mismatch, ...).
struct ContractError : Error {
  using Error::Error;
};

/// A plan was constructed in a way the engine rejects outright
/// (e.g. noisy-max over a dataset whose stability is not 1).
struct PlanConstructionError : Error {
  using Error::Error;
};

/// A partition branch touched data that does not belong to its own slice.
struct PartitionSafetyError : Error {
  PartitionSafetyError(std::string path, int offending, int expected)
      : Error("partition safety violation at " + path + ": dataset region " +
              std::to_string(offending) + " is not derived from branch region " +
              std::to_string(expected)),
        node_path(std::move(path)),
        offending_region(offending),
        expected_region(expected) {}
  std::string node_path;
  int offending_region;
  int expected_region;
};

/// Static budget of a plan exceeds the cap handed to the executor.
struct BudgetExceededError : Error {
  BudgetExceededError(double required_, double cap_)
      : Error("privacy budget exceeded: plan requires epsilon = " +
              std::to_string(required_) + " but cap is " +
              std::to_string(cap_)),
        required(required_),
        cap(cap_) {}
  double required;
  double cap;
};

// ---------------------------------------------------------------------------
// Numeric domain types
// ---------------------------------------------------------------------------

/// Privacy-loss amount. Non-negative; aggregations additionally require a
/// strictly positive value at plan construction.
class Epsilon {
 public:
  Epsilon(double v) : v_(v) {
    if (!(v >= 0.0) || std::isnan(v))
      throw DomainError("epsilon must be non-negative, got " +
                        std::to_string(v));
  }
  double value() const { return v_; }

 private:
  double v_;
};

/// Failure probability, strictly inside (0,1).
class Beta {
 public:
  Beta(double v) : v_(v) {
    if (!(v > 0.0 && v < 1.0))
      throw DomainError("beta must lie in (0,1), got " + std::to_string(v));
  }
  double value() const { return v_; }

 private:
  double v_;
};

/// Error magnitude in query-output units. Non-negative; +infinity marks
/// values the analysis gives no bound for (e.g. a noisy-max index).
class Alpha {
 public:
  Alpha(double v) : v_(v) {
    if (std::isnan(v) || v < 0.0)
      throw DomainError("alpha must be non-negative, got " +
                        std::to_string(v));
  }
  double value() const { return v_; }
  bool is_infinite() const { return std::isinf(v_); }
  static Alpha infinity() {
    return Alpha(std::numeric_limits<double>::infinity());
  }

 private:
  double v_;
};

/// Row-difference multiplier accumulated by transformations.
class StabilityFactor {
 public:
  StabilityFactor(int v) : v_(v) {
    if (v < 1)
      throw DomainError("stability must be >= 1, got " + std::to_string(v));
  }
  int value() const { return v_; }

 private:
  int v_;
};

/// Provenance region tag; partition branches get fresh regions.
struct RegionId {
  int id = 0;
  friend bool operator==(RegionId a, RegionId b) { return a.id == b.id; }
};

inline constexpr RegionId kRootRegion{0};

/// Noise-source identity, unique per aggregation node within one
/// interpretation run.
using LabelId = int;

/// Global sensitivity of an aggregation, fixed per aggregation kind.
class SensitivityDelta {
 public:
  SensitivityDelta(double v) : v_(v) {
    if (!(v > 0.0)) throw DomainError("sensitivity must be positive");
  }
  double value() const { return v_; }

 private:
  double v_;
};

// ---------------------------------------------------------------------------
// iCDF
// ---------------------------------------------------------------------------

/// Which bound produced an error estimate at some combinator node.
enum class BoundKind {
  kUnion,
  kChernoff,
  kLaplaceDirect,
  kNormCombination,
};

inline const char* to_string(BoundKind k) {
  switch (k) {
    case BoundKind::kUnion: return "union";
    case BoundKind::kChernoff: return "chernoff";
    case BoundKind::kLaplaceDirect: return "laplace";
    case BoundKind::kNormCombination: return "norm";
  }
  return "?";
}

struct BoundChoice {
  BoundKind kind;
  std::size_t operand_count = 1;
  // Laplace scales of the operands; populated only when the node was
  // Chernoff-eligible.
  std::vector<double> operand_scales;
  double beta = 0.0;   // effective beta the node was evaluated at
  double alpha = 0.0;  // resulting error bound
};

/// Collects BoundChoice entries while an iCDF tree is being evaluated.
struct TraceSink {
  std::vector<BoundChoice> entries;
};

/// A monotone non-increasing map beta in (0,1) -> alpha >= 0. Represented as
/// a closed-over function; the closure optionally reports which bound won
/// through a TraceSink.
class ICdf {
 public:
  using Fn = std::function<double(double beta, TraceSink* sink)>;

  explicit ICdf(Fn fn) : fn_(std::make_shared<Fn>(std::move(fn))) {}

  /// Evaluate at beta, validating the domain.
  Alpha operator()(Beta beta) const { return Alpha(eval(beta.value())); }

  /// Raw evaluation; beta must already be inside (0,1).
  double eval(double beta, TraceSink* sink = nullptr) const {
    return (*fn_)(beta, sink);
  }

 private:
  std::shared_ptr<const Fn> fn_;
};

/// Evaluate an iCDF at beta. Deterministic; throws DomainError when beta is
/// outside (0,1).
inline Alpha icdf_eval(const ICdf& icdf, Beta beta) { return icdf(beta); }

// ---------------------------------------------------------------------------
// NoisyValue
// ---------------------------------------------------------------------------

/// Error metric a vector-valued result was aggregated under; drives how the
/// Monte-Carlo validator measures the observed error.
enum class NormKind { kScalar, kInf, kOne, kTwo, kRmsd };

namespace detail {
class Walker;
struct NoisyValueAccess;
}  // namespace detail

/// Carrier of an aggregation result: an iCDF bounding the noise, an optional
/// Laplace scale acting as independence witness (present iff the value is
/// untainted), and the set of noise-source labels it depends on. The concrete
/// numeric content, when present, is reachable only through the executor's
/// result helpers: plans cannot branch on it.
///
/// A default-constructed NoisyValue is the placeholder the budget interpreter
/// threads through continuations; all fields are absent.
class NoisyValue {
 public:
  NoisyValue() = default;

  /// True for the budget interpreter's field-free placeholder.
  bool symbolic() const { return !icdf_.has_value(); }

  const ICdf& icdf() const {
    if (!icdf_)
      throw ContractError(
          "attempt to read the iCDF of a symbolic value (budget "
          "interpretation never populates it)");
    return *icdf_;
  }

  /// Laplace scale; present iff the value is untainted.
  std::optional<double> scale() const { return scale_; }
  bool tainted() const { return !scale_.has_value(); }

  /// Sorted, deduplicated noise-source labels.
  const std::vector<LabelId>& labels() const { return labels_; }

  bool is_vector() const { return norm_ != NormKind::kScalar; }
  NormKind norm_kind() const { return norm_; }

  bool has_concrete() const { return concrete_scalar_.has_value() ||
                                     concrete_vector_.has_value(); }

 private:
  std::optional<ICdf> icdf_;
  std::optional<double> scale_;
  std::vector<LabelId> labels_;
  NormKind norm_ = NormKind::kScalar;
  std::optional<double> concrete_scalar_;
  std::optional<std::vector<double>> concrete_vector_;

  friend class detail::Walker;
  friend struct detail::NoisyValueAccess;
};

namespace detail {

/// Engine-internal construction and concrete access for NoisyValue. Deliberately
/// not part of the analyst-facing surface.
struct NoisyValueAccess {
  static NoisyValue make(std::optional<ICdf> icdf, std::optional<double> scale,
                         std::vector<LabelId> labels,
                         NormKind norm = NormKind::kScalar) {
    NoisyValue v;
    v.icdf_ = std::move(icdf);
    v.scale_ = scale;
    v.labels_ = std::move(labels);
    v.norm_ = norm;
    return v;
  }
  static void set_scalar(NoisyValue& v, double x) { v.concrete_scalar_ = x; }
  static void set_vector(NoisyValue& v, std::vector<double> x) {
    v.concrete_vector_ = std::move(x);
  }
  static const std::optional<double>& scalar(const NoisyValue& v) {
    return v.concrete_scalar_;
  }
  static const std::optional<std::vector<double>>& vector(
      const NoisyValue& v) {
    return v.concrete_vector_;
  }
};

/// Compensated (Neumaier) summation; keeps exact transcript budgets such as
/// ten times eps/10 summing back to eps.
class KahanSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }
  void reset(double v = 0.0) {
    sum_ = v;
    comp_ = 0.0;
  }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Sorted-set union of label lists.
inline std::vector<LabelId> merge_labels(const std::vector<LabelId>& a,
                                         const std::vector<LabelId>& b) {
  std::vector<LabelId> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i] < b[j])) {
      if (out.empty() || out.back() != a[i]) out.push_back(a[i]);
      ++i;
    } else {
      if (out.empty() || out.back() != b[j]) out.push_back(b[j]);
      ++j;
    }
  }
  return out;
}

}  // namespace detail
}  // namespace dpplan
