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

#include <cmath>
#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dpplan/dpplan.hpp"

namespace {

using namespace dpplan;
namespace wl = dpplan::workloads;

// Exit codes: 0 ok, 2 usage / unknown workload, 3 budget refusal,
// 4 partition-safety violation, 5 CSV parse or I/O error.
constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kBudgetRefusal = 3;
constexpr int kSafety = 4;
constexpr int kParse = 5;

struct Params {
  int bins = 10;
  double eps = 1.0;
  double beta = 0.05;
  int n = 8;
  int trials = 300;
  std::uint64_t seed = 1;
  double cap = 1.0;
  bool exact = false;
  bool verbose = false;
  std::string out;
  std::string input;
  std::string tol;
  double scale = 1.0;
  int nmax = 100;
};

enum class TableKind { kNone, kPacket, kDemographic };

struct Workload {
  Analysis analysis;                 // empty for range workloads
  TableKind table = TableKind::kNone;
  bool scalar_result = false;        // supports accuracy/simulate
  std::vector<Datum> output_keys;    // labels for run output rows
  std::optional<wl::StrategyKind> strategy;  // set for range workloads
};

Workload make_workload(const std::string& name, const Params& p) {
  Workload w;
  auto bins = wl::default_bins(p.bins);
  if (name == "pure") {
    w.analysis = [](const DatasetHandle&) { return pure(PlanValue(Datum(7))); };
    w.scalar_result = false;
  } else if (name == "cdf1") {
    w.analysis = wl::cdf_sequential(bins, p.eps);
    w.table = TableKind::kPacket;
    w.scalar_result = true;
    w.output_keys.assign(bins.begin(), bins.end());
  } else if (name == "cdf1-naive") {
    w.analysis = wl::cdf_sequential(bins, p.eps, /*naive_budget=*/true);
    w.table = TableKind::kPacket;
    w.scalar_result = true;
    w.output_keys.assign(bins.begin(), bins.end());
  } else if (name == "cdf2") {
    w.analysis = wl::cdf_parallel(bins, p.eps);
    w.table = TableKind::kPacket;
    w.scalar_result = true;
    w.output_keys.assign(bins.begin(), bins.end());
  } else if (name == "hist-gen") {
    w.analysis = wl::hist_by_gender(p.eps);
    w.table = TableKind::kDemographic;
    w.scalar_result = true;
    w.output_keys = wl::gender_keys();
  } else if (name == "hist-gen-age") {
    w.analysis = wl::hist_by_gender_age(p.eps);
    w.table = TableKind::kDemographic;
    w.scalar_result = true;
    w.output_keys = wl::gender_age_keys();
  } else if (name == "hist-gen-age-nat") {
    w.analysis = wl::hist_by_gender_age_nat(p.eps);
    w.table = TableKind::kDemographic;
    w.scalar_result = true;
    w.output_keys = wl::gender_age_nat_keys();
  } else if (name == "hierarchical1") {
    w.analysis = wl::hierarchical_split(p.eps, p.eps, p.eps);
    w.table = TableKind::kDemographic;
  } else if (name == "hierarchical2") {
    w.analysis = wl::hierarchical_bottom_up(p.eps);
    w.table = TableKind::kDemographic;
  } else if (name == "hierarchical2-level1" || name == "hierarchical2-level2" ||
             name == "hierarchical2-level3") {
    int level = name.back() - '0';
    w.analysis = wl::hierarchical_bottom_up_level(level, p.eps);
    w.table = TableKind::kDemographic;
    w.scalar_result = true;
    w.output_keys = level == 1   ? wl::gender_keys()
                    : level == 2 ? wl::gender_age_keys()
                                 : wl::gender_age_nat_keys();
  } else if (name == "part-good") {
    w.analysis = wl::protocol_histogram_good(p.eps);
    w.table = TableKind::kPacket;
    w.scalar_result = true;
    w.output_keys = wl::protocol_keys();
  } else if (name == "part-bad") {
    w.analysis = wl::protocol_histogram_bad(p.eps);
    w.table = TableKind::kPacket;
    w.scalar_result = true;
    w.output_keys = wl::protocol_keys();
  } else if (name == "range-identity" || name == "range-h" ||
             name == "range-y") {
    w.table = TableKind::kPacket;
    w.strategy = name == "range-identity" ? wl::StrategyKind::kIdentity
                 : name == "range-h"      ? wl::StrategyKind::kHierarchical
                                          : wl::StrategyKind::kWavelet;
  } else {
    throw CLI::ValidationError("unknown workload '" + name + "'");
  }
  return w;
}

Schema table_schema(TableKind t) {
  if (t == TableKind::kPacket) return wl::packet_schema();
  return wl::demographic_schema();
}

std::shared_ptr<const std::vector<Datum>> load_rows(const Workload& w,
                                                    const std::string& path) {
  if (w.table == TableKind::kNone)
    return std::make_shared<const std::vector<Datum>>();
  return std::make_shared<const std::vector<Datum>>(
      load_csv(path, table_schema(w.table)));
}

std::vector<double> flatten_result(const PlanValue& root) {
  if (root.is_value()) {
    const NoisyValue& v = root.value();
    if (v.is_vector()) return result_vector(v);
    return {result_scalar(v)};
  }
  throw ContractError("workload result is not a noisy value");
}

int cmd_budget(const std::string& name, const Params& p) {
  Workload w = make_workload(name, p);
  BudgetReport report{Epsilon(0.0), {}};
  if (w.strategy) {
    wl::build_strategy(*w.strategy, p.n);  // validates the (strategy, n) pair
    // budget of the range plan: one partitioned count pass
    Analysis a = [&](const DatasetHandle& d) {
      std::vector<Datum> keys;
      for (int i = 1; i <= p.n; ++i) keys.push_back(Datum(std::int64_t{i}));
      return partition_repeat(
          [eps = p.eps](const DatasetHandle& s) { return count(eps, s); },
          keys, wl::packet_unit_of(p.n), d);
    };
    report = budget(a);
  } else {
    report = budget(w.analysis);
  }
  std::printf("epsilon = %s\n", format_double(report.total.value()).c_str());
  if (p.verbose)
    for (const BudgetEntry& e : report.breakdown)
      std::printf("  %s%s = %s\n", e.path.c_str(),
                  e.is_partition ? " (max over branches)" : "",
                  format_double(e.eps).c_str());
  return kOk;
}

int cmd_accuracy(const std::string& name, const Params& p) {
  Workload w = make_workload(name, p);
  if (w.strategy) {
    auto strat = wl::build_strategy(*w.strategy, p.n);
    auto report = wl::answer_range_workload(strat, p.eps, Beta(p.beta));
    double worst = 0.0;
    for (const auto& a : report.answers) worst = std::max(worst, a.alpha);
    if (p.exact)
      std::printf("alpha = %s\n", format_double(worst).c_str());
    else
      std::printf("alpha = %.0f\n", std::ceil(worst));
    if (!p.out.empty()) {
      std::vector<std::vector<std::string>> rows;
      for (const auto& a : report.answers)
        rows.push_back({std::to_string(a.lo), std::to_string(a.hi),
                        format_double(a.alpha)});
      write_csv(p.out, {"lo", "hi", "alpha"}, rows);
    }
    return kOk;
  }
  if (!w.scalar_result)
    throw CLI::ValidationError("workload '" + name +
                               "' has no single accuracy surface");
  AccuracyReport report = accuracy(w.analysis, Beta(p.beta));
  if (report.alpha.is_infinite())
    std::printf("alpha = inf\n");
  else if (p.exact)
    std::printf("alpha = %s\n", format_double(report.alpha.value()).c_str());
  else
    std::printf("alpha = %.0f\n", std::ceil(report.alpha.value()));
  if (p.verbose)
    for (const BoundChoice& c : report.trace)
      std::printf("  %s over %zu operand(s): alpha = %s at beta = %s\n",
                  to_string(c.kind), c.operand_count,
                  format_double(c.alpha).c_str(),
                  format_double(c.beta).c_str());
  return kOk;
}

int cmd_run(const std::string& name, const Params& p) {
  Workload w = make_workload(name, p);
  auto rows = load_rows(w, p.input);

  std::vector<std::vector<std::string>> out_rows;
  std::vector<std::string> header;

  if (w.strategy) {
    auto strat = wl::build_strategy(*w.strategy, p.n);
    auto report =
        wl::answer_range_workload(strat, p.eps, Beta(p.beta), rows, p.seed);
    header = {"lo", "hi", "value", "alpha"};
    for (const auto& a : report.answers)
      out_rows.push_back({std::to_string(a.lo), std::to_string(a.hi),
                          format_double(*a.value), format_double(a.alpha)});
  } else {
    EvalResult res = eval(w.analysis, rows, p.cap, p.seed);
    if (res.root.is_tuple()) {
      header = {"level", "key", "value"};
      int level = 1;
      for (const PlanValue& pv : res.root.tuple()) {
        for (const auto& [k, v] : pv.map())
          out_rows.push_back({std::to_string(level), k.to_string(),
                              format_double(result_scalar(v))});
        ++level;
      }
    } else if (res.root.is_datum()) {
      header = {"value"};
      out_rows.push_back({res.root.datum().to_string()});
    } else {
      header = {"key", "value"};
      std::vector<double> values = flatten_result(res.root);
      for (std::size_t i = 0; i < values.size(); ++i) {
        std::string key = i < w.output_keys.size()
                              ? w.output_keys[i].to_string()
                              : std::to_string(i);
        out_rows.push_back({key, format_double(values[i])});
      }
    }
  }

  if (p.out.empty())
    throw CLI::ValidationError("run requires --out <file>");
  write_csv(p.out, header, out_rows);
  std::printf("wrote %zu rows to %s\n", out_rows.size(), p.out.c_str());
  return kOk;
}

int cmd_simulate(const std::string& name, const Params& p) {
  Workload w = make_workload(name, p);
  if (!w.scalar_result)
    throw CLI::ValidationError("workload '" + name + "' cannot be simulated");
  auto rows = load_rows(w, p.input);
  SimulationResult sim =
      empirical_icdf_check(w.analysis, rows, Beta(p.beta), p.trials, p.seed);
  if (!p.out.empty()) {
    std::vector<std::vector<std::string>> out_rows;
    for (std::size_t i = 0; i < sim.observed.size(); ++i)
      out_rows.push_back(
          {std::to_string(i + 1), format_double(sim.observed[i])});
    write_csv(p.out, {"trial", "observed_error"}, out_rows);
  }
  std::printf(
      "alpha = %s at beta = %s; exceed_fraction = %s over %d trials\n",
      format_double(sim.alpha).c_str(), format_double(sim.beta).c_str(),
      format_double(sim.exceed_fraction).c_str(), p.trials);
  return kOk;
}

int cmd_compare_bounds(const Params& p) {
  auto table = wl::compare_bounds_table(p.scale, Beta(p.beta), p.nmax);
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : table)
    rows.push_back({std::to_string(r.n), format_double(r.union_alpha),
                    format_double(r.chernoff_alpha)});
  if (p.out.empty()) {
    std::printf("n,union_alpha,chernoff_alpha\n");
    for (const auto& r : rows)
      std::printf("%s,%s,%s\n", r[0].c_str(), r[1].c_str(), r[2].c_str());
  } else {
    write_csv(p.out, {"n", "union_alpha", "chernoff_alpha"}, rows);
    std::printf("wrote %zu rows to %s\n", rows.size(), p.out.c_str());
  }
  return kOk;
}

int cmd_optimize(const Params& p) {
  std::vector<double> tolerances;
  {
    std::string item;
    std::stringstream ss(p.tol);
    while (std::getline(ss, item, ','))
      tolerances.push_back(std::stod(item));
  }
  if (tolerances.size() != 3)
    throw CLI::ValidationError(
        "--tol needs three comma-separated tolerances (one per histogram)");

  std::vector<std::function<Plan(double)>> analyses = {
      [](double e) { return wl::hist_by_gender(e)(DatasetHandle::root()); },
      [](double e) { return wl::hist_by_gender_age(e)(DatasetHandle::root()); },
      [](double e) {
        return wl::hist_by_gender_age_nat(e)(DatasetHandle::root());
      }};
  OptimizerInput input{p.eps, kOptimizerMinEps, kOptimizerDelta, Beta(p.beta),
                       0.0, kOptimizerIter};
  auto outcomes = choose_eps(analyses, input, tolerances);

  const char* names[] = {"byGen", "byGenAge", "byGenAgeNat"};
  std::printf("%-12s %10s %8s %8s %10s\n", "Histogram", "tolerance", "status",
              "eps", "alpha");
  for (std::size_t i = 0; i < outcomes.size(); ++i)
    std::printf("%-12s %10s %8s %8.2f %10.2f\n", names[i],
                format_double(tolerances[i]).c_str(),
                to_string(outcomes[i].status), outcomes[i].epsilon,
                outcomes[i].alpha);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "dpplan - differentially private query plans with static privacy and "
      "accuracy analyzers"};
  app.require_subcommand(1);

  Params p;
  std::string workload;

  auto add_common = [&](CLI::App* sub, bool wants_workload) {
    if (wants_workload)
      sub->add_option("workload", workload, "workload name")->required();
    sub->add_option("--bins", p.bins, "number of CDF bins");
    sub->add_option("--eps", p.eps, "privacy budget parameter");
    sub->add_option("--n", p.n, "range-workload domain size");
    sub->add_option("--seed", p.seed, "random seed");
    sub->add_option("--out", p.out, "output CSV path");
    sub->add_flag("--verbose", p.verbose, "print per-node detail");
  };

  CLI::App* cb = app.add_subcommand("budget",
                                    "statically bound a workload's epsilon");
  add_common(cb, true);

  CLI::App* ca = app.add_subcommand(
      "accuracy", "statically bound a workload's error at confidence 1-beta");
  add_common(ca, true);
  ca->add_option("--beta", p.beta, "failure probability");
  ca->add_flag("--exact", p.exact, "print the full float instead of ceiling");

  CLI::App* cr = app.add_subcommand("run", "execute a workload on a CSV");
  add_common(cr, true);
  cr->add_option("input", p.input, "input CSV path")->required();
  cr->add_option("--cap", p.cap, "privacy budget cap")->required();
  cr->add_option("--beta", p.beta, "failure probability (range workloads)");

  CLI::App* cs = app.add_subcommand(
      "simulate", "Monte-Carlo check of the static error bound");
  add_common(cs, true);
  cs->add_option("input", p.input, "input CSV path")->required();
  cs->add_option("--beta", p.beta, "failure probability");
  cs->add_option("--trials", p.trials, "number of runs");

  CLI::App* cc = app.add_subcommand(
      "compare-bounds", "union vs Chernoff error as operands grow");
  cc->add_option("--beta", p.beta, "failure probability");
  cc->add_option("--scale", p.scale, "Laplace scale of each operand");
  cc->add_option("--nmax", p.nmax, "largest operand count");
  cc->add_option("--out", p.out, "output CSV path");

  CLI::App* co = app.add_subcommand(
      "optimize", "per-histogram minimum epsilon meeting error tolerances");
  co->add_option("--tol", p.tol, "three comma-separated alpha tolerances")
      ->required();
  co->add_option("--beta", p.beta, "failure probability");
  co->add_option("--eps", p.eps, "total privacy budget")->default_val(3.0);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (app.got_subcommand(cb)) return cmd_budget(workload, p);
    if (app.got_subcommand(ca)) return cmd_accuracy(workload, p);
    if (app.got_subcommand(cr)) return cmd_run(workload, p);
    if (app.got_subcommand(cs)) return cmd_simulate(workload, p);
    if (app.got_subcommand(cc)) return cmd_compare_bounds(p);
    if (app.got_subcommand(co)) return cmd_optimize(p);
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const BudgetExceededError& e) {
    std::fprintf(stderr, "refused: %s\n", e.what());
    return kBudgetRefusal;
  } catch (const PartitionSafetyError& e) {
    std::fprintf(stderr, "refused: %s\n", e.what());
    return kSafety;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kParse;
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kParse;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return kUsage;
}
