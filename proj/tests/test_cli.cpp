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

#include <catch2/catch_amalgamated.hpp>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "dpplan/csv.hpp"
#include "dpplan/eval.hpp"
#include "test_helpers.hpp"

namespace {

struct CliResult {
  int exit_code;
  std::string output;  // stdout + stderr
};

CliResult run_cli(const std::string& args) {
  std::string cmd = std::string(DPPLAN_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[512];
  while (fgets(buf, sizeof(buf), pipe)) out += buf;
  int status = pclose(pipe);
  int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return {code, out};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool exists(const std::string& path) {
  std::ifstream in(path);
  return in.good();
}

std::string packets() { return testutil::data_path("network_packets.csv"); }

}  // namespace

TEST_CASE("cli budget transcripts") {
  auto r1 = run_cli("budget cdf1 --bins 10 --eps 1");
  CHECK(r1.exit_code == 0);
  CHECK(r1.output.find("epsilon = 1\n") != std::string::npos);

  auto r2 = run_cli("budget cdf1-naive --bins 10 --eps 1");
  CHECK(r2.exit_code == 0);
  CHECK(r2.output.find("epsilon = 10\n") != std::string::npos);

  auto r3 = run_cli("budget cdf2 --bins 10 --eps 1");
  CHECK(r3.output.find("epsilon = 1\n") != std::string::npos);

  auto r4 = run_cli("budget pure");
  CHECK(r4.output.find("epsilon = 0\n") != std::string::npos);
}

TEST_CASE("cli accuracy transcripts use ceiling display") {
  CHECK(run_cli("accuracy cdf1 --bins 10 --eps 1 --beta 0.05").output.find(
            "alpha = 53") != std::string::npos);
  CHECK(run_cli("accuracy cdf2 --bins 10 --eps 1 --beta 0.05").output.find(
            "alpha = 22") != std::string::npos);
  CHECK(run_cli("accuracy cdf2 --bins 3 --eps 1 --beta 0.1").output.find(
            "alpha = 12") != std::string::npos);
  // --exact prints the full float
  auto exact = run_cli("accuracy cdf1 --bins 10 --eps 1 --beta 0.05 --exact");
  CHECK(exact.output.find("alpha = 52.98317366548") != std::string::npos);
}

TEST_CASE("cli rejects unknown workloads with exit code 2") {
  auto r = run_cli("budget nonsense");
  CHECK(r.exit_code == 2);
}

TEST_CASE("cli verbose modes expose the breakdown and the bound trace") {
  auto rb = run_cli("budget cdf2 --bins 3 --eps 1 --verbose");
  CHECK(rb.exit_code == 0);
  CHECK(rb.output.find("part") != std::string::npos);
  CHECK(rb.output.find("max over branches") != std::string::npos);
  auto ra = run_cli("accuracy cdf2 --bins 3 --eps 1 --beta 0.1 --verbose");
  CHECK(ra.exit_code == 0);
  CHECK(ra.output.find("norm over 3 operand(s)") != std::string::npos);
}

TEST_CASE("cli refuses over-budget runs with exit code 3 and no output") {
  std::string out = "cli_refused.csv";
  std::remove(out.c_str());
  auto r = run_cli("run cdf1-naive " + packets() +
                   " --bins 10 --eps 1 --cap 1 --seed 3 --out " + out);
  CHECK(r.exit_code == 3);
  CHECK(!exists(out));
}

TEST_CASE("cli flags safety violations with exit code 4") {
  CHECK(run_cli("budget part-bad --eps 0.5").exit_code == 4);
  CHECK(run_cli("accuracy part-bad --eps 0.5 --beta 0.1").exit_code == 4);
  auto r = run_cli("run part-bad " + packets() +
                   " --eps 0.5 --cap 5 --seed 1 --out cli_bad.csv");
  CHECK(r.exit_code == 4);
  CHECK(run_cli("budget part-good --eps 0.5").output.find("epsilon = 0.5") !=
        std::string::npos);
}

TEST_CASE("cli reports parse errors with exit code 5 and a line number") {
  std::ofstream bad("cli_bad_input.csv");
  bad << "id,timestamp,src,dest,protocol,length,payload\n";
  bad << "1,2,a,b,tcp,not_a_number,xx\n";
  bad.close();
  auto r = run_cli(
      "run cdf1 cli_bad_input.csv --bins 5 --eps 1 --cap 2 --out cli_x.csv");
  CHECK(r.exit_code == 5);
  CHECK(r.output.find("line 2") != std::string::npos);
  std::remove("cli_bad_input.csv");
}

TEST_CASE("cli runs are deterministic under a fixed seed") {
  std::string o1 = "cli_run_a.csv", o2 = "cli_run_b.csv";
  std::string cmd = "run cdf2 " + packets() +
                    " --bins 10 --eps 1 --cap 1 --seed 7 --out ";
  CHECK(run_cli(cmd + o1).exit_code == 0);
  CHECK(run_cli(cmd + o2).exit_code == 0);
  CHECK(slurp(o1) == slurp(o2));
  CHECK(!slurp(o1).empty());
  // emitted file round-trips through the loader
  dpplan::Schema s{{{"key", dpplan::ColumnType::kInteger},
                    {"value", dpplan::ColumnType::kReal}}};
  auto rows = dpplan::load_csv(o1, s);
  CHECK(rows.size() == 10);
  std::remove(o1.c_str());
  std::remove(o2.c_str());
}

TEST_CASE("cli simulate prints the exceed fraction") {
  auto r = run_cli("simulate cdf2 " + packets() +
                   " --bins 5 --eps 1 --beta 0.1 --trials 40 --seed 5");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("exceed_fraction =") != std::string::npos);
  CHECK(r.output.find("alpha =") != std::string::npos);
  // a single trial writes exactly one row
  auto r1 = run_cli("simulate cdf2 " + packets() +
                    " --bins 5 --eps 1 --beta 0.1 --trials 1 --seed 5 "
                    "--out cli_sim.csv");
  CHECK(r1.exit_code == 0);
  dpplan::Schema s{{{"trial", dpplan::ColumnType::kInteger},
                    {"observed_error", dpplan::ColumnType::kReal}}};
  CHECK(dpplan::load_csv("cli_sim.csv", s).size() == 1);
  std::remove("cli_sim.csv");
}

TEST_CASE("cli run output equals the library executor under the same seed") {
  std::string out = "cli_vs_lib.csv";
  CHECK(run_cli("run cdf2 " + packets() +
                " --bins 10 --eps 1 --cap 1 --seed 31 --out " + out)
            .exit_code == 0);
  dpplan::Schema s{{{"key", dpplan::ColumnType::kInteger},
                    {"value", dpplan::ColumnType::kReal}}};
  auto emitted = dpplan::load_csv(out, s);
  auto rows = testutil::packet_rows();
  auto expected = dpplan::result_vector(
      dpplan::eval(dpplan::workloads::cdf_parallel(
                       dpplan::workloads::default_bins(10), 1.0),
                   rows, 1.0, 31)
          .root.value());
  REQUIRE(emitted.size() == expected.size());
  for (std::size_t i = 0; i < emitted.size(); ++i)
    CHECK(emitted[i].as_list()[1].as_real() == expected[i]);
  std::remove(out.c_str());
}

TEST_CASE("cli compare-bounds emits the crossover table") {
  auto r = run_cli("compare-bounds --beta 0.1 --nmax 10");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("n,union_alpha,chernoff_alpha") != std::string::npos);
  CHECK(r.output.find("2,5.99146") != std::string::npos);
}

TEST_CASE("cli optimize reproduces the headline table rows") {
  auto r = run_cli("optimize --tol 100,100,100 --beta 0.05 --eps 3");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("byGen") != std::string::npos);
  CHECK(r.output.find("0.06") != std::string::npos);
  CHECK(r.output.find("61.48") != std::string::npos);
  auto r2 = run_cli("optimize --tol 5,5,10 --beta 0.05 --eps 3");
  CHECK(r2.output.find("MaxBud") != std::string::npos);
  CHECK(r2.output.find("9.82") != std::string::npos);
}

TEST_CASE("cli accuracy on range workloads writes per-query errors") {
  std::string out = "cli_ranges.csv";
  auto r = run_cli("accuracy range-identity --n 8 --eps 1 --beta 0.05 --out " +
                   out);
  CHECK(r.exit_code == 0);
  dpplan::Schema s{{{"lo", dpplan::ColumnType::kInteger},
                    {"hi", dpplan::ColumnType::kInteger},
                    {"alpha", dpplan::ColumnType::kReal}}};
  CHECK(dpplan::load_csv(out, s).size() == 36);
  std::remove(out.c_str());
}
