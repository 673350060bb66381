// Copyright 2026 The wnjam Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// End-to-end runs of the wnjam binary on files written by the library.

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "fixtures.hpp"
#include "wnjam/io.hpp"

#ifndef WNJAM_CLI
#error "WNJAM_CLI must name the wnjam binary"
#endif

namespace wnjam {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun run(const std::string& args) {
  const std::string cmd = std::string(WNJAM_CLI) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* p = ::popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = ::pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

// Drops the trailing wall-seconds column of each data line.
std::string without_wall(const std::string& csv) {
  std::string out;
  for (const std::string& l : lines(csv)) out += l.substr(0, l.rfind(',')) + "\n";
  return out;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("wnjam_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  // The single-TP example with its two devices and the given powers.
  void write_example() {
    GeneratedInstance g;
    g.network = testing::example_network();
    const JammingInstance ji = testing::example_jamming(1e-5);
    g.skeleton.jammers = ji.jammers;
    g.skeleton.typology_power_mw = ji.typology_power_mw;
    g.skeleton.fading = ji.fading;
    g.skeleton.profits = ji.profits;
    g.skeleton.budget = ji.budget;
    g.skeleton.estimate_noise = 0.0;
    g.population = {1.0};
    save_instance(path("ex.json"), g);
    DesignDoc d;
    d.design.powers_mw = testing::example_powers();
    d.design.server = {0};
    d.design.served = {0};
    d.design.balances = {compute_delta_sir(0, 0, d.design.powers_mw, g.network)};
    d.estimates = d.design.balances;
    d.spap_status = "optimal";
    d.revenue = 1.0;
    save_design(path("ex.design.json"), d);
  }

  fs::path dir_;
};

TEST_F(Cli, ExampleNominalPicksLightDevice) {
  write_example();
  const CliRun r = run("jam --instance " + path("ex.json") + " --design " + path("ex.design.json") +
                    " --mode nominal --id EX --out " + path("nom.json"));
  ASSERT_EQ(r.code, 0) << r.out;
  const PlanDoc p = load_plan(path("nom.json"));
  EXPECT_EQ(p.plan.activation.typology, std::vector<int>{0});
  EXPECT_EQ(p.plan.claimed, std::vector<char>{1});
  const auto l = lines(r.out);
  ASSERT_EQ(l.size(), 2u);
  EXPECT_EQ(l[0], csv_header());
  EXPECT_EQ(l[1].substr(0, l[1].rfind(',')), "EX,1,2,1,1,1,,,0");
}

TEST_F(Cli, ExampleRobustPicksHeavyDevice) {
  write_example();
  const CliRun r = run("jam --instance " + path("ex.json") + " --design " + path("ex.design.json") +
                    " --id EX --out " + path("rob.json") + " --report " + path("rob.csv"));
  ASSERT_EQ(r.code, 0) << r.out;
  const PlanDoc p = load_plan(path("rob.json"));
  EXPECT_EQ(p.mode, "robust");
  EXPECT_EQ(p.plan.activation.typology, std::vector<int>{1});
  const auto l = lines(read_file(path("rob.csv")));
  ASSERT_EQ(l.size(), 2u);
  EXPECT_EQ(l[1].substr(0, l[1].find(",", l[1].find("0.00"))), "EX,1,2,1,1,1,1,0.00");

  const CliRun audit_heavy = run("audit --instance " + path("ex.json") + " --design " + path("ex.design.json") +
                              " --plan " + path("rob.json"));
  EXPECT_EQ(audit_heavy.code, 0);
  EXPECT_NE(audit_heavy.out.find("robust=true"), std::string::npos) << audit_heavy.out;
  run("jam --instance " + path("ex.json") + " --design " + path("ex.design.json") + " --mode nominal --out " +
      path("nom.json"));
  const CliRun audit_light = run("audit --instance " + path("ex.json") + " --design " + path("ex.design.json") +
                              " --plan " + path("nom.json"));
  EXPECT_NE(audit_light.out.find("robust=false"), std::string::npos) << audit_light.out;
  EXPECT_NE(audit_light.out.find("denied tp=0"), std::string::npos);
}

TEST_F(Cli, NoDeviationMatchesNominal) {
  write_example();
  const CliRun r = run("jam --instance " + path("ex.json") + " --design " + path("ex.design.json") +
                    " --bounds none --id EX --out " + path("rob.json"));
  ASSERT_EQ(r.code, 0);
  const PlanDoc p = load_plan(path("rob.json"));
  EXPECT_EQ(p.plan.activation.typology, std::vector<int>{0});
  EXPECT_EQ(p.cuts, 0);
  EXPECT_NE(r.out.find("EX,1,2,1,1,1,1,0.00,0,"), std::string::npos) << r.out;
}

TEST_F(Cli, GenerateIsDeterministic) {
  ASSERT_EQ(run("generate --seed 7 --tps 20 --trxs 3 --jammers 4 --out " + path("a.json")).code, 0);
  ASSERT_EQ(run("generate --seed 7 --tps 20 --trxs 3 --jammers 4 --out " + path("b.json")).code, 0);
  EXPECT_EQ(read_file(path("a.json")), read_file(path("b.json")));
  ASSERT_EQ(run("design --instance " + path("a.json") + " --node-limit 50 --out " + path("a.design.json")).code, 0);
  const CliRun j = run("jam --instance " + path("a.json") + " --design " + path("a.design.json") +
                    " --node-limit 2000 --out " + path("a.plan.json"));
  EXPECT_TRUE(j.code == 0 || j.code == 3);
  EXPECT_TRUE(fs::exists(path("a.plan.json")));
}

TEST_F(Cli, BatchWritesRowsAndMeanLine) {
  write_atomic(path("spec.json"), R"({"format": "wnjam.experiment", "version": 1, "runs": [
    {"id": "A", "seed": 11, "tps": 16, "trxs": 2, "jammers": 4,
     "design_limits": {"node_limit": 50}, "limits": {"node_limit": 2000}},
    {"id": "B", "seed": 12, "tps": 25, "trxs": 3, "jammers": 5,
     "design_limits": {"node_limit": 50}, "limits": {"node_limit": 2000}}]})");
  const CliRun a = run("batch --spec " + path("spec.json") + " --out " + path("a.csv"));
  ASSERT_TRUE(a.code == 0 || a.code == 3) << a.out;
  const auto l = lines(read_file(path("a.csv")));
  ASSERT_EQ(l.size(), 4u);
  EXPECT_EQ(l[0], csv_header());
  EXPECT_EQ(l[1].substr(0, 2), "A,");
  EXPECT_EQ(l[2].substr(0, 2), "B,");
  EXPECT_EQ(l[3].substr(0, 5), "mean,");
  EXPECT_TRUE(fs::exists(path("a.csv.summary.json")));
  const CliRun b = run("batch --spec " + path("spec.json") + " --out " + path("b.csv"));
  EXPECT_EQ(b.code, a.code);
  EXPECT_EQ(without_wall(read_file(path("a.csv"))), without_wall(read_file(path("b.csv"))));
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("jam --instance " + path("missing.json") + " --design x --out y").code, 2);
  write_example();
  EXPECT_EQ(run("jam --instance " + path("ex.json") + " --design " + path("ex.design.json") +
                " --mode sideways --out " + path("p.json"))
                .code,
            2);
  EXPECT_EQ(run("jam --instance " + path("ex.json") + " --design " + path("ex.design.json") +
                " --bands 2 --out " + path("p.json"))
                .code,
            2);
  write_atomic(path("bad.json"), "{\"format\": \"wnjam.instance\", \"version\": 9}");
  EXPECT_EQ(run("design --instance " + path("bad.json") + " --out " + path("d.json")).code, 2);
  EXPECT_FALSE(fs::exists(path("d.json")));
}

}  // namespace
}  // namespace wnjam
