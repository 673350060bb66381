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

#include "wnjam/io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include <unistd.h>

namespace wnjam {
namespace {

namespace fs = std::filesystem;

class IoFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("wnjam_io_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

GeneratedInstance small_instance(std::uint64_t seed = 5) {
  GenParams p;
  p.seed = seed;
  p.n_tps = 24;
  p.n_trxs = 3;
  p.n_jammers = 4;
  return generate(p);
}

double rel(double a, double b) { return a == b ? 0.0 : std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

TEST(ExactDb, MapsBackWithinOneUlpRelative) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> e(-150.0, 40.0);
  int exact = 0;
  for (int i = 0; i < 5000; ++i) {
    const double x = std::pow(10.0, e(rng) / 10.0);
    const double back = db_to_linear(exact_db(x));
    EXPECT_LE(rel(back, x), 1e-15);
    exact += back == x;
  }
  EXPECT_GT(exact, 4000);
}

TEST(DbField, ZeroIsNullAndNegativeIsRejected) {
  EXPECT_TRUE(db_field(0.0).is_null());
  EXPECT_EQ(from_db_field(nullptr), 0.0);
  EXPECT_THROW(db_field(-1.0), ValidationError);
  EXPECT_THROW(db_field(std::nan("")), ValidationError);
  EXPECT_THROW(from_db_field(Json("x")), ValidationError);
}

TEST_F(IoFiles, InstanceRoundTrip) {
  const GeneratedInstance g = small_instance();
  const fs::path path = dir_ / "inst.json";
  save_instance(path, g);
  const GeneratedInstance h = load_instance(path);
  ASSERT_EQ(h.network.num_tps(), g.network.num_tps());
  ASSERT_EQ(h.network.num_trxs(), g.network.num_trxs());
  EXPECT_EQ(h.skeleton.profits, g.skeleton.profits);
  EXPECT_EQ(h.skeleton.budget, g.skeleton.budget);
  EXPECT_EQ(h.skeleton.estimate_seed, g.skeleton.estimate_seed);
  for (std::size_t t = 0; t < g.network.num_tps(); ++t) {
    EXPECT_EQ(h.network.testpoints[t].revenue, g.network.testpoints[t].revenue);
    for (std::size_t s = 0; s < g.network.num_trxs(); ++s) {
      EXPECT_LE(rel(h.network.fading(t, s), g.network.fading(t, s)), 1e-15);
    }
    for (std::size_t j = 0; j < g.skeleton.jammers.size(); ++j) {
      EXPECT_LE(rel(h.skeleton.fading(t, j), g.skeleton.fading(t, j)), 1e-15);
    }
  }
  EXPECT_LE(rel(h.network.noise_mw, g.network.noise_mw), 1e-15);
  EXPECT_LE(rel(h.network.sir_threshold, g.network.sir_threshold), 1e-15);
  // A second save reproduces the file byte for byte.
  const fs::path again = dir_ / "again.json";
  save_instance(again, h);
  EXPECT_EQ(read_file(path), read_file(again));
}

TEST_F(IoFiles, SavingTwiceIsByteIdentical) {
  const fs::path a = dir_ / "a.json", b = dir_ / "b.json";
  save_instance(a, small_instance(9));
  save_instance(b, small_instance(9));
  EXPECT_EQ(read_file(a), read_file(b));
  EXPECT_FALSE(fs::exists(dir_ / "a.json.tmp"));
}

TEST(Header, RejectsOtherFormatsAndVersions) {
  Json j = instance_to_json(small_instance());
  EXPECT_NO_THROW(instance_from_json(j));
  Json wrong = j;
  wrong["version"] = 2;
  EXPECT_THROW(instance_from_json(wrong), ValidationError);
  wrong = j;
  wrong["format"] = "wnjam.design";
  EXPECT_THROW(instance_from_json(wrong), ValidationError);
  wrong = j;
  wrong.erase("version");
  EXPECT_THROW(instance_from_json(wrong), ValidationError);
  EXPECT_THROW(parse_json("{ not json", "x"), ValidationError);
  EXPECT_THROW(design_from_json(j), ValidationError);
}

TEST(Header, RejectsMalformedInstanceFields) {
  Json j = instance_to_json(small_instance());
  Json bad = j;
  bad["fading_db"].erase(0);
  EXPECT_THROW(instance_from_json(bad), ValidationError);
  bad = j;
  bad["noise_dbm"] = "loud";
  EXPECT_THROW(instance_from_json(bad), ValidationError);
  bad = j;
  bad.erase("jamming");
  EXPECT_THROW(instance_from_json(bad), ValidationError);
}

TEST_F(IoFiles, DesignAndPlanRoundTrip) {
  DesignDoc d;
  d.design.powers_mw = {1.0, 0.0, 0.25};
  d.design.server = {0, kUnserved, 2};
  d.design.served = {0, 2};
  d.design.balances = {db_to_linear(-51.0), 3e-6};
  d.estimates = {db_to_linear(-50.0), 2.5e-6};
  d.spap_status = "optimal";
  d.revenue = 7;
  save_design(dir_ / "d.json", d);
  const DesignDoc e = load_design(dir_ / "d.json");
  EXPECT_EQ(e.design.server, d.design.server);
  EXPECT_EQ(e.design.served, d.design.served);
  EXPECT_EQ(e.design.powers_mw[1], 0.0);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_LE(rel(e.design.balances[i], d.design.balances[i]), 1e-15);
    EXPECT_LE(rel(e.estimates[i], d.estimates[i]), 1e-15);
  }
  EXPECT_EQ(e.revenue, 7);

  PlanDoc p;
  p.mode = "robust";
  p.served = {4, 9, 11};
  p.site_ids = {0, 1};
  p.plan = JammingPlan{Activation{{1, kNoDevice}}, {1, 0, 1}};
  p.objective = 2;
  p.best_bound = 3;
  p.status = "budget-limit";
  p.cuts = 5;
  save_plan(dir_ / "p.json", p);
  const PlanDoc q = load_plan(dir_ / "p.json");
  EXPECT_EQ(q.plan, p.plan);
  EXPECT_EQ(q.served, p.served);
  EXPECT_EQ(q.status, p.status);
  EXPECT_EQ(q.cuts, 5);
  const Json j = parse_json(read_file(dir_ / "p.json"), "plan");
  EXPECT_EQ(j["jammed"], (Json{4, 11}));
  Json bad = j;
  bad["jammed"] = {5};
  EXPECT_THROW(plan_from_json(bad), ValidationError);
}

TEST(Experiment, ParsesRunsAndRejectsDuplicates) {
  const Json j = parse_json(R"({"format": "wnjam.experiment", "version": 1, "runs": [
      {"id": "I1", "seed": 1, "tps": 100, "trxs": 6, "jammers": 15, "bands": "3+1",
       "bounds": "unlimited", "limits": {"node_limit": 500, "time_limit": 30}},
      {"id": "I2", "seed": 2, "tps": 100, "trxs": 9, "jammers": 15}]})",
                            "spec");
  const ExperimentSpec s = experiment_from_json(j);
  ASSERT_EQ(s.runs.size(), 2u);
  EXPECT_EQ(s.runs[0].negative_bands, 3);
  EXPECT_EQ(s.runs[0].positive_bands, 1);
  EXPECT_EQ(s.runs[0].bounds, BandBounds::kUnlimited);
  EXPECT_EQ(s.runs[0].limits.node_limit, 500);
  EXPECT_EQ(s.runs[0].limits.time_limit_seconds, 30.0);
  EXPECT_EQ(s.runs[1].gen.n_trxs, 9);
  Json dup = j;
  dup["runs"][1]["seed"] = 1;
  EXPECT_THROW(experiment_from_json(dup), ValidationError);
  dup = j;
  dup["runs"][1]["id"] = "I1";
  EXPECT_THROW(experiment_from_json(dup), ValidationError);
  dup = j;
  dup["runs"] = Json::array();
  EXPECT_THROW(experiment_from_json(dup), ValidationError);
}

TEST(Experiment, BandCountSyntax) {
  EXPECT_EQ(parse_band_counts("2+2"), (std::pair<int, int>{2, 2}));
  EXPECT_EQ(parse_band_counts("0+4"), (std::pair<int, int>{0, 4}));
  EXPECT_THROW(parse_band_counts("2"), ValidationError);
  EXPECT_THROW(parse_band_counts("a+2"), ValidationError);
  EXPECT_THROW(parse_band_counts("2+2x"), ValidationError);
  EXPECT_THROW(parse_band_counts("-1+2"), ValidationError);
  EXPECT_THROW(parse_band_bounds("some"), ValidationError);
}

TEST(Csv, HeaderAndRowFormat) {
  EXPECT_EQ(csv_header(), "ID,|T|,|S|,|T*|,|J|,#JAM(Nom),#JAM(Rob),PoR%,#Cuts,wall-seconds");
  ReportRow r;
  r.id = "I1";
  r.tps = 100;
  r.trxs = 6;
  r.served = 65;
  r.jammers = 15;
  r.jam_nominal = 40;
  r.jam_robust = 33;
  r.por_percent = -17.5;
  r.cuts = 12;
  r.wall_seconds = 1.23456;
  EXPECT_EQ(to_csv(r), "I1,100,6,65,15,40,33,-17.50,12,1.235");
  r.jam_robust.reset();
  r.por_percent.reset();
  EXPECT_EQ(to_csv(r), "I1,100,6,65,15,40,,,12,1.235");
}

}  // namespace
}  // namespace wnjam
