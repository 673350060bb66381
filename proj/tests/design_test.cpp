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

#include "wnjam/design.hpp"

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "wnjam/pipeline.hpp"

namespace wnjam {
namespace {

TEST(Design, ExampleServesItsOnlyTp) {
  const DesignResult r = design_network(testing::example_network());
  EXPECT_EQ(r.design.served, std::vector<int>{0});
  EXPECT_EQ(r.revenue, 1.0);
  EXPECT_NO_THROW(r.design.validate(testing::example_network()));
  EXPECT_GT(r.design.balances[0], 0.0);
}

TEST(Design, UnservableTpIsLeftOut) {
  NetworkInstance net = testing::example_network();
  net.fading(0, 0) = db_to_linear(-110.0);
  net.fading(0, 1) = db_to_linear(-112.0);
  const DesignResult r = design_network(net);
  EXPECT_TRUE(r.design.served.empty());
  EXPECT_EQ(r.revenue, 0.0);
  EXPECT_NO_THROW(r.design.validate(net));
}

TEST(Design, SmallNetworksReachTheSpapOptimum) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    GenParams p;
    p.seed = seed;
    p.n_tps = 4;
    p.n_trxs = 2;
    p.n_jammers = 2;
    const GeneratedInstance g = generate(p);
    SpapOptions raw;
    raw.prune_unservable = false;
    const MilpSolution s = bb_solve(build_spap(g.network, raw).model);
    ASSERT_EQ(s.status, MilpStatus::kOptimal);
    DesignOptions opt;
    opt.spap.max_servers = 0;
    const DesignResult r = design_network(g.network, opt);
    EXPECT_NO_THROW(r.design.validate(g.network));
    // Every served TP keeps a strictly positive balance margin.
    for (double b : r.design.balances) EXPECT_GT(b, 0.0);
    EXPECT_LE(r.revenue, s.objective + 1e-9);
    EXPECT_GE(r.revenue, s.objective - 1e-9) << "seed " << seed;
  }
}

TEST(Design, GeneratedDesignsValidate) {
  GenParams p;
  p.n_tps = 64;
  p.n_trxs = 6;
  DesignOptions opt;
  opt.limits.node_limit = 50;
  const DesignResult r = design_network(generate(p).network, opt);
  const GeneratedInstance g = generate(p);
  EXPECT_NO_THROW(r.design.validate(g.network));
  EXPECT_FALSE(r.design.served.empty());
  for (int t : r.design.served) {
    const auto tu = static_cast<std::size_t>(t);
    const auto s = static_cast<std::size_t>(r.design.server[tu]);
    EXPECT_GE(compute_sir(tu, s, r.design.powers_mw, g.network), g.network.sir_threshold);
  }
}

TEST(Pipeline, EmptyServedSetGivesZeros) {
  GenParams p;
  p.n_tps = 16;
  p.n_trxs = 2;
  p.n_jammers = 3;
  const GeneratedInstance g = generate(p);
  DesignDoc d;
  d.design.powers_mw.assign(2, 0.0);
  d.design.server.assign(16, kUnserved);
  d.spap_status = "optimal";
  JamRequest req;
  const JamOutcome o = run_jam(g, d, req, "empty");
  EXPECT_EQ(o.row.served, 0);
  EXPECT_EQ(o.row.jam_nominal, 0);
  EXPECT_EQ(o.row.jam_robust, 0);
  EXPECT_EQ(o.row.por_percent, 0.0);
}

TEST(Pipeline, NominalAndRobustRowsOnASmallInstance) {
  GenParams p;
  p.seed = 4;
  p.n_tps = 36;
  p.n_trxs = 4;
  p.n_jammers = 6;
  const GeneratedInstance g = generate(p);
  DesignOptions dopt;
  dopt.limits.node_limit = 50;
  const DesignDoc d = run_design(g, dopt);
  ASSERT_FALSE(d.design.served.empty());
  JamRequest req;
  req.limits.node_limit = 5000;
  req.mode = JamMode::kNominal;
  const JamOutcome nom = run_jam(g, d, req, "n");
  EXPECT_TRUE(nom.row.jam_nominal.has_value());
  EXPECT_FALSE(nom.row.jam_robust.has_value());
  req.mode = JamMode::kRobust;
  const JamOutcome rob = run_jam(g, d, req, "r");
  ASSERT_TRUE(rob.row.jam_robust.has_value());
  EXPECT_LE(*rob.row.jam_robust, *rob.row.jam_nominal);
  EXPECT_LE(*rob.row.por_percent, 0.0);
  const JammingInstance ji = jamming_instance_of(g, d);
  EXPECT_TRUE(audit_robust(rob.plan.plan, ji, bands_of(ji, req)).robust);
}

}  // namespace
}  // namespace wnjam
