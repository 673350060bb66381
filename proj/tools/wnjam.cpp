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

// wnjam: generate instances, design networks, and compute nominal and robust
// jamming plans.
//
// Exit codes: 0 success, 2 validation or input error, 3 a solve stopped at a
// limit (outputs are still written), 4 solver failure.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wnjam/io.hpp"
#include "wnjam/pipeline.hpp"

namespace {

using namespace wnjam;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitLimit = 3;
constexpr int kExitSolver = 4;

struct LimitFlags {
  std::int64_t node_limit = -1;
  double time_limit = -1.0;

  SolveLimits apply(SolveLimits lim) const {
    if (node_limit >= 0) lim.node_limit = node_limit;
    if (time_limit >= 0.0) lim.time_limit_seconds = time_limit;
    return lim;
  }
};

void add_limit_flags(CLI::App* cmd, LimitFlags& f) {
  cmd->add_option("--node-limit", f.node_limit, "Branch-and-bound node limit");
  cmd->add_option("--time-limit", f.time_limit, "Wall-clock limit per solve, seconds");
}

struct BandFlags {
  double band_frac = 0.2;
  std::string bands = "2+2";
  std::string bounds = "spread";
  std::string scope = "claimed";

  void fill(JamRequest& req) const {
    req.band_frac = band_frac;
    std::tie(req.negative_bands, req.positive_bands) = parse_band_counts(bands);
    req.bounds = parse_band_bounds(bounds);
    if (scope == "claimed") {
      req.scope = SepScope::kClaimed;
    } else if (scope == "served") {
      req.scope = SepScope::kServed;
    } else {
      throw ValidationError("unknown scope '" + scope + "' (expected claimed or served)");
    }
  }
};

void add_band_flags(CLI::App* cmd, BandFlags& f) {
  cmd->add_option("--band-frac", f.band_frac, "Relative band width in dB")->capture_default_str();
  cmd->add_option("--bands", f.bands, "Band counts below+above the nominal value")->capture_default_str();
  cmd->add_option("--bounds", f.bounds, "Band cardinality bounds: spread, unlimited or none")->capture_default_str();
  cmd->add_option("--scope", f.scope, "Separation scope: claimed or served")->capture_default_str();
}

int cmd_generate(const GenParams& p, const std::string& out) {
  const GeneratedInstance g = generate(p);
  save_instance(out, g);
  std::printf("instance: |T|=%zu |S|=%zu |J|=%zu -> %s\n", g.network.num_tps(), g.network.num_trxs(),
              g.skeleton.jammers.size(), out.c_str());
  return kExitOk;
}

int cmd_design(const std::string& instance, const LimitFlags& lf, const std::string& out) {
  const GeneratedInstance g = load_instance(instance);
  DesignOptions opt;
  opt.limits = lf.apply(opt.limits);
  DesignResult dr;
  const DesignDoc d = run_design(g, opt, &dr);
  save_design(out, d);
  std::printf("|T*|=%zu of %zu (spap %s, revenue %g) -> %s\n", d.design.served.size(), g.network.num_tps(),
              d.spap_status.c_str(), d.revenue, out.c_str());
  return dr.spap_status == MilpStatus::kBudgetLimit ? kExitLimit : kExitOk;
}

int cmd_jam(const std::string& instance, const std::string& design, const std::string& mode, const BandFlags& bf,
            const std::string& cut_rule, const LimitFlags& lf, const std::string& out, const std::string& report,
            std::string id) {
  const GeneratedInstance g = load_instance(instance);
  const DesignDoc d = load_design(design);
  JamRequest req;
  req.mode = parse_jam_mode(mode);
  bf.fill(req);
  req.cut_rule = parse_cut_rule(cut_rule);
  req.limits = lf.apply(req.limits);
  if (id.empty()) id = std::filesystem::path(instance).stem().string();
  const JamOutcome o = run_jam(g, d, req, id);
  save_plan(out, o.plan);
  const std::string csv = csv_header() + "\n" + to_csv(o.row) + "\n";
  if (!report.empty()) write_atomic(report, csv);
  std::cout << csv;
  return o.limit_reached ? kExitLimit : kExitOk;
}

int cmd_batch(const std::string& spec_path, int jobs, const std::string& out) {
  const ExperimentSpec spec = load_experiment(spec_path);
  const BatchResult b = run_batch(spec, jobs);
  const std::string csv = batch_csv(b);
  write_atomic(out, csv);
  write_atomic(out + ".summary.json", dump(batch_summary(b)));
  std::cout << csv;
  for (const BatchRowResult& r : b.rows) {
    if (r.status == "failed") std::fprintf(stderr, "%s: failed: %s\n", r.row.id.c_str(), r.message.c_str());
    if (r.status == "limit") std::fprintf(stderr, "%s: limit reached (robust gap %.4f)\n", r.row.id.c_str(), r.gap);
  }
  if (b.any_failed) return kExitSolver;
  return b.any_limit ? kExitLimit : kExitOk;
}

int cmd_audit(const std::string& instance, const std::string& design, const std::string& plan_path,
              const BandFlags& bf) {
  const GeneratedInstance g = load_instance(instance);
  const DesignDoc d = load_design(design);
  const PlanDoc p = load_plan(plan_path);
  const JammingInstance ji = jamming_instance_of(g, d);
  require(p.served == ji.served, "audit: plan was computed for a different served set");
  require(p.plan.activation.typology.size() == ji.num_jammers(), "audit: plan has the wrong number of sites");
  JamRequest req;
  bf.fill(req);
  const JammingPlan& plan = p.plan;
  const bool nominal_ok = is_nominally_feasible(plan, ji);
  std::printf("claimed=%zu cost=%g budget=%g nominal=%s\n", plan.claimed_count(), activation_cost(plan.activation, ji),
              ji.budget, nominal_ok ? "feasible" : "infeasible");
  if (!nominal_ok || ji.num_tps() == 0) {
    std::printf("robust=%s\n", nominal_ok ? "true" : "false");
    return kExitOk;
  }
  const MultibandSet mb = bands_of(ji, req);
  const AuditResult a = audit_robust(plan, ji, mb, req.scope);
  std::printf("robust=%s max_denied=%d method=%s\n", a.robust ? "true" : "false", a.max_denied, a.method.c_str());
  for (std::size_t i = 0; i < a.denied_tps.size(); ++i) {
    const auto r = static_cast<std::size_t>(a.denied_tps[i]);
    std::printf("  denied tp=%d band=%d\n", ji.served[r], a.band[r]);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wnjam: wireless network design and robust jammer placement"};
  app.require_subcommand(1);

  GenParams gp;
  std::string out;
  auto* gen = app.add_subcommand("generate", "Write a seeded synthetic instance");
  gen->add_option("--seed", gp.seed, "Generator seed")->capture_default_str();
  gen->add_option("--tps", gp.n_tps, "Number of testpoints")->capture_default_str();
  gen->add_option("--trxs", gp.n_trxs, "Number of transceivers")->capture_default_str();
  gen->add_option("--jammers", gp.n_jammers, "Number of candidate jammer sites")->capture_default_str();
  gen->add_option("--typologies", gp.typology_dbm, "Jammer typology powers, dBm, increasing")->delimiter(',');
  gen->add_option("--typology-costs", gp.typology_base_cost, "Base cost per typology, increasing")->delimiter(',');
  gen->add_option("--budget-frac", gp.budget_frac, "Budget as a fraction of all cheapest devices")
      ->capture_default_str();
  gen->add_option("--out", out, "Instance file")->required();

  std::string instance, design, plan, mode = "robust", report, id, cut_rule = "per-tp", spec;
  LimitFlags lf;
  BandFlags bf;
  int jobs = 1;

  auto* des = app.add_subcommand("design", "Solve the network design problem for an instance");
  des->add_option("--instance", instance, "Instance file")->required();
  des->add_option("--out", out, "Design file")->required();
  add_limit_flags(des, lf);

  auto* jam = app.add_subcommand("jam", "Compute a nominal or robust jamming plan");
  jam->add_option("--instance", instance, "Instance file")->required();
  jam->add_option("--design", design, "Design file")->required();
  jam->add_option("--mode", mode, "nominal or robust")->capture_default_str();
  jam->add_option("--cut-rule", cut_rule, "Robustness cut: per-tp, lifted or unlifted")->capture_default_str();
  jam->add_option("--out", out, "Plan file")->required();
  jam->add_option("--report", report, "CSV report file");
  jam->add_option("--id", id, "Report row ID (default: instance file stem)");
  add_band_flags(jam, bf);
  add_limit_flags(jam, lf);

  auto* bat = app.add_subcommand("batch", "Run an experiment spec and write the CSV report");
  bat->add_option("--spec", spec, "Experiment spec file")->required();
  bat->add_option("--jobs", jobs, "Rows run concurrently")->capture_default_str();
  bat->add_option("--out", out, "CSV report file")->required();

  auto* aud = app.add_subcommand("audit", "Check a plan against the multiband uncertainty set");
  aud->add_option("--instance", instance, "Instance file")->required();
  aud->add_option("--design", design, "Design file")->required();
  aud->add_option("--plan", plan, "Plan file")->required();
  add_band_flags(aud, bf);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*gen) return cmd_generate(gp, out);
    if (*des) return cmd_design(instance, lf, out);
    if (*jam) return cmd_jam(instance, design, mode, bf, cut_rule, lf, out, report, id);
    if (*bat) return cmd_batch(spec, jobs, out);
    if (*aud) return cmd_audit(instance, design, plan, bf);
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const SolverError& e) {
    std::fprintf(stderr, "solver failure: %s\n", e.what());
    return kExitSolver;
  } catch (const std::out_of_range& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  }
  return kExitOk;
}
