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

// The generate -> design -> jam chain behind the command line, and experiment
// batches that run it once per row.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include "wnjam/design.hpp"
#include "wnjam/instgen.hpp"
#include "wnjam/io.hpp"
#include "wnjam/multiband.hpp"
#include "wnjam/robust.hpp"

namespace wnjam {

inline DesignDoc run_design(const GeneratedInstance& g, const DesignOptions& opt = {},
                            DesignResult* result = nullptr) {
  DesignResult dr = design_network(g.network, opt);
  DesignDoc doc;
  doc.design = dr.design;
  doc.estimates = estimate_balances(dr.design.balances, g.skeleton.estimate_noise, g.skeleton.estimate_seed);
  doc.spap_status = to_string(dr.spap_status);
  doc.revenue = dr.revenue;
  if (result) *result = std::move(dr);
  return doc;
}

enum class JamMode { kNominal, kRobust };

inline JamMode parse_jam_mode(const std::string& s) {
  if (s == "nominal") return JamMode::kNominal;
  if (s == "robust") return JamMode::kRobust;
  throw ValidationError("unknown mode '" + s + "' (expected nominal or robust)");
}

struct JamRequest {
  JamMode mode = JamMode::kRobust;
  double band_frac = 0.2;
  int negative_bands = 2;
  int positive_bands = 2;
  BandBounds bounds = BandBounds::kSpread;
  SepScope scope = SepScope::kClaimed;
  CutRule cut_rule = CutRule::kPerTp;
  SolveLimits limits;
};

struct JamOutcome {
  PlanDoc plan;
  ReportRow row;
  bool limit_reached = false;
  JamSolve nominal;
  std::optional<RobustRunReport> robust;
};

inline JammingInstance jamming_instance_of(const GeneratedInstance& g, const DesignDoc& d) {
  d.design.validate(g.network);
  return make_jamming_instance(g.network, g.skeleton, d.design, d.estimates);
}

inline MultibandSet bands_of(const JammingInstance& ji, const JamRequest& req) {
  return make_bands(ji.nominal_balance, req.band_frac, req.negative_bands, req.positive_bands, req.bounds);
}

inline PlanDoc plan_doc(const JammingInstance& ji, JamMode mode, const JamSolve& s) {
  PlanDoc p;
  p.mode = mode == JamMode::kNominal ? "nominal" : "robust";
  p.served = ji.served;
  for (const JammerSite& js : ji.jammers) p.site_ids.push_back(js.id);
  p.plan = s.plan;
  p.objective = s.objective;
  p.best_bound = s.best_bound;
  p.status = to_string(s.status);
  p.cuts = s.cuts;
  return p;
}

inline JamOutcome run_jam(const GeneratedInstance& g, const DesignDoc& d, const JamRequest& req,
                          const std::string& id) {
  const auto start = std::chrono::steady_clock::now();
  JamOutcome out;
  ReportRow& row = out.row;
  row.id = id;
  row.tps = static_cast<int>(g.network.num_tps());
  row.trxs = static_cast<int>(g.network.num_trxs());
  row.served = static_cast<int>(d.design.served.size());
  row.jammers = static_cast<int>(g.skeleton.jammers.size());

  const JammingInstance ji = jamming_instance_of(g, d);
  if (ji.num_tps() == 0) {
    // Nothing is served, so nothing can be jammed.
    JamSolve empty;
    empty.status = MilpStatus::kOptimal;
    empty.plan.activation = Activation::none(ji.num_jammers());
    out.nominal = empty;
    out.plan = plan_doc(ji, req.mode, empty);
    row.jam_nominal = 0;
    if (req.mode == JamMode::kRobust) {
      row.jam_robust = 0;
      row.por_percent = 0.0;
    }
  } else if (req.mode == JamMode::kNominal) {
    out.nominal = solve_nominal(ji, req.limits);
    out.plan = plan_doc(ji, req.mode, out.nominal);
    out.limit_reached = out.nominal.status == MilpStatus::kBudgetLimit;
    row.jam_nominal = out.nominal.jammed;
    row.cuts = 0;
  } else {
    const MultibandSet mb = bands_of(ji, req);
    RobustOptions opt;
    opt.cut_rule = req.cut_rule;
    opt.scope = req.scope;
    opt.limits = req.limits;
    RobustRunReport rep = solve_robust(ji, mb, opt);
    if (!rep.audit.robust) throw SolverError("robust plan failed its final audit");
    out.nominal = rep.nominal;
    out.plan = plan_doc(ji, req.mode, rep.robust);
    out.limit_reached = rep.limit_reached;
    row.jam_nominal = rep.nominal.jammed;
    row.jam_robust = rep.robust.jammed;
    row.por_percent = rep.por_percent;
    row.cuts = rep.cuts;
    out.robust = std::move(rep);
  }
  row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

// ---------------------------------------------------------------------------
// Batches

struct BatchRowResult {
  ReportRow row;
  std::string status;  // "ok", "limit" or "failed"
  std::string message;
  double gap = 0.0;    // robust relative gap (bound - objective) / max(1, bound)
};

struct BatchResult {
  std::vector<BatchRowResult> rows;
  std::optional<double> mean_por;
  bool any_limit = false;
  bool any_failed = false;
};

inline BatchRowResult run_experiment_row(const ExperimentRun& run) {
  BatchRowResult r;
  r.row.id = run.id;
  try {
    const GeneratedInstance g = generate(run.gen);
    DesignOptions dopt;
    dopt.limits = run.design_limits;
    const DesignDoc d = run_design(g, dopt);
    JamRequest req;
    req.band_frac = run.band_frac;
    req.negative_bands = run.negative_bands;
    req.positive_bands = run.positive_bands;
    req.bounds = run.bounds;
    req.limits = run.limits;
    JamOutcome out = run_jam(g, d, req, run.id);
    r.row = out.row;
    r.status = out.limit_reached ? "limit" : "ok";
    if (out.robust) {
      const double bound = out.robust->robust.best_bound, obj = out.robust->robust.objective;
      r.gap = std::max(0.0, bound - obj) / std::max(1.0, std::abs(bound));
    }
  } catch (const std::exception& e) {
    r.status = "failed";
    r.message = e.what();
  }
  return r;
}

// Rows run on up to `jobs` threads; results keep the order of the runs.
inline BatchResult run_batch(const ExperimentSpec& spec, int jobs = 1) {
  BatchResult out;
  out.rows.resize(spec.runs.size());
  const std::size_t width = static_cast<std::size_t>(std::max(1, jobs));
  for (std::size_t first = 0; first < spec.runs.size(); first += width) {
    std::vector<std::future<BatchRowResult>> pending;
    const std::size_t last = std::min(spec.runs.size(), first + width);
    for (std::size_t i = first; i < last; ++i) {
      pending.push_back(std::async(width > 1 ? std::launch::async : std::launch::deferred, run_experiment_row,
                                   std::cref(spec.runs[i])));
    }
    for (std::size_t i = first; i < last; ++i) out.rows[i] = pending[i - first].get();
  }
  double sum = 0.0;
  int n = 0;
  for (const BatchRowResult& r : out.rows) {
    out.any_limit = out.any_limit || r.status == "limit";
    out.any_failed = out.any_failed || r.status == "failed";
    if (r.status != "failed" && r.row.por_percent) {
      sum += *r.row.por_percent;
      ++n;
    }
  }
  if (n > 0) out.mean_por = sum / n;
  return out;
}

inline std::string batch_csv(const BatchResult& b) {
  std::string s = csv_header() + "\n";
  for (const BatchRowResult& r : b.rows) {
    s += r.status == "failed" ? r.row.id + ",,,,,,,,,\n" : to_csv(r.row) + "\n";
  }
  // Only the ID and PoR% columns carry meaning on the summary line.
  char por[32] = "";
  if (b.mean_por) std::snprintf(por, sizeof por, "%.2f", *b.mean_por);
  s += std::string("mean,,,,,,,") + por + ",,\n";
  return s;
}

inline Json batch_summary(const BatchResult& b) {
  Json j;
  j["format"] = "wnjam.batch-summary";
  j["version"] = kFormatVersion;
  j["rows"] = Json::array();
  for (const BatchRowResult& r : b.rows) {
    Json row = {{"id", r.row.id}, {"status", r.status}, {"robust_gap", r.gap}};
    if (!r.message.empty()) row["message"] = r.message;
    j["rows"].push_back(std::move(row));
  }
  j["mean_por_percent"] = b.mean_por ? Json(*b.mean_por) : Json(nullptr);
  return j;
}

}  // namespace wnjam
