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

// File formats: versioned JSON documents for instances, designs, plans and
// experiment specs, and the CSV report. Powers and fadings are written in dB
// (dBm for powers) under explicit unit tags and converted back on load; a
// zero linear value is written as null.

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "json.hpp"
#include "wnjam/common.hpp"
#include "wnjam/instgen.hpp"
#include "wnjam/milp.hpp"
#include "wnjam/multiband.hpp"
#include "wnjam/netmodel.hpp"

namespace wnjam {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

// ---------------------------------------------------------------------------
// dB fields

// A dB value that maps back to `linear` exactly when one exists near
// linear_to_db(linear); otherwise the nearest one found.
inline double exact_db(double linear) {
  const double d0 = linear_to_db(linear);
  double best = d0;
  double best_err = std::abs(db_to_linear(d0) - linear);
  double up = d0, down = d0;
  for (int i = 0; i < 64 && best_err > 0.0; ++i) {
    up = std::nextafter(up, std::numeric_limits<double>::infinity());
    down = std::nextafter(down, -std::numeric_limits<double>::infinity());
    for (double d : {up, down}) {
      const double err = std::abs(db_to_linear(d) - linear);
      if (err < best_err) {
        best_err = err;
        best = d;
      }
    }
  }
  return best;
}

inline Json db_field(double linear) {
  if (linear == 0.0) return nullptr;
  if (!(linear > 0.0) || !std::isfinite(linear)) throw ValidationError("io: power/fading must be finite and >= 0");
  return exact_db(linear);
}

inline double from_db_field(const Json& j) {
  if (j.is_null()) return 0.0;
  if (!j.is_number()) throw ValidationError("io: dB field must be a number or null");
  return db_to_linear(j.get<double>());
}

inline Json db_matrix(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(db_field(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix from_db_matrix(const Json& j, std::size_t rows, std::size_t cols, const std::string& what) {
  require(j.is_array() && j.size() == rows, "io: " + what + " must have " + std::to_string(rows) + " rows");
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    require(j[r].is_array() && j[r].size() == cols, "io: " + what + " row has wrong length");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = from_db_field(j[r][c]);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Files

inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("io: cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw ValidationError("io: write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw ValidationError("io: cannot move output into place at " + path.string());
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("io: cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError("io: " + what + " is not valid JSON: " + e.what());
  }
}

inline void check_header(const Json& j, const std::string& format) {
  require(j.is_object(), "io: document must be a JSON object");
  require(j.contains("format") && j["format"] == format, "io: expected a '" + format + "' document");
  require(j.contains("version") && j["version"].is_number_integer(), "io: missing format version");
  const int v = j["version"].get<int>();
  require(v == kFormatVersion, "io: unsupported " + format + " version " + std::to_string(v));
}

template <class T>
T field(const Json& j, const char* key) {
  if (!j.contains(key)) throw ValidationError(std::string("io: missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ValidationError(std::string("io: field '") + key + "' has the wrong type");
  }
}

inline std::string dump(const Json& j) { return j.dump(1) + "\n"; }

// ---------------------------------------------------------------------------
// Instance

inline Json instance_to_json(const GeneratedInstance& g) {
  const NetworkInstance& net = g.network;
  const JammingSkeleton& sk = g.skeleton;
  Json j;
  j["format"] = "wnjam.instance";
  j["version"] = kFormatVersion;
  j["units"] = {{"noise", "dBm"},  {"sir_threshold", "dB"}, {"p_trx_max", "dBm"}, {"fading", "dB"},
                {"typology_power", "dBm"}, {"coordinates", "m"}};
  j["noise_dbm"] = db_field(net.noise_mw);
  j["sir_threshold_db"] = db_field(net.sir_threshold);
  j["p_trx_max_dbm"] = db_field(net.p_trx_max_mw);
  j["testpoints"] = Json::array();
  for (const Testpoint& tp : net.testpoints) {
    j["testpoints"].push_back({{"id", tp.id}, {"x", tp.x}, {"y", tp.y}, {"revenue", tp.revenue}});
  }
  j["trxs"] = Json::array();
  for (const Transceiver& s : net.trxs) j["trxs"].push_back({{"id", s.id}, {"x", s.x}, {"y", s.y}});
  j["fading_db"] = db_matrix(net.fading);
  j["population"] = g.population;

  Json a;
  a["jammers"] = Json::array();
  for (const JammerSite& js : sk.jammers) {
    a["jammers"].push_back({{"id", js.id}, {"x", js.x}, {"y", js.y}, {"cost", js.cost}});
  }
  a["typology_power_dbm"] = Json::array();
  for (double p : sk.typology_power_mw) a["typology_power_dbm"].push_back(db_field(p));
  a["fading_db"] = db_matrix(sk.fading);
  a["profits"] = sk.profits;
  a["budget"] = sk.budget;
  a["estimate_noise"] = sk.estimate_noise;
  a["estimate_seed"] = sk.estimate_seed;
  j["jamming"] = std::move(a);
  return j;
}

inline GeneratedInstance instance_from_json(const Json& j) {
  check_header(j, "wnjam.instance");
  GeneratedInstance g;
  NetworkInstance& net = g.network;
  net.noise_mw = from_db_field(field<Json>(j, "noise_dbm"));
  net.sir_threshold = from_db_field(field<Json>(j, "sir_threshold_db"));
  net.p_trx_max_mw = from_db_field(field<Json>(j, "p_trx_max_dbm"));
  for (const Json& tp : field<Json>(j, "testpoints")) {
    net.testpoints.push_back(
        {field<int>(tp, "id"), field<double>(tp, "x"), field<double>(tp, "y"), field<double>(tp, "revenue")});
  }
  for (const Json& s : field<Json>(j, "trxs")) {
    net.trxs.push_back({field<int>(s, "id"), field<double>(s, "x"), field<double>(s, "y")});
  }
  net.fading = from_db_matrix(field<Json>(j, "fading_db"), net.num_tps(), net.num_trxs(), "fading_db");
  if (j.contains("population")) g.population = field<std::vector<double>>(j, "population");
  net.validate();

  const Json a = field<Json>(j, "jamming");
  JammingSkeleton& sk = g.skeleton;
  for (const Json& js : field<Json>(a, "jammers")) {
    sk.jammers.push_back({field<int>(js, "id"), field<double>(js, "x"), field<double>(js, "y"),
                          field<std::vector<double>>(js, "cost")});
  }
  for (const Json& p : field<Json>(a, "typology_power_dbm")) sk.typology_power_mw.push_back(from_db_field(p));
  sk.fading = from_db_matrix(field<Json>(a, "fading_db"), net.num_tps(), sk.jammers.size(), "jamming.fading_db");
  sk.profits = field<std::vector<double>>(a, "profits");
  sk.budget = field<double>(a, "budget");
  sk.estimate_noise = field<double>(a, "estimate_noise");
  sk.estimate_seed = field<std::uint64_t>(a, "estimate_seed");
  require(sk.profits.size() == net.num_tps(), "io: one profit per TP required");
  require(sk.budget > 0.0, "io: budget must be > 0");
  require(!sk.typology_power_mw.empty(), "io: need at least one typology");
  for (const JammerSite& js : sk.jammers) {
    require(js.cost.size() == sk.typology_power_mw.size(), "io: jammer cost vector size != |M|");
  }
  return g;
}

inline void save_instance(const std::filesystem::path& path, const GeneratedInstance& g) {
  write_atomic(path, dump(instance_to_json(g)));
}

inline GeneratedInstance load_instance(const std::filesystem::path& path) {
  return instance_from_json(parse_json(read_file(path), path.string()));
}

// ---------------------------------------------------------------------------
// Design

struct DesignDoc {
  NetworkDesign design;
  std::vector<double> estimates;  // attacker's balance estimates, mW, aligned with served
  std::string spap_status;
  double revenue = 0.0;
};

inline Json design_to_json(const DesignDoc& d) {
  Json j;
  j["format"] = "wnjam.design";
  j["version"] = kFormatVersion;
  j["units"] = {{"powers", "dBm"}, {"balances", "dBm"}, {"estimates", "dBm"}};
  j["powers_dbm"] = Json::array();
  for (double p : d.design.powers_mw) j["powers_dbm"].push_back(db_field(p));
  j["server"] = d.design.server;
  j["served"] = d.design.served;
  j["served_count"] = d.design.served.size();
  j["balances_dbm"] = Json::array();
  for (double b : d.design.balances) j["balances_dbm"].push_back(db_field(b));
  j["estimates_dbm"] = Json::array();
  for (double b : d.estimates) j["estimates_dbm"].push_back(db_field(b));
  j["spap_status"] = d.spap_status;
  j["revenue"] = d.revenue;
  return j;
}

inline DesignDoc design_from_json(const Json& j) {
  check_header(j, "wnjam.design");
  DesignDoc d;
  for (const Json& p : field<Json>(j, "powers_dbm")) d.design.powers_mw.push_back(from_db_field(p));
  d.design.server = field<std::vector<int>>(j, "server");
  d.design.served = field<std::vector<int>>(j, "served");
  for (const Json& b : field<Json>(j, "balances_dbm")) d.design.balances.push_back(from_db_field(b));
  for (const Json& b : field<Json>(j, "estimates_dbm")) d.estimates.push_back(from_db_field(b));
  d.spap_status = field<std::string>(j, "spap_status");
  d.revenue = field<double>(j, "revenue");
  require(d.design.balances.size() == d.design.served.size(), "io: balances misaligned with served set");
  require(d.estimates.size() == d.design.served.size(), "io: estimates misaligned with served set");
  return d;
}

inline void save_design(const std::filesystem::path& path, const DesignDoc& d) {
  write_atomic(path, dump(design_to_json(d)));
}

inline DesignDoc load_design(const std::filesystem::path& path) {
  return design_from_json(parse_json(read_file(path), path.string()));
}

// ---------------------------------------------------------------------------
// Plan

struct PlanDoc {
  std::string mode;            // "nominal" or "robust"
  std::vector<int> served;     // network TP index per row of `plan.claimed`
  std::vector<int> site_ids;   // jammer site id per entry of the activation
  JammingPlan plan;
  double objective = 0.0;
  double best_bound = 0.0;
  std::string status;
  int cuts = 0;
};

inline Json plan_to_json(const PlanDoc& p) {
  Json j;
  j["format"] = "wnjam.plan";
  j["version"] = kFormatVersion;
  j["mode"] = p.mode;
  j["status"] = p.status;
  j["objective"] = p.objective;
  j["best_bound"] = p.best_bound;
  j["cuts"] = p.cuts;
  j["typology"] = p.plan.activation.typology;
  j["site_ids"] = p.site_ids;
  j["served"] = p.served;
  j["jammed"] = Json::array();
  for (std::size_t r = 0; r < p.plan.claimed.size(); ++r) {
    if (p.plan.claimed[r]) j["jammed"].push_back(p.served.at(r));
  }
  return j;
}

inline PlanDoc plan_from_json(const Json& j) {
  check_header(j, "wnjam.plan");
  PlanDoc p;
  p.mode = field<std::string>(j, "mode");
  p.status = field<std::string>(j, "status");
  p.objective = field<double>(j, "objective");
  p.best_bound = field<double>(j, "best_bound");
  p.cuts = field<int>(j, "cuts");
  p.plan.activation.typology = field<std::vector<int>>(j, "typology");
  p.site_ids = field<std::vector<int>>(j, "site_ids");
  p.served = field<std::vector<int>>(j, "served");
  require(p.site_ids.size() == p.plan.activation.typology.size(), "io: site ids misaligned with typologies");
  const auto jammed = field<std::vector<int>>(j, "jammed");
  const std::set<int> set(jammed.begin(), jammed.end());
  p.plan.claimed.assign(p.served.size(), 0);
  std::size_t found = 0;
  for (std::size_t r = 0; r < p.served.size(); ++r) {
    if (set.count(p.served[r])) {
      p.plan.claimed[r] = 1;
      ++found;
    }
  }
  require(found == set.size(), "io: jammed TP outside the served set");
  return p;
}

inline void save_plan(const std::filesystem::path& path, const PlanDoc& p) { write_atomic(path, dump(plan_to_json(p))); }

inline PlanDoc load_plan(const std::filesystem::path& path) {
  return plan_from_json(parse_json(read_file(path), path.string()));
}

// ---------------------------------------------------------------------------
// Experiment spec

struct ExperimentRun {
  std::string id;
  GenParams gen;
  double band_frac = 0.2;
  int negative_bands = 2;
  int positive_bands = 2;
  BandBounds bounds = BandBounds::kSpread;
  SolveLimits design_limits{200, 60.0, 0.0};
  SolveLimits limits;
};

struct ExperimentSpec {
  std::vector<ExperimentRun> runs;
};

inline BandBounds parse_band_bounds(const std::string& s) {
  if (s == "spread") return BandBounds::kSpread;
  if (s == "unlimited") return BandBounds::kUnlimited;
  if (s == "none") return BandBounds::kNone;
  throw ValidationError("io: unknown band bound policy '" + s + "'");
}

// "N+P": N bands below and P above the nominal value.
inline std::pair<int, int> parse_band_counts(const std::string& s) {
  const auto plus = s.find('+');
  require(plus != std::string::npos, "io: band counts must look like N+P");
  try {
    std::size_t a = 0, b = 0;
    const int n = std::stoi(s.substr(0, plus), &a);
    const int p = std::stoi(s.substr(plus + 1), &b);
    require(a == plus && b == s.size() - plus - 1, "io: band counts must look like N+P");
    require(n >= 0 && p >= 0, "io: band counts must be >= 0");
    return {n, p};
  } catch (const std::logic_error&) {
    throw ValidationError("io: band counts must look like N+P");
  }
}

inline SolveLimits limits_from_json(const Json& j, SolveLimits lim) {
  if (j.contains("node_limit")) lim.node_limit = field<std::int64_t>(j, "node_limit");
  if (j.contains("time_limit")) lim.time_limit_seconds = field<double>(j, "time_limit");
  if (j.contains("gap")) lim.relative_gap = field<double>(j, "gap");
  return lim;
}

inline ExperimentSpec experiment_from_json(const Json& j) {
  check_header(j, "wnjam.experiment");
  ExperimentSpec spec;
  std::set<std::uint64_t> seeds;
  std::set<std::string> ids;
  for (const Json& r : field<Json>(j, "runs")) {
    ExperimentRun run;
    run.id = field<std::string>(r, "id");
    GenParams& g = run.gen;
    g.seed = field<std::uint64_t>(r, "seed");
    if (r.contains("tps")) g.n_tps = field<int>(r, "tps");
    if (r.contains("trxs")) g.n_trxs = field<int>(r, "trxs");
    if (r.contains("jammers")) g.n_jammers = field<int>(r, "jammers");
    if (r.contains("typologies_dbm")) g.typology_dbm = field<std::vector<double>>(r, "typologies_dbm");
    if (r.contains("typology_costs")) g.typology_base_cost = field<std::vector<double>>(r, "typology_costs");
    if (r.contains("budget_frac")) g.budget_frac = field<double>(r, "budget_frac");
    if (r.contains("band_frac")) run.band_frac = field<double>(r, "band_frac");
    if (r.contains("bands")) std::tie(run.negative_bands, run.positive_bands) = parse_band_counts(field<std::string>(r, "bands"));
    if (r.contains("bounds")) run.bounds = parse_band_bounds(field<std::string>(r, "bounds"));
    if (r.contains("design_limits")) run.design_limits = limits_from_json(r["design_limits"], run.design_limits);
    if (r.contains("limits")) run.limits = limits_from_json(r["limits"], run.limits);
    g.validate();
    require(run.band_frac > 0.0 && run.band_frac < 1.0, "io: band_frac must lie in (0,1)");
    require(seeds.insert(g.seed).second, "io: seeds must be unique per run");
    require(ids.insert(run.id).second, "io: run ids must be unique");
    spec.runs.push_back(std::move(run));
  }
  require(!spec.runs.empty(), "io: experiment has no runs");
  return spec;
}

inline ExperimentSpec load_experiment(const std::filesystem::path& path) {
  return experiment_from_json(parse_json(read_file(path), path.string()));
}

// ---------------------------------------------------------------------------
// CSV report

struct ReportRow {
  std::string id;
  int tps = 0;
  int trxs = 0;
  int served = 0;
  int jammers = 0;
  std::optional<int> jam_nominal;
  std::optional<int> jam_robust;
  std::optional<double> por_percent;
  int cuts = 0;
  double wall_seconds = 0.0;
};

inline std::string csv_header() { return "ID,|T|,|S|,|T*|,|J|,#JAM(Nom),#JAM(Rob),PoR%,#Cuts,wall-seconds"; }

inline std::string to_csv(const ReportRow& r) {
  auto opt_int = [](const std::optional<int>& v) { return v ? std::to_string(*v) : std::string(); };
  char por[32] = "";
  if (r.por_percent) std::snprintf(por, sizeof por, "%.2f", *r.por_percent);
  char wall[32];
  std::snprintf(wall, sizeof wall, "%.3f", r.wall_seconds);
  return r.id + "," + std::to_string(r.tps) + "," + std::to_string(r.trxs) + "," + std::to_string(r.served) + "," +
         std::to_string(r.jammers) + "," + opt_int(r.jam_nominal) + "," + opt_int(r.jam_robust) + "," + por + "," +
         std::to_string(r.cuts) + "," + wall;
}

}  // namespace wnjam
