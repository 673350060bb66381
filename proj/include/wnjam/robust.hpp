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

// Robust jamming under RHS-multiband uncertainty: separation of the worst
// deviation for an incumbent, robustness cuts, the cutting-plane solve, an
// independent robustness audit and a brute-force reference solver for tiny
// instances.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "wnjam/common.hpp"
#include "wnjam/formulate.hpp"
#include "wnjam/milp.hpp"
#include "wnjam/multiband.hpp"
#include "wnjam/netmodel.hpp"

namespace wnjam {

inline constexpr int kNoBand = std::numeric_limits<int>::min();

enum class CutRule {
  // sum_{t in D*} z_t <= V - 1
  kUnlifted,
  // sum_{t in D*} z_t <= V - 1 + sum_{(j,m) in U} y_jm, where U holds the
  // devices that could raise the jamming power received by some t in D*.
  kLifted,
  // z_t <= sum_{(j,m) in U_t} y_jm for every t in D*, with U_t the devices
  // that could raise the jamming power received by t.
  kPerTp,
};

inline std::string to_string(CutRule r) {
  switch (r) {
    case CutRule::kUnlifted: return "unlifted";
    case CutRule::kLifted: return "lifted";
    case CutRule::kPerTp: return "per-tp";
  }
  return "?";
}

inline CutRule parse_cut_rule(const std::string& s) {
  if (s == "unlifted") return CutRule::kUnlifted;
  if (s == "lifted") return CutRule::kLifted;
  if (s == "per-tp") return CutRule::kPerTp;
  throw ValidationError("unknown cut rule '" + s + "' (expected per-tp, lifted or unlifted)");
}

// A robustness cut in domain terms; `to_cut` maps it onto NJP columns.
struct RobustnessCut {
  std::vector<int> tps;                      // D*
  std::vector<std::pair<int, int>> devices;  // (j, m) lifting terms
  int rhs = 0;                               // V - 1
};

inline Cut to_cut(const RobustnessCut& rc, const NjpFormulation& f) {
  Cut c;
  c.name = "robust";
  c.sense = RowSense::kLessEqual;
  c.rhs = rc.rhs;
  for (int t : rc.tps) c.terms.push_back({f.z[static_cast<std::size_t>(t)], 1.0});
  for (const auto& [j, m] : rc.devices) {
    c.terms.push_back({f.y[static_cast<std::size_t>(j)][static_cast<std::size_t>(m)], -1.0});
  }
  return c;
}

inline bool cut_violated_by(const RobustnessCut& rc, const JammingPlan& plan) {
  int lhs = 0;
  for (int t : rc.tps) lhs += plan.claimed[static_cast<std::size_t>(t)] ? 1 : 0;
  for (const auto& [j, m] : rc.devices) lhs -= plan.activation.typology[static_cast<std::size_t>(j)] == m ? 1 : 0;
  return lhs > rc.rhs;
}

inline RobustnessCut make_cut(std::span<const int> denied, const JammingPlan& incumbent, const JammingInstance& ji,
                              CutRule rule) {
  RobustnessCut rc;
  rc.tps.assign(denied.begin(), denied.end());
  rc.rhs = static_cast<int>(denied.size()) - 1;
  if (rule == CutRule::kUnlifted) return rc;
  for (std::size_t j = 0; j < ji.num_jammers(); ++j) {
    bool reaches = false;
    for (int t : denied) reaches = reaches || ji.fading(static_cast<std::size_t>(t), j) > 0.0;
    if (!reaches) continue;
    const int current = incumbent.activation.typology[j];
    // Same or weaker devices at j cannot add jamming power.
    for (std::size_t m = 0; m < ji.num_typologies(); ++m) {
      if (current != kNoDevice && static_cast<int>(m) <= current) continue;
      rc.devices.emplace_back(static_cast<int>(j), static_cast<int>(m));
    }
  }
  return rc;
}

// The cuts `rule` derives from the denied set: one per denied TP for kPerTp,
// a single aggregated cut otherwise.
inline std::vector<RobustnessCut> make_cuts(std::span<const int> denied, const JammingPlan& incumbent,
                                            const JammingInstance& ji, CutRule rule) {
  if (rule != CutRule::kPerTp) return {make_cut(denied, incumbent, ji, rule)};
  std::vector<RobustnessCut> out;
  for (int t : denied) out.push_back(make_cut(std::span<const int>(&t, 1), incumbent, ji, CutRule::kLifted));
  return out;
}

inline std::vector<Cut> to_cuts(const std::vector<RobustnessCut>& rcs, const NjpFormulation& f) {
  std::vector<Cut> out;
  for (const RobustnessCut& rc : rcs) out.push_back(to_cut(rc, f));
  return out;
}

// ---------------------------------------------------------------------------
// Separation

struct SeparationResult {
  int value = 0;                // V
  std::vector<char> denied;     // v*_t per TP row
  std::vector<int> band;        // w*: band index per TP row, kNoBand when none
  std::vector<int> denied_tps;  // rows with v*_t = 1, increasing
  std::int64_t nodes = 0;
  bool proven = true;           // false when the SEP solve hit a limit
};

struct SeparateOptions {
  SepScope scope = SepScope::kClaimed;
  SolveLimits limits;
};

inline SeparationResult separate(const JammingPlan& incumbent, const JammingInstance& ji, const MultibandSet& mb,
                                 const SeparateOptions& opt = {}) {
  const SepFormulation f = build_sep(incumbent, ji, mb, opt.scope);
  SeparationResult r;
  r.denied.assign(ji.num_tps(), 0);
  r.band.assign(ji.num_tps(), kNoBand);
  const MilpSolution s = bb_solve(f.model, {}, opt.limits);
  r.nodes = s.nodes;
  r.proven = s.status == MilpStatus::kOptimal;
  if (!s.has_incumbent) {
    if (s.status == MilpStatus::kInfeasible) throw SolverError("separate: SEP infeasible");
    return r;
  }
  for (std::size_t i = 0; i < f.scope.size(); ++i) {
    const auto t = static_cast<std::size_t>(f.scope[i]);
    for (int k = mb.k_minus(); k <= mb.k_plus(); ++k) {
      if (s.values[static_cast<std::size_t>(f.w[i][mb.column(k)])] > 0.5) r.band[t] = k;
    }
  }
  for (std::size_t i = 0; i < f.scope.size(); ++i) {
    if (f.v[i] < 0 || s.values[static_cast<std::size_t>(f.v[i])] < 0.5) continue;
    const auto t = static_cast<std::size_t>(f.scope[i]);
    // Keep only denials that hold exactly, not just within LP tolerance.
    const double d = r.band[t] == kNoBand ? 0.0 : mb.offset(t, r.band[t]);
    if (d >= denial_threshold(t, f.jam[t], ji)) {
      r.denied[t] = 1;
      r.denied_tps.push_back(static_cast<int>(t));
    }
  }
  r.value = static_cast<int>(r.denied_tps.size());
  return r;
}

// ---------------------------------------------------------------------------
// Audit

struct AuditResult {
  bool robust = true;
  int max_denied = 0;
  std::vector<int> band;        // witness deviation per TP row (kNoBand = none)
  std::vector<int> denied_tps;  // TPs the witness denies
  std::string method;           // "enumeration" or "sep"
};

namespace detail {

// Maximum number of claimed TPs denied over all band assignments, by dynamic
// programming over (TP, band-count vector). Returns nullopt if the state space
// exceeds `max_states`.
inline std::optional<AuditResult> enumerate_adversary(const JammingPlan& plan, const JammingInstance& ji,
                                                      const MultibandSet& mb, SepScope scope,
                                                      std::int64_t max_states) {
  std::vector<std::size_t> items;
  for (std::size_t t = 0; t < ji.num_tps(); ++t) {
    if (scope == SepScope::kServed || plan.claimed[t]) items.push_back(t);
  }
  const int n = static_cast<int>(items.size());
  const std::vector<int> lower = relaxed_lower_bounds(mb, n);
  // Only bands whose bounds can bind need a counter.
  std::vector<int> tracked_slot(static_cast<std::size_t>(mb.num_bands()), -1);
  std::vector<int> cap;
  std::vector<int> need;
  std::int64_t states = 1;
  for (int k = mb.k_minus(); k <= mb.k_plus(); ++k) {
    const std::size_t c = mb.column(k);
    if (mb.upper(k) >= n && lower[c] == 0) continue;
    tracked_slot[c] = static_cast<int>(cap.size());
    cap.push_back(std::min(mb.upper(k), n));
    need.push_back(lower[c]);
    states *= cap.back() + 1;
    if (states * (n + 1) > max_states) return std::nullopt;
  }
  if (states * (n + 1) > max_states) return std::nullopt;
  std::vector<std::int64_t> radix(cap.size(), 1);
  for (std::size_t i = 1; i < cap.size(); ++i) radix[i] = radix[i - 1] * (cap[i - 1] + 1);
  auto count_of = [&](std::int64_t code, std::size_t slot) {
    return static_cast<int>((code / radix[slot]) % (cap[slot] + 1));
  };

  // Denial flag per (item, option); option 0 is "no band", option 1+c is band column c.
  const int nb = mb.num_bands();
  std::vector<std::vector<char>> denies(static_cast<std::size_t>(n), std::vector<char>(static_cast<std::size_t>(nb + 1), 0));
  for (int i = 0; i < n; ++i) {
    const std::size_t t = items[static_cast<std::size_t>(i)];
    if (!plan.claimed[t]) continue;
    const double rhs = denial_threshold(t, jam_power(t, plan.activation, ji), ji);
    denies[static_cast<std::size_t>(i)][0] = 0.0 >= rhs;
    for (int k = mb.k_minus(); k <= mb.k_plus(); ++k) {
      denies[static_cast<std::size_t>(i)][1 + mb.column(k)] = mb.offset(t, k) >= rhs;
    }
  }

  constexpr int kDead = -1;
  const std::int64_t width = states;
  std::vector<int> value(static_cast<std::size_t>((n + 1) * width), kDead);
  std::vector<signed char> choice(static_cast<std::size_t>(n * width), -1);
  for (std::int64_t code = 0; code < width; ++code) {
    bool ok = true;
    for (std::size_t slot = 0; slot < cap.size(); ++slot) ok = ok && count_of(code, slot) >= need[slot];
    value[static_cast<std::size_t>(n * width + code)] = ok ? 0 : kDead;
  }
  for (int i = n - 1; i >= 0; --i) {
    for (std::int64_t code = 0; code < width; ++code) {
      int best = kDead;
      signed char arg = -1;
      for (int opt = 0; opt <= nb; ++opt) {
        std::int64_t next = code;
        if (opt > 0) {
          const int slot = tracked_slot[static_cast<std::size_t>(opt - 1)];
          if (slot >= 0) {
            const auto s = static_cast<std::size_t>(slot);
            if (count_of(code, s) >= cap[s]) continue;
            next += radix[s];
          }
        }
        const int tail = value[static_cast<std::size_t>((i + 1) * width + next)];
        if (tail == kDead) continue;
        const int v = tail + denies[static_cast<std::size_t>(i)][static_cast<std::size_t>(opt)];
        if (v > best) {
          best = v;
          arg = static_cast<signed char>(opt);
        }
      }
      value[static_cast<std::size_t>(i * width + code)] = best;
      choice[static_cast<std::size_t>(i * width + code)] = arg;
    }
  }

  AuditResult out;
  out.method = "enumeration";
  out.band.assign(ji.num_tps(), kNoBand);
  const int root = value[0];
  if (root == kDead) throw ValidationError("audit: no band assignment satisfies the band bounds");
  out.max_denied = root;
  std::int64_t code = 0;
  for (int i = 0; i < n; ++i) {
    const int opt = choice[static_cast<std::size_t>(i * width + code)];
    const std::size_t t = items[static_cast<std::size_t>(i)];
    if (opt > 0) {
      out.band[t] = mb.k_minus() + (opt - 1);
      const int slot = tracked_slot[static_cast<std::size_t>(opt - 1)];
      if (slot >= 0) code += radix[static_cast<std::size_t>(slot)];
    }
    if (denies[static_cast<std::size_t>(i)][static_cast<std::size_t>(opt)]) out.denied_tps.push_back(static_cast<int>(t));
  }
  out.robust = out.max_denied == 0;
  return out;
}

}  // namespace detail

// Checks that no deviation allowed by `mb` denies any claimed TP of `plan`.
// Exhaustive (dynamic programming over band counts) when the state space is
// at most `max_states`, otherwise by solving SEP.
inline AuditResult audit_robust(const JammingPlan& plan, const JammingInstance& ji, const MultibandSet& mb,
                                SepScope scope = SepScope::kClaimed, std::int64_t max_states = 1'000'000) {
  require(plan.claimed.size() == ji.num_tps(), "audit: plan size != |T'|");
  if (auto r = detail::enumerate_adversary(plan, ji, mb, scope, max_states)) return *r;
  SeparateOptions opt;
  opt.scope = scope;
  const SeparationResult s = separate(plan, ji, mb, opt);
  AuditResult out;
  out.method = "sep";
  out.max_denied = s.value;
  out.robust = s.value == 0;
  out.band = s.band;
  out.denied_tps = s.denied_tps;
  return out;
}

// ---------------------------------------------------------------------------
// Nominal and robust solves

struct JamSolve {
  MilpStatus status = MilpStatus::kInfeasible;
  JammingPlan plan;
  double objective = 0.0;
  double best_bound = 0.0;
  int jammed = 0;
  std::int64_t nodes = 0;
  int cuts = 0;
};

struct IterationLog {
  double candidate_objective = 0.0;
  int value = 0;  // V
  std::vector<int> denied_tps;
  bool proven = true;
};

struct RobustOptions {
  CutRule cut_rule = CutRule::kPerTp;
  SepScope scope = SepScope::kClaimed;
  SolveLimits limits;
  SolveLimits sep_limits;
  // Called after each separation with the incumbent and the SEP result.
  std::function<void(const JammingPlan&, const SeparationResult&)> observer;
  bool solve_nominal = true;
};

struct RobustRunReport {
  JamSolve nominal;
  JamSolve robust;
  double por_percent = 0.0;
  int cuts = 0;
  double wall_seconds = 0.0;
  std::vector<IterationLog> log;
  AuditResult audit;
  bool limit_reached = false;
};

namespace detail {

// Claimed TPs that miss the strict jamming condition only by solver tolerance.
inline std::vector<int> not_strictly_jammed(const JammingPlan& plan, const JammingInstance& ji) {
  std::vector<int> out;
  for (std::size_t t = 0; t < ji.num_tps(); ++t) {
    if (plan.claimed[t] && !is_jammed(t, plan.activation, ji.nominal_balance[t], ji)) {
      out.push_back(static_cast<int>(t));
    }
  }
  return out;
}

inline JamSolve finish(const MilpSolution& s, const NjpFormulation& f, std::size_t num_jammers) {
  JamSolve out;
  out.status = s.status;
  out.nodes = s.nodes;
  out.cuts = s.cuts_added;
  out.best_bound = s.best_bound;
  if (s.has_incumbent) {
    out.plan = extract_plan(f, s.values);
    out.objective = s.objective;
  } else {
    out.plan.activation = Activation::none(num_jammers);
    out.plan.claimed.assign(f.z.size(), 0);
  }
  out.jammed = static_cast<int>(out.plan.claimed_count());
  return out;
}

// Greedy plan against per-TP `required` balances: devices in decreasing order
// of `weight` (an LP point's y values, if given) go in while the budget
// allows, then the best profit-per-cost device or upgrade is added until none
// gains. Claims every TP jammed against its required balance.
inline JammingPlan greedy_plan(const JammingInstance& ji, std::span<const double> required,
                               const std::vector<std::vector<double>>* weight = nullptr) {
  const std::size_t nt = ji.num_tps(), nj = ji.num_jammers(), nm = ji.num_typologies();
  Activation act = Activation::none(nj);
  std::vector<double> jam(nt, 0.0);
  double spent = 0.0;
  auto cost_of = [&](std::size_t j, int m) { return m == kNoDevice ? 0.0 : ji.jammers[j].cost[static_cast<std::size_t>(m)]; };
  auto power_of = [&](int m) { return m == kNoDevice ? 0.0 : ji.typology_power_mw[static_cast<std::size_t>(m)]; };
  auto set = [&](std::size_t j, int m) {
    const double dp = power_of(m) - power_of(act.typology[j]);
    for (std::size_t t = 0; t < nt; ++t) jam[t] += ji.sir_threshold * ji.fading(t, j) * dp;
    spent += cost_of(j, m) - cost_of(j, act.typology[j]);
    act.typology[j] = m;
  };
  auto jammed = [&](std::size_t t, double level) { return level >= required[t] + ji.epsilon; };
  const double cap = ji.budget * (1.0 + 1e-9);

  if (weight) {
    std::vector<std::tuple<double, std::size_t, int>> order;
    for (std::size_t j = 0; j < nj; ++j) {
      for (std::size_t m = 0; m < nm; ++m) {
        const double w = (*weight)[j][m];
        if (w > 1e-6) order.emplace_back(-w, j, static_cast<int>(m));
      }
    }
    std::sort(order.begin(), order.end());
    for (const auto& [w, j, m] : order) {
      if (act.active(j) || spent + cost_of(j, m) > cap) continue;
      set(j, m);
    }
  }
  for (;;) {
    double best_ratio = 0.0;
    std::size_t best_j = 0;
    int best_m = kNoDevice;
    for (std::size_t j = 0; j < nj; ++j) {
      for (int m = act.typology[j] + 1; m < static_cast<int>(nm); ++m) {
        const double dc = cost_of(j, m) - cost_of(j, act.typology[j]);
        if (spent + dc > cap) break;
        const double dp = ji.sir_threshold * (power_of(m) - power_of(act.typology[j]));
        double gain = 0.0;
        for (std::size_t t = 0; t < nt; ++t) {
          if (!jammed(t, jam[t]) && jammed(t, jam[t] + ji.fading(t, j) * dp)) gain += ji.profits[t];
        }
        if (gain > 0.0 && gain / dc > best_ratio) {
          best_ratio = gain / dc;
          best_j = j;
          best_m = m;
        }
      }
    }
    if (best_m == kNoDevice) break;
    set(best_j, best_m);
  }
  JammingPlan plan{act, std::vector<char>(nt, 0)};
  for (std::size_t t = 0; t < nt; ++t) {
    plan.claimed[t] = is_jammed(t, act, required[t], ji) ? 1 : 0;
  }
  return plan;
}

// Lowers each device, site by site, to the cheapest setting under which
// `keeps` still accepts the plan. The claimed set is left unchanged.
template <class Pred>
JammingPlan trim_plan(JammingPlan plan, const JammingInstance& ji, Pred keeps) {
  for (std::size_t j = 0; j < ji.num_jammers(); ++j) {
    const int current = plan.activation.typology[j];
    for (int m = kNoDevice; m < current; ++m) {
      plan.activation.typology[j] = m;
      if (keeps(plan)) break;
      plan.activation.typology[j] = current;
    }
  }
  return plan;
}

// A greedy start against `required`, and greedy candidates against it guided
// by the LP point at search nodes.
inline SearchHints njp_hints(const NjpFormulation& f, const JammingInstance& ji, std::vector<double> required) {
  SearchHints h;
  h.starts.push_back(plan_to_values(f, greedy_plan(ji, required)));
  h.heuristic = [&f, &ji, required = std::move(required)](std::span<const double> x) {
    std::vector<std::vector<double>> w(f.y.size());
    for (std::size_t j = 0; j < f.y.size(); ++j) {
      for (int col : f.y[j]) w[j].push_back(x[static_cast<std::size_t>(col)]);
    }
    return std::vector<std::vector<double>>{plan_to_values(f, greedy_plan(ji, required, &w))};
  };
  return h;
}

// Unclaims denied TPs until separation finds no denial, which leaves a robust
// sub-plan with the same devices.
inline JammingPlan robust_subplan(JammingPlan plan, const JammingInstance& ji, const MultibandSet& mb,
                                  const SeparateOptions& sopt) {
  for (;;) {
    const SeparationResult sep = separate(plan, ji, mb, sopt);
    if (sep.value == 0 || !sep.proven) return sep.value == 0 ? plan : JammingPlan{};
    for (int t : sep.denied_tps) plan.claimed[static_cast<std::size_t>(t)] = 0;
  }
}

}  // namespace detail

// NJP-01 with the nominal balances. Candidates that satisfy the jamming rows
// only within LP tolerance are cut off so the plan meets the strict condition.
inline JamSolve solve_nominal(const JammingInstance& ji, const SolveLimits& limits = {}) {
  const NjpFormulation f = build_njp(ji);
  const MilpSolution s = bb_solve(
      f.model,
      [&](std::span<const double> x) -> std::vector<Cut> {
        const JammingPlan plan = extract_plan(f, x);
        const std::vector<int> short_tps = detail::not_strictly_jammed(plan, ji);
        return to_cuts(make_cuts(short_tps, plan, ji, CutRule::kPerTp), f);
      },
      limits, detail::njp_hints(f, ji, ji.nominal_balance));
  JamSolve out = detail::finish(s, f, ji.num_jammers());
  out.plan = detail::trim_plan(out.plan, ji, [&](const JammingPlan& p) {
    return detail::not_strictly_jammed(p, ji).empty();
  });
  return out;
}

inline double price_of_robustness(int nominal_jammed, int robust_jammed) {
  if (nominal_jammed == 0) return 0.0;
  return 100.0 * (robust_jammed - nominal_jammed) / nominal_jammed;
}

// Robust cutting planes: NJP-01 with robust big-M, separating every integral
// candidate and cutting it off while some deviation denies a claimed TP.
inline RobustRunReport solve_robust(const JammingInstance& ji, const MultibandSet& mb,
                                    const RobustOptions& opt = {}) {
  mb.validate();
  const auto start = std::chrono::steady_clock::now();
  RobustRunReport rep;
  if (opt.solve_nominal) rep.nominal = solve_nominal(ji, opt.limits);

  const NjpFormulation f = build_njp(ji, &mb);
  std::vector<double> worst_case(ji.num_tps());
  for (std::size_t t = 0; t < ji.num_tps(); ++t) worst_case[t] = ji.nominal_balance[t] + mb.worst_positive(t);
  // Worst-case greedy plans are robust by construction and keep an incumbent
  // at hand; the nominal plans tried first go through separation.
  SearchHints hints = detail::njp_hints(f, ji, worst_case);
  hints.starts.insert(hints.starts.begin(), plan_to_values(f, detail::greedy_plan(ji, ji.nominal_balance)));
  if (opt.solve_nominal && rep.nominal.status != MilpStatus::kInfeasible) {
    hints.starts.insert(hints.starts.begin(), plan_to_values(f, rep.nominal.plan));
  }
  SeparateOptions sopt;
  sopt.scope = opt.scope;
  sopt.limits = opt.sep_limits;
  // Robust sub-plans of the nominal plans as extra incumbents.
  const std::size_t nominal_starts = hints.starts.size() - 1;
  for (std::size_t i = 0; i < nominal_starts; ++i) {
    const JammingPlan sub = detail::robust_subplan(extract_plan(f, hints.starts[i]), ji, mb, sopt);
    if (!sub.claimed.empty()) hints.starts.push_back(plan_to_values(f, sub));
  }
  const MilpSolution s = bb_solve(
      f.model,
      [&](std::span<const double> x) -> std::vector<Cut> {
        const JammingPlan plan = extract_plan(f, x);
        const SeparationResult sep = separate(plan, ji, mb, sopt);
        if (opt.observer) opt.observer(plan, sep);
        rep.log.push_back({f.model.objective_value(x), sep.value, sep.denied_tps, sep.proven});
        if (sep.value == 0) return {};
        return to_cuts(make_cuts(sep.denied_tps, plan, ji, opt.cut_rule), f);
      },
      opt.limits, hints);
  rep.robust = detail::finish(s, f, ji.num_jammers());
  rep.robust.plan = detail::trim_plan(rep.robust.plan, ji, [&](const JammingPlan& p) {
    return detail::not_strictly_jammed(p, ji).empty() && audit_robust(p, ji, mb, opt.scope).robust;
  });
  rep.cuts = s.cuts_added;
  rep.audit = audit_robust(rep.robust.plan, ji, mb, opt.scope);
  rep.limit_reached = rep.robust.status == MilpStatus::kBudgetLimit ||
                      (opt.solve_nominal && rep.nominal.status == MilpStatus::kBudgetLimit);
  if (opt.solve_nominal) rep.por_percent = price_of_robustness(rep.nominal.jammed, rep.robust.jammed);
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

// ---------------------------------------------------------------------------
// Brute-force reference

struct OracleResult {
  double objective = 0.0;
  JammingPlan plan;
  std::int64_t activations = 0;  // budget-feasible activations examined
};

// Best robust plan by enumerating every activation and every subset of the
// TPs it jams nominally. Only for tiny instances.
inline OracleResult oracle_robust(const JammingInstance& ji, const MultibandSet& mb,
                                  SepScope scope = SepScope::kClaimed) {
  ji.validate();
  mb.validate();
  if (ji.num_jammers() > 5 || ji.num_tps() > 8 || ji.num_typologies() > 2 || mb.num_bands() > 5) {
    throw ValidationError("oracle_robust: instance exceeds |J|<=5, |T'|<=8, |M|<=2, K<=5");
  }
  const std::size_t nj = ji.num_jammers(), nt = ji.num_tps();
  const int base = static_cast<int>(ji.num_typologies()) + 1;
  std::int64_t total = 1;
  for (std::size_t j = 0; j < nj; ++j) total *= base;

  OracleResult best;
  best.plan.activation = Activation::none(nj);
  best.plan.claimed.assign(nt, 0);
  bool have = false;
  for (std::int64_t code = 0; code < total; ++code) {
    Activation act = Activation::none(nj);
    std::int64_t c = code;
    for (std::size_t j = 0; j < nj; ++j) {
      act.typology[j] = static_cast<int>(c % base) - 1;
      c /= base;
    }
    if (activation_cost(act, ji) > ji.budget * (1.0 + 1e-9)) continue;
    ++best.activations;
    std::vector<int> jammed;
    double reach = 0.0;
    for (std::size_t t = 0; t < nt; ++t) {
      if (is_jammed(t, act, ji.nominal_balance[t], ji)) {
        jammed.push_back(static_cast<int>(t));
        reach += ji.profits[t];
      }
    }
    if (have && reach <= best.objective) continue;
    // Subsets of the nominally jammed TPs, most profitable first.
    const std::uint32_t subsets = 1U << jammed.size();
    std::vector<std::pair<double, std::uint32_t>> order;
    for (std::uint32_t mask = 0; mask < subsets; ++mask) {
      double p = 0.0;
      for (std::size_t i = 0; i < jammed.size(); ++i) {
        if (mask >> i & 1U) p += ji.profits[static_cast<std::size_t>(jammed[i])];
      }
      order.emplace_back(p, mask);
    }
    std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (const auto& [profit, mask] : order) {
      if (have && profit <= best.objective) break;
      JammingPlan plan{act, std::vector<char>(nt, 0)};
      for (std::size_t i = 0; i < jammed.size(); ++i) {
        if (mask >> i & 1U) plan.claimed[static_cast<std::size_t>(jammed[i])] = 1;
      }
      if (!audit_robust(plan, ji, mb, scope).robust) continue;
      best.objective = profit;
      best.plan = plan;
      have = true;
      break;
    }
  }
  return best;
}

}  // namespace wnjam
