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

// Model builders: power assignment (SPAP), nominal/robust jamming (NJP) and
// the adversarial separation problem (SEP). Every big-M is the smallest
// constant that makes its row vacuous when the indicator is off.

#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "wnjam/common.hpp"
#include "wnjam/model.hpp"
#include "wnjam/multiband.hpp"
#include "wnjam/netmodel.hpp"

namespace wnjam {

// ---------------------------------------------------------------------------
// SPAP

inline double big_m_spap(std::size_t t, std::size_t s, const NetworkInstance& net) {
  double interf = 0.0;
  for (std::size_t sigma = 0; sigma < net.num_trxs(); ++sigma) {
    if (sigma != s) interf += net.fading.at(t, sigma);
  }
  return net.sir_threshold * net.noise_mw + net.sir_threshold * interf * net.p_trx_max_mw;
}

struct SpapOptions {
  // Skip (t,s) pairs that cannot meet the threshold even without interference.
  bool prune_unservable = true;
  // Keep only the strongest `max_servers` candidate servers per TP (0 = all).
  int max_servers = 0;
};

struct SpapFormulation {
  MilpModel model;
  std::vector<int> power;  // column of p_s
  struct Pair {
    int tp, trx, col;
  };
  std::vector<Pair> assign;  // x_ts columns
};

inline SpapFormulation build_spap(const NetworkInstance& net, const SpapOptions& opt = {}) {
  net.validate();
  SpapFormulation f;
  MilpModel& m = f.model;
  m.set_objective_sense(ObjectiveSense::kMaximize);
  const double delta = net.sir_threshold;
  for (std::size_t s = 0; s < net.num_trxs(); ++s) {
    f.power.push_back(m.add_continuous("p_" + std::to_string(s), 0.0, net.p_trx_max_mw, {"p", static_cast<int>(s)}));
  }
  for (std::size_t t = 0; t < net.num_tps(); ++t) {
    std::vector<std::size_t> cand;
    for (std::size_t s = 0; s < net.num_trxs(); ++s) {
      if (opt.prune_unservable && net.fading(t, s) * net.p_trx_max_mw < delta * net.noise_mw) continue;
      cand.push_back(s);
    }
    if (opt.max_servers > 0 && cand.size() > static_cast<std::size_t>(opt.max_servers)) {
      std::stable_sort(cand.begin(), cand.end(),
                       [&](std::size_t a, std::size_t b) { return net.fading(t, a) > net.fading(t, b); });
      cand.resize(static_cast<std::size_t>(opt.max_servers));
      std::sort(cand.begin(), cand.end());
    }
    Constraint gub{"gub_" + std::to_string(t), {}, RowSense::kLessEqual, 1.0};
    for (std::size_t s : cand) {
      const int x = m.add_binary("x_" + std::to_string(t) + "_" + std::to_string(s),
                                 {"x", static_cast<int>(t), static_cast<int>(s)});
      m.set_objective_coef(x, net.testpoints[t].revenue);
      f.assign.push_back({static_cast<int>(t), static_cast<int>(s), x});
      gub.terms.push_back({x, 1.0});
    }
    if (!gub.terms.empty()) m.add_row(std::move(gub));
  }
  // a_ts p_s - delta sum_{sigma != s} a_tsigma p_sigma + M (1 - x_ts) >= delta N
  for (const auto& pr : f.assign) {
    const auto t = static_cast<std::size_t>(pr.tp);
    const auto s = static_cast<std::size_t>(pr.trx);
    const double bigm = big_m_spap(t, s, net);
    Constraint row{"sir_" + std::to_string(t) + "_" + std::to_string(s), {}, RowSense::kGreaterEqual,
                   delta * net.noise_mw - bigm};
    for (std::size_t sigma = 0; sigma < net.num_trxs(); ++sigma) {
      const double a = net.fading(t, sigma);
      if (a == 0.0) continue;
      row.terms.push_back({f.power[sigma], sigma == s ? a : -delta * a});
    }
    row.terms.push_back({pr.col, -bigm});
    m.add_row(std::move(row));
  }
  return f;
}

// ---------------------------------------------------------------------------
// NJP

// Without `mb` the nominal constant max(0, balance + eps); with `mb` the
// worst positive deviation is added so the row stays deactivatable.
inline double big_m_njp(std::size_t t, const JammingInstance& ji, const MultibandSet* mb = nullptr) {
  double rhs = ji.nominal_balance.at(t) + ji.epsilon;
  if (mb) rhs += mb->worst_positive(t);
  return std::max(0.0, rhs);
}

struct NjpFormulation {
  MilpModel model;
  std::vector<int> z;               // per TP row
  std::vector<std::vector<int>> y;  // [j][m]
};

inline NjpFormulation build_njp(const JammingInstance& ji, const MultibandSet* mb = nullptr) {
  ji.validate();
  if (mb) require(mb->num_tps() == ji.num_tps(), "build_njp: multiband set size != |T'|");
  NjpFormulation f;
  MilpModel& m = f.model;
  m.set_objective_sense(ObjectiveSense::kMaximize);
  const std::size_t nt = ji.num_tps(), nj = ji.num_jammers(), nm = ji.num_typologies();
  for (std::size_t t = 0; t < nt; ++t) {
    f.z.push_back(m.add_binary("z_" + std::to_string(t), {"z", static_cast<int>(t)}));
    m.set_objective_coef(f.z.back(), ji.profits[t]);
  }
  f.y.assign(nj, {});
  for (std::size_t j = 0; j < nj; ++j) {
    for (std::size_t mm = 0; mm < nm; ++mm) {
      f.y[j].push_back(m.add_binary("y_" + std::to_string(j) + "_" + std::to_string(mm),
                                    {"y", static_cast<int>(j), static_cast<int>(mm)}));
    }
  }
  // delta sum_jm a_tj P^m y_jm + M_t (1 - z_t) >= balance_t + eps
  for (std::size_t t = 0; t < nt; ++t) {
    const double bigm = big_m_njp(t, ji, mb);
    Constraint row{"jam_" + std::to_string(t), {}, RowSense::kGreaterEqual,
                   ji.nominal_balance[t] + ji.epsilon - bigm};
    for (std::size_t j = 0; j < nj; ++j) {
      if (ji.fading(t, j) == 0.0) continue;
      for (std::size_t mm = 0; mm < nm; ++mm) {
        row.terms.push_back({f.y[j][mm], ji.sir_threshold * ji.fading(t, j) * ji.typology_power_mw[mm]});
      }
    }
    row.terms.push_back({f.z[t], -bigm});
    m.add_row(std::move(row));
  }
  Constraint budget{"budget", {}, RowSense::kLessEqual, ji.budget};
  for (std::size_t j = 0; j < nj; ++j) {
    for (std::size_t mm = 0; mm < nm; ++mm) budget.terms.push_back({f.y[j][mm], ji.jammers[j].cost[mm]});
  }
  if (!budget.terms.empty()) m.add_row(std::move(budget));
  for (std::size_t j = 0; j < nj; ++j) {
    Constraint gub{"gub_" + std::to_string(j), {}, RowSense::kLessEqual, 1.0};
    for (int col : f.y[j]) gub.terms.push_back({col, 1.0});
    m.add_row(std::move(gub));
  }
  return f;
}

inline JammingPlan extract_plan(const NjpFormulation& f, std::span<const double> x) {
  JammingPlan plan;
  plan.activation = Activation::none(f.y.size());
  plan.claimed.assign(f.z.size(), 0);
  for (std::size_t t = 0; t < f.z.size(); ++t) plan.claimed[t] = x[static_cast<std::size_t>(f.z[t])] > 0.5;
  for (std::size_t j = 0; j < f.y.size(); ++j) {
    for (std::size_t mm = 0; mm < f.y[j].size(); ++mm) {
      if (x[static_cast<std::size_t>(f.y[j][mm])] > 0.5) plan.activation.typology[j] = static_cast<int>(mm);
    }
  }
  return plan;
}

inline std::vector<double> plan_to_values(const NjpFormulation& f, const JammingPlan& plan) {
  std::vector<double> x(static_cast<std::size_t>(f.model.num_variables()), 0.0);
  for (std::size_t t = 0; t < f.z.size(); ++t) x[static_cast<std::size_t>(f.z[t])] = plan.claimed[t] ? 1.0 : 0.0;
  for (std::size_t j = 0; j < f.y.size(); ++j) {
    const int mm = plan.activation.typology[j];
    if (mm != kNoDevice) x[static_cast<std::size_t>(f.y[j][static_cast<std::size_t>(mm)])] = 1.0;
  }
  return x;
}

// ---------------------------------------------------------------------------
// SEP

enum class SepScope {
  kClaimed,  // v and w over the claimed set D only
  kServed,   // w over all of T' (band counts span T'), v over D
};

inline std::string to_string(SepScope s) { return s == SepScope::kClaimed ? "claimed" : "served"; }

// Slack that turns the strict denial condition into a >= row.
inline double sep_tau(const JammingInstance& ji) { return 1e-6 * ji.epsilon; }

// Right-hand side of the denial row of TP t: a deviation d denies t iff
// d >= JAM_t - balance_t - eps + tau.
inline double denial_threshold(std::size_t t, double jam, const JammingInstance& ji) {
  return jam - ji.nominal_balance[t] - ji.epsilon + sep_tau(ji);
}

// Lower bounds reduced, band by band, so that they fit `size` TPs.
inline std::vector<int> relaxed_lower_bounds(const MultibandSet& mb, int size) {
  std::vector<int> l;
  int left = size;
  for (int k = mb.k_minus(); k <= mb.k_plus(); ++k) {
    const int lk = std::min(mb.lower(k), left);
    l.push_back(lk);
    left -= lk;
  }
  return l;
}

struct SepFormulation {
  MilpModel model;
  std::vector<int> scope;             // TP rows covered by w
  std::vector<int> v;                 // per scope entry; -1 when the TP is unclaimed
  std::vector<std::vector<int>> w;    // [scope entry][band column]
  std::vector<double> jam;            // JAM_t per TP row
};

inline SepFormulation build_sep(const JammingPlan& incumbent, const JammingInstance& ji, const MultibandSet& mb,
                                SepScope scope = SepScope::kClaimed) {
  ji.validate();
  mb.validate();
  require(mb.num_tps() == ji.num_tps(), "build_sep: multiband set size != |T'|");
  // Solver tolerances may leave a claimed TP a hair short of the strict
  // condition; such a TP is simply deniable with zero deviation.
  if (!is_nominally_feasible(incumbent, ji, 1e-9, 1e-6)) {
    throw ValidationError("build_sep: incumbent violates NJP-01");
  }
  SepFormulation f;
  MilpModel& m = f.model;
  m.set_objective_sense(ObjectiveSense::kMaximize);
  for (std::size_t t = 0; t < ji.num_tps(); ++t) f.jam.push_back(jam_power(t, incumbent.activation, ji));
  for (std::size_t t = 0; t < ji.num_tps(); ++t) {
    if (scope == SepScope::kServed || incumbent.claimed[t]) f.scope.push_back(static_cast<int>(t));
  }
  for (int t : f.scope) {
    const auto tu = static_cast<std::size_t>(t);
    std::vector<int> wt;
    for (int k = mb.k_minus(); k <= mb.k_plus(); ++k) {
      wt.push_back(m.add_binary("w_" + std::to_string(t) + "_" + std::to_string(k), {"w", t, k}));
    }
    f.w.push_back(wt);
    int vt = -1;
    if (incumbent.claimed[tu]) {
      const double rhs = denial_threshold(tu, f.jam[tu], ji);
      // No band reaches the threshold: t cannot be denied.
      const double vmax = rhs > mb.worst_positive(tu) ? 0.0 : 1.0;
      vt = m.add_variable(Variable{"v_" + std::to_string(t), VarKind::kBinary, 0.0, vmax, {"v", t}});
      m.set_objective_coef(vt, 1.0);
      // sum_k d^k w^k + M (1 - v) >= rhs
      const double bigm = std::max(0.0, rhs - mb.worst_negative(tu));
      Constraint row{"deny_" + std::to_string(t), {}, RowSense::kGreaterEqual, rhs - bigm};
      for (int k = mb.k_minus(); k <= mb.k_plus(); ++k) {
        const double d = mb.offset(tu, k);
        if (d != 0.0) row.terms.push_back({wt[mb.column(k)], d});
      }
      row.terms.push_back({vt, -bigm});
      m.add_row(std::move(row));
    }
    f.v.push_back(vt);
    Constraint gub{"one_band_" + std::to_string(t), {}, RowSense::kLessEqual, 1.0};
    for (int col : wt) gub.terms.push_back({col, 1.0});
    m.add_row(std::move(gub));
  }
  const std::vector<int> lower = relaxed_lower_bounds(mb, static_cast<int>(f.scope.size()));
  for (int k = mb.k_minus(); k <= mb.k_plus(); ++k) {
    const std::size_t c = mb.column(k);
    Constraint cnt{"band_" + std::to_string(k), {}, RowSense::kLessEqual, static_cast<double>(mb.upper(k))};
    for (std::size_t i = 0; i < f.scope.size(); ++i) cnt.terms.push_back({f.w[i][c], 1.0});
    if (cnt.terms.empty()) continue;
    if (mb.upper(k) < static_cast<int>(f.scope.size())) m.add_row(cnt);
    if (lower[c] > 0) {
      cnt.name += "_lo";
      cnt.sense = RowSense::kGreaterEqual;
      cnt.rhs = lower[c];
      m.add_row(std::move(cnt));
    }
  }
  return f;
}

}  // namespace wnjam
