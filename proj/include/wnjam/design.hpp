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

// Network design: a feasible SPAP solution with strictly positive balances.
//
// The SPAP branch-and-bound runs under limits; its incumbent competes with a
// greedy assignment built by margin-LP feasibility checks. The winner is then
// polished by two LPs over the powers: first the largest common margin mu with
// balance_t >= (1 + mu) * delta * N (dropping the tightest TP while mu <= 0),
// then the largest total balance keeping every margin at least mu / 2.

#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "wnjam/formulate.hpp"
#include "wnjam/lp.hpp"
#include "wnjam/milp.hpp"
#include "wnjam/netmodel.hpp"

namespace wnjam {

struct DesignOptions {
  SpapOptions spap{true, 3};
  SolveLimits limits{200, 60.0, 0.0};
  bool use_heuristic = true;
};

struct DesignResult {
  NetworkDesign design;
  MilpStatus spap_status = MilpStatus::kInfeasible;
  double spap_objective = 0.0;  // revenue of the SPAP incumbent
  double spap_bound = 0.0;
  double revenue = 0.0;         // revenue of the delivered design
  std::int64_t nodes = 0;
  bool from_heuristic = false;
};

namespace detail {

// Balance of TP t under server s as a row over the power columns.
inline std::vector<Term> balance_terms(std::size_t t, std::size_t s, const NetworkInstance& net,
                                       std::span<const int> pcol) {
  std::vector<Term> terms;
  for (std::size_t sigma = 0; sigma < net.num_trxs(); ++sigma) {
    const double a = net.fading(t, sigma);
    if (a != 0.0) terms.push_back({pcol[sigma], sigma == s ? a : -net.sir_threshold * a});
  }
  return terms;
}

struct MarginLp {
  double mu = -kInf;
  std::vector<double> powers;
};

// Largest mu with balance_t >= (1 + mu) * delta * N for every assigned TP.
inline MarginLp max_margin(const NetworkInstance& net, const std::vector<int>& server) {
  const double dn = net.sir_threshold * net.noise_mw;
  MilpModel m;
  m.set_objective_sense(ObjectiveSense::kMaximize);
  std::vector<int> pcol;
  for (std::size_t s = 0; s < net.num_trxs(); ++s) pcol.push_back(m.add_continuous("p", 0.0, net.p_trx_max_mw));
  double amax = 0.0;
  for (double a : net.fading.data()) amax = std::max(amax, a);
  const double mu_cap = std::max(1.0, amax * net.p_trx_max_mw / dn);
  const int mu = m.add_continuous("mu", -mu_cap * net.sir_threshold * (1.0 + net.num_trxs()) - 1.0, mu_cap);
  m.set_objective_coef(mu, 1.0);
  for (std::size_t t = 0; t < server.size(); ++t) {
    if (server[t] == kUnserved) continue;
    std::vector<Term> terms = balance_terms(t, static_cast<std::size_t>(server[t]), net, pcol);
    terms.push_back({mu, -dn});
    m.add_row({"margin", terms, RowSense::kGreaterEqual, dn});
  }
  const LpSolution s = lp_solve(m);
  if (s.status != LpStatus::kOptimal) throw SolverError("design: margin LP failed");
  MarginLp out;
  out.mu = s.values[static_cast<std::size_t>(mu)];
  out.powers.assign(s.values.begin(), s.values.begin() + static_cast<std::ptrdiff_t>(net.num_trxs()));
  return out;
}

inline constexpr double kMinMargin = 1e-6;

// Powers for a fixed assignment, or an empty vector if no TP survives.
// Unservable TPs are dropped from `server`, tightest first.
inline std::vector<double> polish_powers(const NetworkInstance& net, std::vector<int>& server) {
  const double dn = net.sir_threshold * net.noise_mw;
  for (;;) {
    if (std::all_of(server.begin(), server.end(), [](int s) { return s == kUnserved; })) return {};
    const MarginLp first = max_margin(net, server);
    if (first.mu > kMinMargin) {
      // Second stage: keep half the margin, maximize the total balance.
      MilpModel m2;
      m2.set_objective_sense(ObjectiveSense::kMaximize);
      std::vector<int> q;
      for (std::size_t s = 0; s < net.num_trxs(); ++s) q.push_back(m2.add_continuous("p", 0.0, net.p_trx_max_mw));
      for (std::size_t t = 0; t < server.size(); ++t) {
        if (server[t] == kUnserved) continue;
        const std::vector<Term> terms = balance_terms(t, static_cast<std::size_t>(server[t]), net, q);
        m2.add_row({"margin", terms, RowSense::kGreaterEqual, dn + 0.5 * first.mu * dn});
        for (const Term& tm : terms) {
          m2.set_objective_coef(tm.var, m2.objective()[static_cast<std::size_t>(tm.var)] + tm.coef);
        }
      }
      const LpSolution s2 = lp_solve(m2);
      return s2.status == LpStatus::kOptimal ? s2.values : first.powers;
    }
    std::size_t worst = 0;
    double worst_bal = kInf;
    for (std::size_t t = 0; t < server.size(); ++t) {
      if (server[t] == kUnserved) continue;
      const double b = compute_delta_sir(t, static_cast<std::size_t>(server[t]), first.powers, net);
      if (b < worst_bal) {
        worst_bal = b;
        worst = t;
      }
    }
    server[worst] = kUnserved;
  }
}

// Greedy assignment: TPs in decreasing order of their best fading; each joins
// on the first candidate server (strongest first) that keeps the margin LP
// positive.
inline std::vector<int> greedy_assignment(const NetworkInstance& net, int max_servers) {
  const double dn = net.sir_threshold * net.noise_mw;
  std::vector<std::size_t> order(net.num_tps());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto best_fading = [&](std::size_t t) {
    double b = 0.0;
    for (std::size_t s = 0; s < net.num_trxs(); ++s) b = std::max(b, net.fading(t, s));
    return b;
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return best_fading(a) > best_fading(b); });
  std::vector<int> server(net.num_tps(), kUnserved);
  for (std::size_t t : order) {
    std::vector<std::size_t> cand(net.num_trxs());
    std::iota(cand.begin(), cand.end(), std::size_t{0});
    std::stable_sort(cand.begin(), cand.end(),
                     [&](std::size_t a, std::size_t b) { return net.fading(t, a) > net.fading(t, b); });
    if (max_servers > 0 && cand.size() > static_cast<std::size_t>(max_servers)) {
      cand.resize(static_cast<std::size_t>(max_servers));
    }
    for (std::size_t s : cand) {
      if (net.fading(t, s) * net.p_trx_max_mw < dn) break;
      server[t] = static_cast<int>(s);
      if (max_margin(net, server).mu > kMinMargin) break;
      server[t] = kUnserved;
    }
  }
  return server;
}

inline NetworkDesign assemble(const NetworkInstance& net, const std::vector<int>& server,
                              const std::vector<double>& powers) {
  NetworkDesign d;
  d.powers_mw = powers.empty() ? std::vector<double>(net.num_trxs(), 0.0) : powers;
  d.server.assign(net.num_tps(), kUnserved);
  for (std::size_t t = 0; t < net.num_tps(); ++t) {
    if (server[t] == kUnserved || powers.empty()) continue;
    const double b = compute_delta_sir(t, static_cast<std::size_t>(server[t]), d.powers_mw, net);
    if (!(b > 0.0)) continue;  // numerically lost margin: leave unserved
    d.server[t] = server[t];
    d.served.push_back(static_cast<int>(t));
    d.balances.push_back(b);
  }
  return d;
}

inline double revenue_of(const NetworkInstance& net, const NetworkDesign& d) {
  double r = 0.0;
  for (int t : d.served) r += net.testpoints[static_cast<std::size_t>(t)].revenue;
  return r;
}

}  // namespace detail

inline DesignResult design_network(const NetworkInstance& net, const DesignOptions& opt = {}) {
  net.validate();
  DesignResult out;
  const SpapFormulation f = build_spap(net, opt.spap);
  const MilpSolution s = bb_solve(f.model, {}, opt.limits);
  out.spap_status = s.status;
  out.nodes = s.nodes;
  out.spap_bound = s.best_bound;

  std::vector<std::vector<int>> candidates;
  if (s.has_incumbent) {
    out.spap_objective = s.objective;
    std::vector<int> server(net.num_tps(), kUnserved);
    for (const auto& pr : f.assign) {
      if (s.values[static_cast<std::size_t>(pr.col)] > 0.5) server[static_cast<std::size_t>(pr.tp)] = pr.trx;
    }
    candidates.push_back(server);
  }
  if (opt.use_heuristic) candidates.push_back(detail::greedy_assignment(net, opt.spap.max_servers));

  bool have = false;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    std::vector<int> server = candidates[c];
    const std::vector<double> powers = detail::polish_powers(net, server);
    NetworkDesign d = detail::assemble(net, server, powers);
    const double rev = detail::revenue_of(net, d);
    if (!have || rev > out.revenue) {
      out.design = std::move(d);
      out.revenue = rev;
      out.from_heuristic = s.has_incumbent ? c > 0 : true;
      have = true;
    }
  }
  if (!have) out.design = detail::assemble(net, std::vector<int>(net.num_tps(), kUnserved), {});
  return out;
}

}  // namespace wnjam
