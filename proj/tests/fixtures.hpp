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

// Jamming fixtures and brute-force references shared by the tests and the
// acceptance runner. The references recompute received powers from the raw
// matrices instead of calling library helpers.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "wnjam/multiband.hpp"
#include "wnjam/netmodel.hpp"

namespace wnjam::testing {

// ---------------------------------------------------------------------------
// The single-TP example: N = -114 dBm, delta = 10 dB, serving -48 dBm and
// interference plus noise -61 dBm at unit TRX power.

inline NetworkInstance example_network() {
  NetworkInstance net;
  net.testpoints = {{0, 0.0, 0.0, 1.0}};
  net.trxs = {{0, 0.0, 0.0}, {1, 0.0, 0.0}};
  net.noise_mw = db_to_linear(-114.0);
  net.sir_threshold = db_to_linear(10.0);
  net.p_trx_max_mw = 1.0;
  net.fading = Matrix(1, 2);
  net.fading(0, 0) = db_to_linear(-48.0);
  net.fading(0, 1) = db_to_linear(-61.0) - net.noise_mw;
  return net;
}

inline const std::vector<double>& example_powers() {
  static const std::vector<double> p{1.0, 1.0};
  return p;
}

// One site with devices J1 (20 dBm, cost 1) and J2 (27 dBm, cost 2), fading
// -77 dB, budget 2, and the given nominal balance.
inline JammingInstance example_jamming(double balance_mw) {
  JammingInstance ji;
  ji.served = {0};
  ji.jammers = {{0, 0.0, 0.0, {1.0, 2.0}}};
  ji.typology_power_mw = {db_to_linear(20.0), db_to_linear(27.0)};
  ji.fading = Matrix(1, 1);
  ji.fading(0, 0) = db_to_linear(-77.0);
  ji.budget = 2.0;
  ji.profits = {1.0};
  ji.nominal_balance = {balance_mw};
  ji.sir_threshold = db_to_linear(10.0);
  ji.noise_mw = db_to_linear(-114.0);
  ji.epsilon = default_epsilon(ji.nominal_balance, ji.sir_threshold, ji.noise_mw);
  return ji;
}

// ---------------------------------------------------------------------------
// Brute force

// delta * sum_j a_tj P^{m_j}, straight from the matrices.
inline double raw_jam(const JammingInstance& ji, std::size_t t, const std::vector<int>& typ) {
  double s = 0.0;
  for (std::size_t j = 0; j < typ.size(); ++j) {
    if (typ[j] >= 0) s += ji.fading(t, j) * ji.typology_power_mw[static_cast<std::size_t>(typ[j])];
  }
  return ji.sir_threshold * s;
}

// Calls f on every typology vector (-1 = off) within budget.
inline void for_each_activation(const JammingInstance& ji, const std::function<void(const std::vector<int>&)>& f) {
  const std::size_t nj = ji.num_jammers();
  std::vector<int> typ(nj, -1);
  std::function<void(std::size_t, double)> rec = [&](std::size_t j, double cost) {
    if (j == nj) {
      f(typ);
      return;
    }
    for (int m = -1; m < static_cast<int>(ji.num_typologies()); ++m) {
      const double c = m < 0 ? 0.0 : ji.jammers[j].cost[static_cast<std::size_t>(m)];
      if (cost + c > ji.budget * (1.0 + 1e-9)) continue;
      typ[j] = m;
      rec(j + 1, cost + c);
    }
    typ[j] = -1;
  };
  rec(0, 0.0);
}

// Best nominal profit over all budget-feasible activations.
inline double brute_force_nominal(const JammingInstance& ji) {
  double best = 0.0;
  for_each_activation(ji, [&](const std::vector<int>& typ) {
    double p = 0.0;
    for (std::size_t t = 0; t < ji.num_tps(); ++t) {
      if (raw_jam(ji, t, typ) >= ji.nominal_balance[t] + ji.epsilon) p += ji.profits[t];
    }
    best = std::max(best, p);
  });
  return best;
}

// Largest number of claimed TPs an adversary denies: every TP of the scope
// picks no band or one band, band counts respect the bounds (lower bounds
// reduced band by band to fit the scope), and a claimed TP is denied when its
// deviated balance is no longer strictly below the jamming power.
inline int brute_force_denials(const JammingPlan& plan, const JammingInstance& ji, const MultibandSet& mb,
                               bool served_scope) {
  std::vector<std::size_t> items;
  for (std::size_t t = 0; t < ji.num_tps(); ++t) {
    if (served_scope || plan.claimed[t]) items.push_back(t);
  }
  const int nb = mb.num_bands();
  std::vector<int> lower(static_cast<std::size_t>(nb));
  int left = static_cast<int>(items.size());
  for (int c = 0; c < nb; ++c) {
    lower[static_cast<std::size_t>(c)] = std::min(mb.lower(mb.k_minus() + c), left);
    left -= lower[static_cast<std::size_t>(c)];
  }
  std::vector<int> count(static_cast<std::size_t>(nb), 0);
  int best = -1;
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int denied) {
    if (i == items.size()) {
      for (int c = 0; c < nb; ++c) {
        if (count[static_cast<std::size_t>(c)] < lower[static_cast<std::size_t>(c)]) return;
      }
      best = std::max(best, denied);
      return;
    }
    const std::size_t t = items[i];
    const double jam = raw_jam(ji, t, plan.activation.typology);
    for (int c = -1; c < nb; ++c) {
      double d = 0.0;
      if (c >= 0) {
        const int k = mb.k_minus() + c;
        if (count[static_cast<std::size_t>(c)] >= mb.upper(k)) continue;
        d = mb.offset(t, k);
        ++count[static_cast<std::size_t>(c)];
      }
      const bool deny = plan.claimed[t] && jam < ji.nominal_balance[t] + d + ji.epsilon;
      rec(i + 1, denied + (deny ? 1 : 0));
      if (c >= 0) --count[static_cast<std::size_t>(c)];
    }
  };
  rec(0, 0);
  return best;
}

// ---------------------------------------------------------------------------
// Random tiny instances

struct TinyCase {
  JammingInstance ji;
  MultibandSet mb;
};

// |T'| in [2,8], |J| in [1,5], |M| in [1,2], five bands with f in [0.1,0.3],
// integer profits. With `lower_bounds`, some bands get l_k > 0.
inline TinyCase random_tiny_case(std::uint64_t seed, bool lower_bounds = false) {
  std::mt19937_64 rng(seed);
  auto uni = [&](double lo, double hi) { return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  auto pick = [&](int lo, int hi) { return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1)); };
  TinyCase c;
  JammingInstance& ji = c.ji;
  const int nt = pick(2, 8), nj = pick(1, 5), nm = pick(1, 2);
  ji.sir_threshold = db_to_linear(10.0);
  ji.noise_mw = db_to_linear(-114.0);
  ji.typology_power_mw = {db_to_linear(20.0)};
  if (nm == 2) ji.typology_power_mw.push_back(db_to_linear(27.0));
  for (int t = 0; t < nt; ++t) {
    ji.served.push_back(t);
    ji.profits.push_back(static_cast<double>(pick(1, 9)));
    ji.nominal_balance.push_back(db_to_linear(uni(-80.0, -55.0)));
  }
  double cheapest = 0.0;
  for (int j = 0; j < nj; ++j) {
    const double base = uni(1.0, 2.0);
    JammerSite s{j, 0.0, 0.0, {base}};
    if (nm == 2) s.cost.push_back(base * uni(1.3, 2.2));
    cheapest += base;
    ji.jammers.push_back(s);
  }
  ji.fading = Matrix(static_cast<std::size_t>(nt), static_cast<std::size_t>(nj));
  for (int t = 0; t < nt; ++t) {
    for (int j = 0; j < nj; ++j) {
      // Fading that lands the received jamming power near the balance.
      const double margin_db = uni(-12.0, 8.0);
      const double target = linear_to_db(ji.nominal_balance[static_cast<std::size_t>(t)]) + margin_db;
      const double a_db = std::min(0.0, target - 10.0 - 20.0);
      ji.fading(static_cast<std::size_t>(t), static_cast<std::size_t>(j)) = pick(0, 5) == 0 ? 0.0 : db_to_linear(a_db);
    }
  }
  ji.budget = cheapest * uni(0.3, 0.8);
  ji.epsilon = default_epsilon(ji.nominal_balance, ji.sir_threshold, ji.noise_mw);
  ji.validate();

  c.mb = make_bands(ji.nominal_balance, uni(0.1, 0.3), 2, 2);
  int lsum = 0;
  for (int k = -2; k <= 2; ++k) {
    const int u = k == 0 ? nt : pick(0, nt);
    int l = 0;
    if (lower_bounds && k != 0 && pick(0, 2) == 0) l = std::min(u, pick(0, std::max(0, nt - lsum) / 2));
    lsum += l;
    c.mb.set_bounds(k, l, u);
  }
  c.mb.validate();
  return c;
}

}  // namespace wnjam::testing
