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

// Domain types of the network-design and jamming problems together with the
// signal arithmetic shared by every later stage. All arithmetic is carried out
// in linear scale (mW for powers, plain ratios for fading and thresholds);
// decibels only appear at the I/O boundary.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wnjam/common.hpp"

namespace wnjam {

////////////////////////////////////////////////////////////////////////////////
// Units
////////////////////////////////////////////////////////////////////////////////

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double linear_to_db(double linear) {
  if (!(linear > 0.0)) throw std::domain_error("linear_to_db: value must be > 0");
  return 10.0 * std::log10(linear);
}

// A level on the decibel scale: dB for ratios, dBmW for absolute powers.
struct Decibel {
  double value = 0.0;
  friend auto operator<=>(const Decibel&, const Decibel&) = default;
};

// A nonnegative absolute power in mW.
class LinearPower {
 public:
  LinearPower() = default;
  explicit LinearPower(double mw) : mw_(mw) {
    if (!(mw >= 0.0)) throw std::domain_error("LinearPower must be >= 0 mW");
  }
  double mw() const { return mw_; }
  friend auto operator<=>(const LinearPower&, const LinearPower&) = default;

 private:
  double mw_ = 0.0;
};

inline LinearPower to_linear(Decibel level) { return LinearPower(db_to_linear(level.value)); }
inline Decibel to_decibel(LinearPower power) { return Decibel{linear_to_db(power.mw())}; }

////////////////////////////////////////////////////////////////////////////////
// Network being designed
////////////////////////////////////////////////////////////////////////////////

struct Testpoint {
  int id = 0;
  double x = 0.0;  // meters
  double y = 0.0;
  double revenue = 1.0;
  friend bool operator==(const Testpoint&, const Testpoint&) = default;
};

struct Transceiver {
  int id = 0;
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Transceiver&, const Transceiver&) = default;
};

struct NetworkInstance {
  std::vector<Testpoint> testpoints;
  std::vector<Transceiver> trxs;
  Matrix fading;                // |T| x |S|, linear, in [0,1]
  double noise_mw = 1e-11;      // N
  double sir_threshold = 10.0;  // delta, linear
  double p_trx_max_mw = 1e4;    // P_TRX

  std::size_t num_tps() const { return testpoints.size(); }
  std::size_t num_trxs() const { return trxs.size(); }

  void validate() const {
    require(!testpoints.empty(), "network: no testpoints");
    require(!trxs.empty(), "network: no transceivers");
    require(fading.rows() == num_tps() && fading.cols() == num_trxs(),
            "network: fading matrix must be |T| x |S|");
    for (double a : fading.data()) require(a >= 0.0 && a <= 1.0, "network: fading outside [0,1]");
    for (const auto& tp : testpoints) require(tp.revenue > 0.0, "network: revenue must be > 0");
    require(noise_mw > 0.0 && std::isfinite(noise_mw), "network: noise must be > 0");
    require(sir_threshold > 0.0 && std::isfinite(sir_threshold), "network: SIR threshold must be > 0");
    require(p_trx_max_mw > 0.0 && std::isfinite(p_trx_max_mw), "network: P_TRX must be > 0");
  }

  friend bool operator==(const NetworkInstance&, const NetworkInstance&) = default;
};

namespace detail {

inline void check_sir_args(std::size_t t, std::size_t s, std::span<const double> powers,
                           const NetworkInstance& net) {
  if (t >= net.num_tps()) throw std::out_of_range("testpoint index out of range");
  if (s >= net.num_trxs()) throw std::out_of_range("transceiver index out of range");
  if (powers.size() != net.num_trxs()) throw std::out_of_range("power vector size != |S|");
}

inline double interference(std::size_t t, std::size_t server, std::span<const double> powers,
                           const NetworkInstance& net) {
  double sum = 0.0;
  for (std::size_t s = 0; s < net.num_trxs(); ++s) {
    if (s != server) sum += net.fading(t, s) * powers[s];
  }
  return sum;
}

}  // namespace detail

// SIR of testpoint t when served by s: a_ts p_s / (N + sum of other received powers).
inline double compute_sir(std::size_t t, std::size_t s, std::span<const double> powers,
                          const NetworkInstance& net) {
  detail::check_sir_args(t, s, powers, net);
  return net.fading(t, s) * powers[s] / (net.noise_mw + detail::interference(t, s, powers, net));
}

// SIR balance in mW: serving power minus delta-weighted interference and noise.
// Nonnegative exactly when the SIR inequality holds.
inline double compute_delta_sir(std::size_t t, std::size_t server, std::span<const double> powers,
                                const NetworkInstance& net) {
  detail::check_sir_args(t, server, powers, net);
  const double delta = net.sir_threshold;
  return net.fading(t, server) * powers[server] -
         delta * detail::interference(t, server, powers, net) - delta * net.noise_mw;
}

inline constexpr int kUnserved = -1;

// A configured network: TRX powers and TP-to-server assignment.
struct NetworkDesign {
  std::vector<double> powers_mw;  // per TRX
  std::vector<int> server;        // per TP; kUnserved when not covered
  std::vector<int> served;        // T', increasing TP indices
  std::vector<double> balances;   // Delta SIR_t in mW, aligned with `served`

  std::size_t served_count() const { return served.size(); }

  // Checks the GUB/SIR/balance invariants against `net`; `rel_tol` is applied
  // relative to delta*N.
  void validate(const NetworkInstance& net, double rel_tol = 1e-6) const {
    require(powers_mw.size() == net.num_trxs(), "design: power vector size != |S|");
    require(server.size() == net.num_tps(), "design: assignment size != |T|");
    require(balances.size() == served.size(), "design: balances misaligned with served set");
    for (double p : powers_mw) {
      require(p >= 0.0 && p <= net.p_trx_max_mw * (1.0 + 1e-12), "design: power outside [0,P_TRX]");
    }
    const double tol = rel_tol * net.sir_threshold * net.noise_mw;
    std::size_t k = 0;
    for (std::size_t t = 0; t < net.num_tps(); ++t) {
      const int s = server[t];
      if (s == kUnserved) continue;
      require(s >= 0 && static_cast<std::size_t>(s) < net.num_trxs(), "design: bad server index");
      require(k < served.size() && served[k] == static_cast<int>(t), "design: served set mismatch");
      const double bal = compute_delta_sir(t, static_cast<std::size_t>(s), powers_mw, net);
      require(bal >= -tol, "design: SIR inequality violated for a served TP");
      require(balances[k] >= 0.0, "design: negative stored balance");
      require(std::abs(balances[k] - bal) <= tol + 1e-9 * std::abs(bal),
              "design: stored balance disagrees with powers");
      ++k;
    }
    require(k == served.size(), "design: served set mismatch");
  }

  friend bool operator==(const NetworkDesign&, const NetworkDesign&) = default;
};

////////////////////////////////////////////////////////////////////////////////
// Jamming
////////////////////////////////////////////////////////////////////////////////

struct JammerSite {
  int id = 0;
  double x = 0.0;
  double y = 0.0;
  std::vector<double> cost;  // per typology, strictly increasing
  friend bool operator==(const JammerSite&, const JammerSite&) = default;
};

// The jamming problem seen from the attacker: only the served set T' matters.
// Rows of `fading`, `profits` and `nominal_balance` follow `served` order.
struct JammingInstance {
  std::vector<int> served;               // network TP index of each row
  std::vector<JammerSite> jammers;
  std::vector<double> typology_power_mw;  // P_JAM^m, strictly increasing
  Matrix fading;                          // |T'| x |J|
  double budget = 1.0;
  std::vector<double> profits;          // pi_t
  std::vector<double> nominal_balance;  // estimated Delta SIR_t, mW
  double epsilon = 1e-12;               // mW
  double sir_threshold = 10.0;
  double noise_mw = 1e-11;

  std::size_t num_tps() const { return served.size(); }
  std::size_t num_jammers() const { return jammers.size(); }
  std::size_t num_typologies() const { return typology_power_mw.size(); }

  void validate() const {
    const std::size_t nt = num_tps();
    require(fading.rows() == nt && fading.cols() == num_jammers(),
            "jamming: fading matrix must be |T'| x |J|");
    for (double a : fading.data()) require(a >= 0.0 && a <= 1.0, "jamming: fading outside [0,1]");
    require(profits.size() == nt && nominal_balance.size() == nt, "jamming: per-TP data misaligned");
    for (double p : profits) require(p > 0.0, "jamming: profits must be > 0");
    for (double b : nominal_balance) require(std::isfinite(b), "jamming: nonfinite balance");
    require(!typology_power_mw.empty(), "jamming: no typologies");
    for (std::size_t m = 0; m < typology_power_mw.size(); ++m) {
      require(typology_power_mw[m] > 0.0, "jamming: typology power must be > 0");
      if (m > 0) {
        require(typology_power_mw[m - 1] < typology_power_mw[m], "jamming: typology powers not increasing");
      }
    }
    for (const auto& j : jammers) {
      require(j.cost.size() == num_typologies(), "jamming: cost vector size != |M|");
      for (std::size_t m = 0; m < j.cost.size(); ++m) {
        require(j.cost[m] > 0.0, "jamming: costs must be > 0");
        if (m > 0) require(j.cost[m - 1] < j.cost[m], "jamming: costs not increasing in typology");
      }
    }
    require(budget > 0.0, "jamming: budget must be > 0");
    require(epsilon > 0.0, "jamming: epsilon must be > 0");
    require(sir_threshold > 0.0 && noise_mw > 0.0, "jamming: bad threshold/noise");
  }

  friend bool operator==(const JammingInstance&, const JammingInstance&) = default;
};

inline constexpr int kNoDevice = -1;

// Chosen typology per jammer site (kNoDevice when the site stays off).
struct Activation {
  std::vector<int> typology;

  static Activation none(std::size_t num_jammers) {
    return Activation{std::vector<int>(num_jammers, kNoDevice)};
  }
  bool active(std::size_t j) const { return typology[j] != kNoDevice; }
  friend bool operator==(const Activation&, const Activation&) = default;
};

inline double activation_cost(const Activation& act, const JammingInstance& ji) {
  double cost = 0.0;
  for (std::size_t j = 0; j < act.typology.size(); ++j) {
    if (act.active(j)) cost += ji.jammers[j].cost[static_cast<std::size_t>(act.typology[j])];
  }
  return cost;
}

// JAM_t: delta-weighted jamming power received by row t of `ji`.
inline double jam_power(std::size_t t, const Activation& act, const JammingInstance& ji) {
  if (t >= ji.num_tps()) throw std::out_of_range("jam_power: TP index out of range");
  if (act.typology.size() != ji.num_jammers()) throw std::out_of_range("jam_power: activation size != |J|");
  double sum = 0.0;
  for (std::size_t j = 0; j < act.typology.size(); ++j) {
    const int m = act.typology[j];
    if (m == kNoDevice) continue;
    if (m < 0 || static_cast<std::size_t>(m) >= ji.num_typologies()) {
      throw std::out_of_range("jam_power: typology index out of range");
    }
    sum += ji.fading(t, j) * ji.typology_power_mw[static_cast<std::size_t>(m)];
  }
  return ji.sir_threshold * sum;
}

// The jamming condition with epsilon standing in for the strict inequality.
inline bool is_jammed(std::size_t t, const Activation& act, double balance, const JammingInstance& ji) {
  return jam_power(t, act, ji) >= balance + ji.epsilon;
}

// 1e-3 * min_t max(balance_t, delta*N), floored at `floor_mw`.
inline double default_epsilon(std::span<const double> balances, double sir_threshold, double noise_mw,
                              double floor_mw = 1e-30) {
  const double dn = sir_threshold * noise_mw;
  double lo = std::numeric_limits<double>::infinity();
  for (double b : balances) lo = std::min(lo, std::max(b, dn));
  if (!std::isfinite(lo)) lo = dn;
  return std::max(1e-3 * lo, floor_mw);
}

// A candidate jamming solution: device choice plus the claimed (z_t = 1) set.
struct JammingPlan {
  Activation activation;
  std::vector<char> claimed;  // per row of the JammingInstance

  std::size_t claimed_count() const {
    return static_cast<std::size_t>(std::count(claimed.begin(), claimed.end(), char{1}));
  }
  double profit(const JammingInstance& ji) const {
    double p = 0.0;
    for (std::size_t t = 0; t < claimed.size(); ++t) {
      if (claimed[t]) p += ji.profits[t];
    }
    return p;
  }
  friend bool operator==(const JammingPlan&, const JammingPlan&) = default;
};

// Budget, one device per site, and nominal jamming of every claimed TP.
// `jam_rel_tol` > 0 accepts jamming conditions missed by a relative margin.
inline bool is_nominally_feasible(const JammingPlan& plan, const JammingInstance& ji,
                                  double budget_rel_tol = 1e-9, double jam_rel_tol = 0.0) {
  if (plan.claimed.size() != ji.num_tps() || plan.activation.typology.size() != ji.num_jammers()) return false;
  for (int m : plan.activation.typology) {
    if (m != kNoDevice && (m < 0 || static_cast<std::size_t>(m) >= ji.num_typologies())) return false;
  }
  if (activation_cost(plan.activation, ji) > ji.budget * (1.0 + budget_rel_tol)) return false;
  for (std::size_t t = 0; t < ji.num_tps(); ++t) {
    if (!plan.claimed[t]) continue;
    const double jam = jam_power(t, plan.activation, ji);
    const double need = ji.nominal_balance[t] + ji.epsilon;
    if (jam < need - jam_rel_tol * std::max(std::abs(need), jam)) return false;
  }
  return true;
}

}  // namespace wnjam
