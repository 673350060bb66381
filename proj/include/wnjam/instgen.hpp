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

// Seeded synthetic instances: testpoints on a grid of square cells,
// transceivers and jammer sites dropped uniformly at random, log-distance
// path loss, and a log-normal population field driving revenues, profits and
// jammer costs.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "wnjam/common.hpp"
#include "wnjam/netmodel.hpp"

namespace wnjam {

struct GenParams {
  int n_tps = 100;
  int n_trxs = 6;
  int n_jammers = 15;
  double area_m = 1000.0;  // side of the square spanned by the TP grid columns
  std::uint64_t seed = 1;
  double l0_db = 40.0;
  double gamma = 3.5;
  double noise_dbm = -114.0;
  double delta_db = 10.0;
  double p_trx_dbm = 40.0;
  std::vector<double> typology_dbm{20.0, 24.0, 27.0};
  std::vector<double> typology_base_cost{1.0, 1.6, 2.5};
  double budget_frac = 0.3;
  double population_sigma = 0.8;
  double profit_scale = 10.0;
  // Relative perturbation, in dB, of the balances handed to the attacker.
  double estimate_noise = 0.05;

  void validate() const {
    require(n_tps >= 1, "params: n_tps must be >= 1");
    require(n_trxs >= 1, "params: n_trxs must be >= 1");
    require(n_jammers >= 0, "params: n_jammers must be >= 0");
    require(area_m > 0.0, "params: area must be > 0");
    require(gamma >= 2.0 && gamma <= 5.0, "params: gamma must lie in [2,5]");
    require(!typology_dbm.empty(), "params: need at least one typology");
    require(typology_dbm.size() == typology_base_cost.size(), "params: typology powers/costs misaligned");
    for (std::size_t m = 1; m < typology_dbm.size(); ++m) {
      require(typology_dbm[m - 1] < typology_dbm[m], "params: typology powers must increase");
      require(typology_base_cost[m - 1] < typology_base_cost[m], "params: typology costs must increase");
    }
    require(typology_base_cost.front() > 0.0, "params: typology costs must be > 0");
    require(budget_frac > 0.0 && budget_frac <= 1.0, "params: budget fraction must lie in (0,1]");
    require(population_sigma > 0.0, "params: population sigma must be > 0");
    require(profit_scale > 0.0, "params: profit scale must be > 0");
    require(estimate_noise >= 0.0 && estimate_noise < 1.0, "params: estimate noise must lie in [0,1)");
  }
};

// Attenuation in dB (<= 0) at `distance_m` meters.
inline double path_loss_db(double distance_m, double l0_db, double gamma) {
  if (!(distance_m > 0.0)) throw ValidationError("path_loss_db: distance must be > 0");
  return std::min(0.0, -(l0_db + 10.0 * gamma * std::log10(distance_m)));
}

// Everything the attacker knows before the network is designed.
struct JammingSkeleton {
  std::vector<JammerSite> jammers;
  std::vector<double> typology_power_mw;
  Matrix fading;                // |T| x |J|, linear
  std::vector<double> profits;  // per TP of the network
  double budget = 1.0;
  double estimate_noise = 0.05;
  std::uint64_t estimate_seed = 0;

  friend bool operator==(const JammingSkeleton&, const JammingSkeleton&) = default;
};

struct GeneratedInstance {
  NetworkInstance network;
  JammingSkeleton skeleton;
  std::vector<double> population;  // normalized to [0.1, 1]

  friend bool operator==(const GeneratedInstance&, const GeneratedInstance&) = default;
};

// Portable draws on top of mt19937_64 (the standard distributions are
// implementation-defined, which would break bit-identical output).
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

// rows x cols with rows the largest divisor of n not above sqrt(n).
inline std::pair<int, int> grid_shape(int n) {
  int rows = 1;
  for (int r = 1; static_cast<long long>(r) * r <= n; ++r) {
    if (n % r == 0) rows = r;
  }
  return {rows, n / rows};
}

inline GeneratedInstance generate(const GenParams& p) {
  p.validate();
  SeededRng rng(p.seed);
  GeneratedInstance g;
  NetworkInstance& net = g.network;
  const auto [rows, cols] = grid_shape(p.n_tps);
  const double cell = p.area_m / cols;
  const double width = p.area_m, height = cell * rows;

  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      net.testpoints.push_back({r * cols + c, (c + 0.5) * cell, (r + 0.5) * cell, 1.0});
    }
  }
  for (int s = 0; s < p.n_trxs; ++s) {
    const double x = rng.uniform(0.0, width), y = rng.uniform(0.0, height);
    net.trxs.push_back({s, x, y});
  }
  std::vector<std::pair<double, double>> sites;
  for (int j = 0; j < p.n_jammers; ++j) {
    const double x = rng.uniform(0.0, width), y = rng.uniform(0.0, height);
    sites.emplace_back(x, y);
  }
  std::vector<double> raw;
  for (int t = 0; t < p.n_tps; ++t) raw.push_back(std::exp(p.population_sigma * rng.normal()));
  const std::uint64_t estimate_seed = rng.next();

  const double lo = *std::min_element(raw.begin(), raw.end());
  const double hi = *std::max_element(raw.begin(), raw.end());
  for (double v : raw) g.population.push_back(hi > lo ? 0.1 + 0.9 * (v - lo) / (hi - lo) : 1.0);

  auto fading_at = [&](double ax, double ay, double bx, double by) {
    const double d = std::max(1.0, std::hypot(ax - bx, ay - by));
    return std::min(1.0, db_to_linear(path_loss_db(d, p.l0_db, p.gamma)));
  };
  net.fading = Matrix(net.num_tps(), net.num_trxs());
  for (std::size_t t = 0; t < net.num_tps(); ++t) {
    const auto& tp = net.testpoints[t];
    net.testpoints[t].revenue = std::max(1.0, std::round(p.profit_scale * g.population[t]));
    for (std::size_t s = 0; s < net.num_trxs(); ++s) {
      net.fading(t, s) = fading_at(tp.x, tp.y, net.trxs[s].x, net.trxs[s].y);
    }
  }
  net.noise_mw = db_to_linear(p.noise_dbm);
  net.sir_threshold = db_to_linear(p.delta_db);
  net.p_trx_max_mw = db_to_linear(p.p_trx_dbm);

  JammingSkeleton& sk = g.skeleton;
  for (double dbm : p.typology_dbm) sk.typology_power_mw.push_back(db_to_linear(dbm));
  sk.fading = Matrix(net.num_tps(), sites.size());
  double first_costs = 0.0;
  for (std::size_t j = 0; j < sites.size(); ++j) {
    const auto [x, y] = sites[j];
    std::size_t nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < net.num_tps(); ++t) {
      const double d = std::hypot(net.testpoints[t].x - x, net.testpoints[t].y - y);
      if (d < best) {
        best = d;
        nearest = t;
      }
      sk.fading(t, j) = fading_at(net.testpoints[t].x, net.testpoints[t].y, x, y);
    }
    JammerSite site{static_cast<int>(j), x, y, {}};
    for (double base : p.typology_base_cost) site.cost.push_back(base * (1.0 + g.population[nearest]));
    first_costs += site.cost.front();
    sk.jammers.push_back(std::move(site));
  }
  for (std::size_t t = 0; t < net.num_tps(); ++t) sk.profits.push_back(net.testpoints[t].revenue);
  sk.budget = p.n_jammers > 0 ? p.budget_frac * first_costs : p.typology_base_cost.front();
  sk.estimate_noise = p.estimate_noise;
  sk.estimate_seed = estimate_seed;
  return g;
}

// Nominal balance estimates: the true balance perturbed multiplicatively in dB
// by a seeded factor in [1 - noise, 1 + noise].
inline std::vector<double> estimate_balances(std::span<const double> balances, double noise, std::uint64_t seed) {
  SeededRng rng(seed);
  std::vector<double> out;
  for (double b : balances) {
    if (!(b > 0.0)) throw ValidationError("estimate_balances: balances must be > 0 mW");
    const double u = rng.uniform(-noise, noise);
    out.push_back(db_to_linear(linear_to_db(b) * (1.0 + u)));
  }
  return out;
}

// Restricts the skeleton to the served set of `design`, with the attacker's
// balance estimates `estimates` aligned with `design.served`.
inline JammingInstance make_jamming_instance(const NetworkInstance& net, const JammingSkeleton& sk,
                                             const NetworkDesign& design, std::span<const double> estimates,
                                             std::optional<double> epsilon = std::nullopt) {
  require(estimates.size() == design.served.size(), "jamming: estimates misaligned with served set");
  require(sk.fading.rows() == net.num_tps(), "jamming: skeleton fading must have |T| rows");
  JammingInstance ji;
  ji.served = design.served;
  ji.jammers = sk.jammers;
  ji.typology_power_mw = sk.typology_power_mw;
  ji.fading = Matrix(design.served.size(), sk.jammers.size());
  for (std::size_t r = 0; r < design.served.size(); ++r) {
    const auto t = static_cast<std::size_t>(design.served[r]);
    for (std::size_t j = 0; j < sk.jammers.size(); ++j) ji.fading(r, j) = sk.fading.at(t, j);
    ji.profits.push_back(sk.profits.at(t));
  }
  ji.budget = sk.budget;
  ji.nominal_balance.assign(estimates.begin(), estimates.end());
  ji.sir_threshold = net.sir_threshold;
  ji.noise_mw = net.noise_mw;
  ji.epsilon = epsilon ? *epsilon : default_epsilon(ji.nominal_balance, ji.sir_threshold, ji.noise_mw);
  ji.validate();
  return ji;
}

// As above with the seeded estimates of the skeleton.
inline JammingInstance make_jamming_instance(const NetworkInstance& net, const JammingSkeleton& sk,
                                             const NetworkDesign& design,
                                             std::optional<double> epsilon = std::nullopt) {
  const std::vector<double> est = estimate_balances(design.balances, sk.estimate_noise, sk.estimate_seed);
  return make_jamming_instance(net, sk, design, est, epsilon);
}

}  // namespace wnjam
