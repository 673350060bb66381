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

// Test-only reference solvers. Nothing here calls into the simplex, the
// branch-and-bound or the model builders, so they can be used as independent
// oracles for them.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include "wnjam/model.hpp"
#include "wnjam/netmodel.hpp"

namespace wnjam::testing {

// Maximum of c.x over {lo <= x <= hi, A x (sense) b} for tiny n by enumerating
// every vertex (n active constraints solved with Gaussian elimination).
// Returns nullopt when infeasible.
struct DenseLp {
  std::vector<double> c;
  std::vector<double> lo, hi;
  std::vector<std::vector<double>> a;
  std::vector<RowSense> sense;
  std::vector<double> b;
};

inline std::optional<double> vertex_enumeration_max(const DenseLp& lp) {
  const std::size_t n = lp.c.size();
  // Hyperplanes: rows and both bounds of every variable.
  std::vector<std::vector<double>> planes;
  std::vector<double> rhs;
  for (std::size_t i = 0; i < lp.a.size(); ++i) {
    planes.push_back(lp.a[i]);
    rhs.push_back(lp.b[i]);
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    planes.push_back(e);
    rhs.push_back(lp.lo[j]);
    planes.push_back(e);
    rhs.push_back(lp.hi[j]);
  }
  auto feasible = [&](const std::vector<double>& x) {
    for (std::size_t j = 0; j < n; ++j) {
      if (x[j] < lp.lo[j] - 1e-9 || x[j] > lp.hi[j] + 1e-9) return false;
    }
    for (std::size_t i = 0; i < lp.a.size(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += lp.a[i][j] * x[j];
      const double tol = 1e-9 * std::max(1.0, std::abs(lp.b[i]));
      if (lp.sense[i] == RowSense::kLessEqual && s > lp.b[i] + tol) return false;
      if (lp.sense[i] == RowSense::kGreaterEqual && s < lp.b[i] - tol) return false;
      if (lp.sense[i] == RowSense::kEqual && std::abs(s - lp.b[i]) > tol) return false;
    }
    return true;
  };
  std::optional<double> best;
  std::vector<std::size_t> pick(n);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t depth) {
    if (depth == n) {
      std::vector<std::vector<double>> m(n, std::vector<double>(n + 1));
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) m[r][c] = planes[pick[r]][c];
        m[r][n] = rhs[pick[r]];
      }
      for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t r = k + 1; r < n; ++r) {
          if (std::abs(m[r][k]) > std::abs(m[p][k])) p = r;
        }
        if (std::abs(m[p][k]) < 1e-12) return;
        std::swap(m[p], m[k]);
        for (std::size_t r = 0; r < n; ++r) {
          if (r == k) continue;
          const double f = m[r][k] / m[k][k];
          for (std::size_t c = k; c <= n; ++c) m[r][c] -= f * m[k][c];
        }
      }
      std::vector<double> x(n);
      for (std::size_t k = 0; k < n; ++k) x[k] = m[k][n] / m[k][k];
      if (!feasible(x)) return;
      double v = 0.0;
      for (std::size_t j = 0; j < n; ++j) v += lp.c[j] * x[j];
      if (!best || v > *best) best = v;
      return;
    }
    for (std::size_t i = start; i < planes.size(); ++i) {
      pick[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

// Maximum of a pure binary program by enumerating all 2^n points.
inline std::optional<double> enumerate_binary_max(const MilpModel& model) {
  const int n = model.num_variables();
  std::optional<double> best;
  std::vector<double> x(static_cast<std::size_t>(n));
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    for (int j = 0; j < n; ++j) x[static_cast<std::size_t>(j)] = (mask >> j) & 1U ? 1.0 : 0.0;
    bool ok = true;
    for (int r = 0; r < model.num_rows() && ok; ++r) {
      double s = 0.0;
      for (const Term& t : model.row(r).terms) s += t.coef * x[static_cast<std::size_t>(t.var)];
      const Constraint& c = model.row(r);
      if (c.sense == RowSense::kLessEqual) ok = s <= c.rhs + 1e-9;
      if (c.sense == RowSense::kGreaterEqual) ok = s >= c.rhs - 1e-9;
      if (c.sense == RowSense::kEqual) ok = std::abs(s - c.rhs) <= 1e-9;
    }
    if (!ok) continue;
    double v = 0.0;
    for (int j = 0; j < n; ++j) v += model.objective()[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
    if (!best || v > *best) best = v;
  }
  return best;
}

// Random pure binary program with integer data; `seed` fixes everything.
inline MilpModel random_binary_program(std::uint64_t seed, int max_vars = 12) {
  std::mt19937_64 rng(seed);
  auto uni = [&](int lo, int hi) { return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1)); };
  MilpModel m;
  const int n = uni(2, max_vars);
  for (int j = 0; j < n; ++j) {
    m.add_binary("b" + std::to_string(j));
    m.set_objective_coef(j, uni(-3, 12));
  }
  const int rows = uni(1, 5);
  for (int r = 0; r < rows; ++r) {
    Constraint c;
    c.name = "r" + std::to_string(r);
    int total = 0;
    for (int j = 0; j < n; ++j) {
      if (uni(0, 2) == 0) continue;
      const int a = uni(-2, 9);
      c.terms.push_back({j, static_cast<double>(a)});
      total += std::max(a, 0);
    }
    c.sense = uni(0, 5) == 0 ? RowSense::kGreaterEqual : RowSense::kLessEqual;
    c.rhs = c.sense == RowSense::kLessEqual ? uni(0, std::max(1, total * 2 / 3)) : uni(-3, 2);
    m.add_row(c);
  }
  m.set_objective_sense(ObjectiveSense::kMaximize);
  return m;
}

}  // namespace wnjam::testing
