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

// Bounded-variable simplex for the LP relaxations of MilpModel.
//
// Every row i is turned into an equality a_i x - r_i = 0 with a logical
// column r_i carrying the row bounds, so the working problem is
//
//   min c x  s.t.  [A | -I] (x, r) = 0,  lo <= (x, r) <= hi.
//
// Structural columns always have finite bounds; a logical has at least one
// finite bound, so a nonbasic column always sits at a finite bound. The basis
// inverse is kept as a dense m x m matrix, updated by elementary row
// operations and recomputed from scratch every kRefactorPeriod pivots.
//
// Two algorithms share the basis:
//  * a composite primal simplex (phase 1 minimizes the sum of bound
//    infeasibilities of basic columns, phase 2 the true cost), used from cold
//    starts and whenever the basis is dual infeasible;
//  * a dual simplex, used when a dual-feasible basis becomes primal infeasible
//    after a bound change or an appended row (the branch-and-bound case).
// Both use a two-pass Harris ratio test. A run of degenerate pivots switches
// pricing to Bland's rule until progress resumes.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "wnjam/common.hpp"
#include "wnjam/model.hpp"

namespace wnjam {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit, kNumericalFailure };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
    case LpStatus::kIterationLimit: return "iteration-limit";
    case LpStatus::kNumericalFailure: return "numerical-failure";
  }
  return "?";
}

struct LpSolution {
  LpStatus status = LpStatus::kNumericalFailure;
  std::vector<double> values;
  double objective = 0.0;
  long iterations = 0;
  // Multipliers in the model's own objective sense: c = A^T row_duals + reduced_costs.
  std::vector<double> row_duals;
  std::vector<double> reduced_costs;
};

struct LpBasis {
  std::vector<int> head;       // basic column of each row position
  std::vector<char> at_upper;  // per column; meaningful for nonbasic columns
};

class SimplexEngine {
 public:
  static constexpr double kPrimalTol = 1e-9;
  static constexpr double kDualTol = 1e-9;
  static constexpr double kPivotTol = 1e-9;
  static constexpr int kRefactorPeriod = 50;
  static constexpr int kStallLimit = 40;

  explicit SimplexEngine(const MilpModel& model) : n_(model.num_variables()), m_(0) {
    const double sign = model.objective_sense() == ObjectiveSense::kMaximize ? -1.0 : 1.0;
    sense_sign_ = sign;
    cols_.resize(static_cast<std::size_t>(n_));
    lo_.resize(static_cast<std::size_t>(n_));
    hi_.resize(static_cast<std::size_t>(n_));
    cost_.resize(static_cast<std::size_t>(n_));
    for (int j = 0; j < n_; ++j) {
      const Variable& v = model.variable(j);
      require(std::isfinite(v.lower) && std::isfinite(v.upper), "lp: variable bounds must be finite");
      lo_[static_cast<std::size_t>(j)] = v.lower;
      hi_[static_cast<std::size_t>(j)] = v.upper;
      cost_[static_cast<std::size_t>(j)] = sign * model.objective()[static_cast<std::size_t>(j)];
    }
    std::vector<std::vector<Term>> rows;
    rows.reserve(static_cast<std::size_t>(model.num_rows()));
    for (const Constraint& c : model.rows()) rows.push_back(merge_terms(c.terms));
    compute_scaling(rows);
    for (int j = 0; j < n_; ++j) {
      const double cs = col_scale_[static_cast<std::size_t>(j)];
      lo_[static_cast<std::size_t>(j)] /= cs;
      hi_[static_cast<std::size_t>(j)] /= cs;
    }
    double cmax = 0.0;
    for (int j = 0; j < n_; ++j) {
      cost_[static_cast<std::size_t>(j)] *= col_scale_[static_cast<std::size_t>(j)];
      cmax = std::max(cmax, std::abs(cost_[static_cast<std::size_t>(j)]));
    }
    cost_scale_ = cmax > 0.0 ? pow2_near(1.0 / cmax) : 1.0;
    for (double& c : cost_) c *= cost_scale_;
    x_.assign(static_cast<std::size_t>(n_), 0.0);
    at_upper_.assign(static_cast<std::size_t>(n_), 0);
    pos_.assign(static_cast<std::size_t>(n_), -1);
    for (int j = 0; j < n_; ++j) x_[static_cast<std::size_t>(j)] = lo_[static_cast<std::size_t>(j)];
    for (int i = 0; i < model.num_rows(); ++i) {
      const Constraint& c = model.row(i);
      append_row(rows[static_cast<std::size_t>(i)], c.sense, c.rhs, pending_row_scale_[static_cast<std::size_t>(i)]);
    }
    refactor();
  }

  int num_structural() const { return n_; }
  int num_rows() const { return m_; }
  long iterations() const { return iterations_; }

  // Bounds of structural column j in model units.
  void set_bounds(int j, double lower, double upper) {
    const auto k = static_cast<std::size_t>(j);
    require(lower <= upper, "lp: lower > upper");
    lo_[k] = lower / col_scale_[k];
    hi_[k] = upper / col_scale_[k];
    if (pos_[k] < 0) {
      x_[k] = at_upper_[k] ? hi_[k] : lo_[k];
      xb_dirty_ = true;
    }
  }

  double lower(int j) const { return lo_[static_cast<std::size_t>(j)] * col_scale_[static_cast<std::size_t>(j)]; }
  double upper(int j) const { return hi_[static_cast<std::size_t>(j)] * col_scale_[static_cast<std::size_t>(j)]; }

  // Appends a row; its logical column enters the basis, which keeps the basis
  // dual feasible, so the next solve() runs the dual simplex.
  int add_row(std::span<const Term> terms, RowSense sense, double rhs) {
    std::vector<Term> merged = merge_terms(std::vector<Term>(terms.begin(), terms.end()));
    double amax = 0.0;
    for (const Term& t : merged) {
      amax = std::max(amax, std::abs(t.coef * col_scale_[static_cast<std::size_t>(t.var)]));
    }
    const double rs = amax > 0.0 ? pow2_near(1.0 / amax) : 1.0;
    const int old_m = m_;
    append_row(merged, sense, rhs, rs);
    // Extend the inverse: new last row = (a_B^T Binv, -1).
    std::vector<double> nb(static_cast<std::size_t>(m_) * static_cast<std::size_t>(m_), 0.0);
    for (int r = 0; r < old_m; ++r) {
      std::copy_n(&binv_[static_cast<std::size_t>(r) * static_cast<std::size_t>(old_m)], old_m,
                  &nb[static_cast<std::size_t>(r) * static_cast<std::size_t>(m_)]);
    }
    std::vector<double> ab(static_cast<std::size_t>(old_m), 0.0);
    for (int k = 0; k < old_m; ++k) {
      const int h = head_[static_cast<std::size_t>(k)];
      if (h < n_) {
        const SparseCol& c = cols_[static_cast<std::size_t>(h)];
        for (std::size_t e = 0; e < c.idx.size(); ++e) {
          if (c.idx[e] == old_m) ab[static_cast<std::size_t>(k)] = c.val[e];
        }
      }
    }
    double* last = &nb[static_cast<std::size_t>(old_m) * static_cast<std::size_t>(m_)];
    for (int k = 0; k < old_m; ++k) {
      const double a = ab[static_cast<std::size_t>(k)];
      if (a == 0.0) continue;
      const double* br = &binv_[static_cast<std::size_t>(k) * static_cast<std::size_t>(old_m)];
      for (int c = 0; c < old_m; ++c) last[c] += a * br[c];
    }
    last[old_m] = -1.0;
    binv_ = std::move(nb);
    xb_dirty_ = true;
    return m_ - 1;
  }

  LpBasis basis() const { return LpBasis{head_, at_upper_}; }

  // Restores a basis saved earlier; rows appended since then get their logical
  // column basic.
  void load_basis(const LpBasis& b) {
    const std::size_t ncols = static_cast<std::size_t>(n_ + m_);
    if (b.head == head_ && b.at_upper.size() == at_upper_.size()) {
      at_upper_ = b.at_upper;
      reset_nonbasic_values();
      return;
    }
    std::fill(pos_.begin(), pos_.end(), -1);
    at_upper_.assign(ncols, 0);
    std::copy_n(b.at_upper.begin(), std::min(b.at_upper.size(), ncols), at_upper_.begin());
    const int old_m = static_cast<int>(b.head.size());
    for (int r = 0; r < m_; ++r) {
      int h = r < old_m ? b.head[static_cast<std::size_t>(r)] : n_ + r;
      // Column numbering of logicals is stable under row appends.
      head_[static_cast<std::size_t>(r)] = h;
    }
    for (int r = 0; r < m_; ++r) pos_[static_cast<std::size_t>(head_[static_cast<std::size_t>(r)])] = r;
    reset_nonbasic_values();
    refactor();
  }

  LpStatus solve() {
    if (xb_dirty_) compute_xb();
    status_ = run();
    return status_;
  }

  LpStatus status() const { return status_; }

  // Objective of the current point in model units and sense.
  double objective() const {
    double v = 0.0;
    for (int j = 0; j < n_; ++j) {
      v += cost_[static_cast<std::size_t>(j)] * x_[static_cast<std::size_t>(j)];
    }
    return sense_sign_ * v / cost_scale_;
  }

  double value(int j) const { return x_[static_cast<std::size_t>(j)] * col_scale_[static_cast<std::size_t>(j)]; }

  std::vector<double> values() const {
    std::vector<double> out(static_cast<std::size_t>(n_));
    for (int j = 0; j < n_; ++j) out[static_cast<std::size_t>(j)] = value(j);
    return out;
  }

  LpSolution solution() const {
    LpSolution s;
    s.status = status_;
    s.iterations = iterations_;
    if (status_ != LpStatus::kOptimal) return s;
    s.values = values();
    s.objective = objective();
    std::vector<double> y = duals(phase2_basic_costs());
    s.row_duals.resize(static_cast<std::size_t>(m_));
    for (int i = 0; i < m_; ++i) {
      s.row_duals[static_cast<std::size_t>(i)] =
          sense_sign_ * y[static_cast<std::size_t>(i)] * row_scale_[static_cast<std::size_t>(i)] / cost_scale_;
    }
    s.reduced_costs.resize(static_cast<std::size_t>(n_));
    for (int j = 0; j < n_; ++j) {
      const double d = pos_[static_cast<std::size_t>(j)] >= 0 ? 0.0 : reduced_cost(j, y);
      s.reduced_costs[static_cast<std::size_t>(j)] =
          sense_sign_ * d / (cost_scale_ * col_scale_[static_cast<std::size_t>(j)]);
    }
    return s;
  }

 private:
  struct SparseCol {
    std::vector<int> idx;
    std::vector<double> val;
  };

  static double pow2_near(double v) { return std::exp2(std::round(std::log2(v))); }

  static std::vector<Term> merge_terms(std::vector<Term> terms) {
    std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
    std::vector<Term> out;
    for (const Term& t : terms) {
      if (!out.empty() && out.back().var == t.var) {
        out.back().coef += t.coef;
      } else {
        out.push_back(t);
      }
    }
    std::erase_if(out, [](const Term& t) { return t.coef == 0.0; });
    return out;
  }

  // Geometric-mean passes followed by row equilibration; factors are powers of two.
  void compute_scaling(const std::vector<std::vector<Term>>& rows) {
    const std::size_t nr = rows.size();
    col_scale_.assign(static_cast<std::size_t>(n_), 1.0);
    pending_row_scale_.assign(nr, 1.0);
    for (int pass = 0; pass < 6; ++pass) {
      for (std::size_t i = 0; i < nr; ++i) {
        double lo = kInf, hi = 0.0;
        for (const Term& t : rows[i]) {
          const double a = std::abs(t.coef) * col_scale_[static_cast<std::size_t>(t.var)];
          lo = std::min(lo, a);
          hi = std::max(hi, a);
        }
        if (hi > 0.0) pending_row_scale_[i] = 1.0 / std::sqrt(lo * hi);
      }
      std::vector<double> clo(static_cast<std::size_t>(n_), kInf), chi(static_cast<std::size_t>(n_), 0.0);
      for (std::size_t i = 0; i < nr; ++i) {
        for (const Term& t : rows[i]) {
          const auto j = static_cast<std::size_t>(t.var);
          const double a = std::abs(t.coef) * pending_row_scale_[i];
          clo[j] = std::min(clo[j], a);
          chi[j] = std::max(chi[j], a);
        }
      }
      for (int j = 0; j < n_; ++j) {
        const auto k = static_cast<std::size_t>(j);
        if (chi[k] > 0.0) col_scale_[k] = 1.0 / std::sqrt(clo[k] * chi[k]);
      }
    }
    for (double& c : col_scale_) c = pow2_near(c);
    for (std::size_t i = 0; i < nr; ++i) {
      double hi = 0.0;
      for (const Term& t : rows[i]) hi = std::max(hi, std::abs(t.coef) * col_scale_[static_cast<std::size_t>(t.var)]);
      pending_row_scale_[i] = hi > 0.0 ? pow2_near(1.0 / hi) : 1.0;
    }
  }

  void append_row(const std::vector<Term>& terms, RowSense sense, double rhs, double rs) {
    const int i = m_++;
    row_scale_.push_back(rs);
    double act = 0.0;
    for (const Term& t : terms) {
      const auto j = static_cast<std::size_t>(t.var);
      const double a = t.coef * rs * col_scale_[j];
      cols_[j].idx.push_back(i);
      cols_[j].val.push_back(a);
      act += a * x_[j];
    }
    const double b = rhs * rs;
    double lo = -kInf, hi = kInf;
    if (sense != RowSense::kGreaterEqual) hi = b;
    if (sense != RowSense::kLessEqual) lo = b;
    lo_.push_back(lo);
    hi_.push_back(hi);
    cost_.push_back(0.0);
    x_.push_back(act);
    at_upper_.push_back(0);
    pos_.push_back(i);
    head_.push_back(n_ + i);
  }

  void reset_nonbasic_values() {
    const int ncols = n_ + m_;
    for (int j = 0; j < ncols; ++j) {
      const auto k = static_cast<std::size_t>(j);
      if (pos_[k] >= 0) continue;
      if (at_upper_[k] && std::isfinite(hi_[k])) {
        x_[k] = hi_[k];
      } else if (std::isfinite(lo_[k])) {
        x_[k] = lo_[k];
        at_upper_[k] = 0;
      } else {
        x_[k] = hi_[k];
        at_upper_[k] = 1;
      }
    }
    xb_dirty_ = true;
  }

  // Dense column of `col` into `out` (size m).
  void load_column(int col, std::vector<double>& out) const {
    std::fill(out.begin(), out.end(), 0.0);
    if (col >= n_) {
      out[static_cast<std::size_t>(col - n_)] = -1.0;
      return;
    }
    const SparseCol& c = cols_[static_cast<std::size_t>(col)];
    for (std::size_t e = 0; e < c.idx.size(); ++e) out[static_cast<std::size_t>(c.idx[e])] = c.val[e];
  }

  // Binv * a_col.
  void ftran(int col, std::vector<double>& out) const {
    const auto m = static_cast<std::size_t>(m_);
    out.assign(m, 0.0);
    if (col >= n_) {
      const auto r = static_cast<std::size_t>(col - n_);
      for (std::size_t i = 0; i < m; ++i) out[i] = -binv_[i * m + r];
      return;
    }
    const SparseCol& c = cols_[static_cast<std::size_t>(col)];
    for (std::size_t e = 0; e < c.idx.size(); ++e) {
      const auto r = static_cast<std::size_t>(c.idx[e]);
      const double v = c.val[e];
      for (std::size_t i = 0; i < m; ++i) out[i] += binv_[i * m + r] * v;
    }
  }

  double dot_column(int col, const std::vector<double>& y) const {
    if (col >= n_) return -y[static_cast<std::size_t>(col - n_)];
    const SparseCol& c = cols_[static_cast<std::size_t>(col)];
    double s = 0.0;
    for (std::size_t e = 0; e < c.idx.size(); ++e) s += c.val[e] * y[static_cast<std::size_t>(c.idx[e])];
    return s;
  }

  double reduced_cost(int col, const std::vector<double>& y) const {
    return cost_[static_cast<std::size_t>(col)] - dot_column(col, y);
  }

  std::vector<double> phase2_basic_costs() const {
    std::vector<double> cb(static_cast<std::size_t>(m_));
    for (int r = 0; r < m_; ++r) cb[static_cast<std::size_t>(r)] = cost_[static_cast<std::size_t>(head_[static_cast<std::size_t>(r)])];
    return cb;
  }

  // y^T = cb^T Binv.
  std::vector<double> duals(const std::vector<double>& cb) const {
    const auto m = static_cast<std::size_t>(m_);
    std::vector<double> y(m, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
      const double c = cb[r];
      if (c == 0.0) continue;
      const double* row = &binv_[r * m];
      for (std::size_t i = 0; i < m; ++i) y[i] += c * row[i];
    }
    return y;
  }

  // Gauss-Jordan inversion of the basis. Dependent basic columns are swapped
  // for logicals of uncovered rows and the factorization is repeated.
  void refactor() {
    const auto m = static_cast<std::size_t>(m_);
    for (int attempt = 0; attempt <= m_; ++attempt) {
      std::vector<double> work(m * m, 0.0);  // B, column k = column of head[k]
      std::vector<double> col(m);
      for (std::size_t k = 0; k < m; ++k) {
        load_column(head_[k], col);
        for (std::size_t i = 0; i < m; ++i) work[i * m + k] = col[i];
      }
      std::vector<double> inv(m * m, 0.0);
      for (std::size_t i = 0; i < m; ++i) inv[i * m + i] = 1.0;
      std::vector<int> pivot_row(m, -1);
      std::vector<char> used(m, 0);
      std::vector<std::size_t> dependent;
      // Logical columns first so that their rows are claimed by them.
      std::vector<std::size_t> order(m);
      for (std::size_t k = 0; k < m; ++k) order[k] = k;
      std::stable_partition(order.begin(), order.end(), [&](std::size_t k) { return head_[k] >= n_; });
      for (std::size_t k : order) {
        std::size_t p = m;
        double best = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          if (used[i]) continue;
          const double v = std::abs(work[i * m + k]);
          if (v > best) {
            best = v;
            p = i;
          }
        }
        if (p == m || best < 1e-11) {
          dependent.push_back(k);
          continue;
        }
        used[p] = 1;
        pivot_row[k] = static_cast<int>(p);
        const double piv = work[p * m + k];
        for (std::size_t c = 0; c < m; ++c) {
          work[p * m + c] /= piv;
          inv[p * m + c] /= piv;
        }
        for (std::size_t i = 0; i < m; ++i) {
          if (i == p) continue;
          const double f = work[i * m + k];
          if (f == 0.0) continue;
          double* wi = &work[i * m];
          double* ii = &inv[i * m];
          const double* wp = &work[p * m];
          const double* ip = &inv[p * m];
          for (std::size_t c = 0; c < m; ++c) {
            wi[c] -= f * wp[c];
            ii[c] -= f * ip[c];
          }
        }
      }
      if (dependent.empty()) {
        binv_.assign(m * m, 0.0);
        for (std::size_t k = 0; k < m; ++k) {
          std::copy_n(&inv[static_cast<std::size_t>(pivot_row[k]) * m], m, &binv_[k * m]);
        }
        since_refactor_ = 0;
        xb_dirty_ = true;
        compute_xb();
        return;
      }
      std::vector<std::size_t> free_rows;
      for (std::size_t i = 0; i < m; ++i) {
        if (!used[i]) free_rows.push_back(i);
      }
      for (std::size_t d = 0; d < dependent.size() && d < free_rows.size(); ++d) {
        const std::size_t k = dependent[d];
        const int out = head_[k];
        const int in = n_ + static_cast<int>(free_rows[d]);
        pos_[static_cast<std::size_t>(out)] = -1;
        const auto o = static_cast<std::size_t>(out);
        // Park the evicted column at its nearest finite bound.
        if (!std::isfinite(lo_[o]) || (std::isfinite(hi_[o]) && std::abs(x_[o] - hi_[o]) < std::abs(x_[o] - lo_[o]))) {
          x_[o] = hi_[o];
          at_upper_[o] = 1;
        } else {
          x_[o] = lo_[o];
          at_upper_[o] = 0;
        }
        head_[k] = in;
        pos_[static_cast<std::size_t>(in)] = static_cast<int>(k);
      }
    }
    throw SolverError("lp: basis repair failed");
  }

  void compute_xb() {
    const auto m = static_cast<std::size_t>(m_);
    std::vector<double> u(m, 0.0);
    for (int j = 0; j < n_ + m_; ++j) {
      const auto k = static_cast<std::size_t>(j);
      if (pos_[k] >= 0 || x_[k] == 0.0) continue;
      if (j >= n_) {
        u[static_cast<std::size_t>(j - n_)] -= x_[k];
      } else {
        const SparseCol& c = cols_[k];
        for (std::size_t e = 0; e < c.idx.size(); ++e) u[static_cast<std::size_t>(c.idx[e])] += c.val[e] * x_[k];
      }
    }
    for (std::size_t r = 0; r < m; ++r) {
      double s = 0.0;
      const double* row = &binv_[r * m];
      for (std::size_t i = 0; i < m; ++i) s += row[i] * u[i];
      x_[static_cast<std::size_t>(head_[r])] = -s;
    }
    xb_dirty_ = false;
  }

  double infeasibility(int col) const {
    const auto k = static_cast<std::size_t>(col);
    if (x_[k] < lo_[k] - kPrimalTol) return lo_[k] - x_[k];
    if (x_[k] > hi_[k] + kPrimalTol) return x_[k] - hi_[k];
    return 0.0;
  }

  double total_infeasibility() const {
    double s = 0.0;
    for (int r = 0; r < m_; ++r) s += infeasibility(head_[static_cast<std::size_t>(r)]);
    return s;
  }

  bool is_fixed(int col) const {
    const auto k = static_cast<std::size_t>(col);
    return hi_[k] - lo_[k] <= 0.0;
  }

  // Direction in which nonbasic `col` may improve given reduced cost d, or 0.
  int improving_direction(int col, double d) const {
    const auto k = static_cast<std::size_t>(col);
    if (is_fixed(col)) return 0;
    if (d < -kDualTol && (!at_upper_[k] || !std::isfinite(hi_[k])) && x_[k] < hi_[k]) return +1;
    if (d > kDualTol && (at_upper_[k] || !std::isfinite(lo_[k])) && x_[k] > lo_[k]) return -1;
    return 0;
  }

  // Replaces head[r] by `enter`, updating the inverse with pivot column alpha.
  void pivot(int r, int enter, const std::vector<double>& alpha) {
    const auto m = static_cast<std::size_t>(m_);
    const auto rr = static_cast<std::size_t>(r);
    const double piv = alpha[rr];
    double* prow = &binv_[rr * m];
    for (std::size_t c = 0; c < m; ++c) prow[c] /= piv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == rr) continue;
      const double f = alpha[i];
      if (f == 0.0) continue;
      double* row = &binv_[i * m];
      for (std::size_t c = 0; c < m; ++c) row[c] -= f * prow[c];
    }
    const int leave = head_[rr];
    pos_[static_cast<std::size_t>(leave)] = -1;
    head_[rr] = enter;
    pos_[static_cast<std::size_t>(enter)] = r;
    ++since_refactor_;
  }

  void park_leaving(int col, bool to_upper) {
    const auto k = static_cast<std::size_t>(col);
    at_upper_[k] = to_upper ? 1 : 0;
    x_[k] = to_upper ? hi_[k] : lo_[k];
  }

  bool dual_feasible(const std::vector<double>& y) const {
    for (int j = 0; j < n_ + m_; ++j) {
      if (pos_[static_cast<std::size_t>(j)] >= 0) continue;
      if (improving_direction(j, reduced_cost(j, y)) != 0) {
        const double d = std::abs(reduced_cost(j, y));
        if (d > 1e3 * kDualTol) return false;
      }
    }
    return true;
  }

  LpStatus run() {
    const long max_iter = 200L * (n_ + m_) + 20000;
    bool primal_mode = false;
    int mode = -1;  // 0 phase 1, 1 phase 2, 2 dual; progress is tracked per mode
    long last_progress_iter = iterations_;
    double best_measure = kInf;
    bool bland = false;
    int verify_rounds = 0;
    int failures = 0;
    for (long it = 0; it < max_iter; ++it) {
      if (since_refactor_ >= kRefactorPeriod) refactor();
      const double infeas = total_infeasibility();
      const bool primal_feasible = infeas == 0.0;
      std::vector<double> y = duals(phase2_basic_costs());
      if (!primal_mode && !primal_feasible && !dual_feasible(y)) primal_mode = true;

      LpStatus step;
      double measure;
      int step_mode;
      if (primal_feasible || primal_mode) {
        if (!primal_feasible) {
          std::vector<double> cb(static_cast<std::size_t>(m_), 0.0);
          for (int r = 0; r < m_; ++r) {
            const auto k = static_cast<std::size_t>(head_[static_cast<std::size_t>(r)]);
            if (x_[k] < lo_[k] - kPrimalTol) cb[static_cast<std::size_t>(r)] = -1.0;
            if (x_[k] > hi_[k] + kPrimalTol) cb[static_cast<std::size_t>(r)] = 1.0;
          }
          y = duals(cb);
          measure = infeas;
          step_mode = 0;
          step = primal_step(y, /*phase1=*/true, bland);
        } else {
          measure = objective_internal();
          step_mode = 1;
          step = primal_step(y, /*phase1=*/false, bland);
        }
      } else {
        measure = -objective_internal();
        step_mode = 2;
        step = dual_step(y, bland);
      }
      if (step_mode != mode) {
        mode = step_mode;
        best_measure = kInf;
        last_progress_iter = iterations_;
        bland = false;
      }
      if (step == LpStatus::kNumericalFailure) {
        if (++failures > 5) return LpStatus::kNumericalFailure;
        refactor();
        continue;
      }
      if (step == LpStatus::kOptimal || step == LpStatus::kInfeasible || step == LpStatus::kUnbounded) {
        // Confirm on a fresh factorization before reporting.
        if (verify_rounds < 3 && since_refactor_ > 0) {
          ++verify_rounds;
          refactor();
          continue;
        }
        if (step == LpStatus::kOptimal && total_infeasibility() > 0.0) {
          primal_mode = true;
          continue;
        }
        return step;
      }
      verify_rounds = 0;
      ++iterations_;
      if (measure < best_measure - 1e-12 * std::max(1.0, std::abs(best_measure))) {
        best_measure = measure;
        last_progress_iter = iterations_;
        bland = false;
      } else if (iterations_ - last_progress_iter > kStallLimit) {
        bland = true;
      }
    }
    return LpStatus::kIterationLimit;
  }

  double objective_internal() const {
    double v = 0.0;
    for (int j = 0; j < n_; ++j) v += cost_[static_cast<std::size_t>(j)] * x_[static_cast<std::size_t>(j)];
    return v;
  }

  // One primal iteration; returns kOptimal when no column prices out,
  // kInfeasible when phase 1 is stuck, otherwise kIterationLimit as "continue".
  LpStatus primal_step(const std::vector<double>& y, bool phase1, bool bland) {
    int enter = -1;
    int dir = 0;
    double best = 0.0;
    for (int j = 0; j < n_ + m_; ++j) {
      if (pos_[static_cast<std::size_t>(j)] >= 0) continue;
      const double d = (phase1 ? 0.0 : cost_[static_cast<std::size_t>(j)]) - dot_column(j, y);
      const int dj = improving_direction(j, d);
      if (dj == 0) continue;
      if (bland) {
        enter = j;
        dir = dj;
        break;
      }
      if (std::abs(d) > best) {
        best = std::abs(d);
        enter = j;
        dir = dj;
      }
    }
    if (enter < 0) return phase1 ? LpStatus::kInfeasible : LpStatus::kOptimal;

    std::vector<double> alpha;
    ftran(enter, alpha);
    const auto m = static_cast<std::size_t>(m_);
    // Pass 1: largest step with bounds relaxed by the tolerance.
    double theta_max = kInf;
    auto limit = [&](std::size_t i, bool relaxed, double& ratio) -> bool {
      const double a = alpha[i];
      if (std::abs(a) < kPivotTol) return false;
      const double g = -dir * a;  // rate of change of x_B[i]
      const auto k = static_cast<std::size_t>(head_[i]);
      const double tol = relaxed ? kPrimalTol : 0.0;
      const double xv = x_[k];
      if (g < 0.0) {
        double bound;
        if (phase1 && xv > hi_[k] + kPrimalTol) {
          bound = hi_[k];
        } else if (phase1 && xv < lo_[k] - kPrimalTol) {
          return false;
        } else {
          bound = lo_[k];
        }
        if (!std::isfinite(bound)) return false;
        ratio = std::max(0.0, (xv - bound + tol) / -g);
        return true;
      }
      double bound;
      if (phase1 && xv < lo_[k] - kPrimalTol) {
        bound = lo_[k];
      } else if (phase1 && xv > hi_[k] + kPrimalTol) {
        return false;
      } else {
        bound = hi_[k];
      }
      if (!std::isfinite(bound)) return false;
      ratio = std::max(0.0, (bound - xv + tol) / g);
      return true;
    };
    for (std::size_t i = 0; i < m; ++i) {
      double ratio;
      if (limit(i, true, ratio)) theta_max = std::min(theta_max, ratio);
    }
    const auto e = static_cast<std::size_t>(enter);
    const double flip = hi_[e] - lo_[e];
    int leave_row = -1;
    double theta = kInf;
    if (std::isfinite(theta_max)) {
      double best_pivot = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        double ratio;
        if (!limit(i, false, ratio) || ratio > theta_max) continue;
        const double a = std::abs(alpha[i]);
        const bool better = bland ? (leave_row < 0 || head_[i] < head_[static_cast<std::size_t>(leave_row)])
                                  : a > best_pivot;
        if (better) {
          best_pivot = a;
          leave_row = static_cast<int>(i);
          theta = ratio;
        }
      }
    }
    if (std::isfinite(flip) && flip <= theta) {
      // Bound flip of the entering column; the basis is unchanged.
      for (std::size_t i = 0; i < m; ++i) x_[static_cast<std::size_t>(head_[i])] += -dir * alpha[i] * flip;
      at_upper_[e] = dir > 0 ? 1 : 0;
      x_[e] = dir > 0 ? hi_[e] : lo_[e];
      return LpStatus::kIterationLimit;
    }
    if (leave_row < 0) return phase1 ? LpStatus::kNumericalFailure : LpStatus::kUnbounded;

    const auto r = static_cast<std::size_t>(leave_row);
    const int leave = head_[r];
    const auto lk = static_cast<std::size_t>(leave);
    const double g = -dir * alpha[r];
    // The bound the leaving column is heading to.
    bool to_upper;
    if (g < 0.0) {
      to_upper = phase1 && x_[lk] > hi_[lk] + kPrimalTol;
    } else {
      to_upper = !(phase1 && x_[lk] < lo_[lk] - kPrimalTol);
    }
    for (std::size_t i = 0; i < m; ++i) x_[static_cast<std::size_t>(head_[i])] += -dir * alpha[i] * theta;
    x_[e] += dir * theta;
    pivot(leave_row, enter, alpha);
    park_leaving(leave, to_upper);
    return LpStatus::kIterationLimit;
  }

  LpStatus dual_step(const std::vector<double>& y, bool bland) {
    const auto m = static_cast<std::size_t>(m_);
    int r = -1;
    double worst = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double v = infeasibility(head_[i]);
      if (v <= 0.0) continue;
      const bool better = bland ? (r < 0 || head_[i] < head_[static_cast<std::size_t>(r)]) : v > worst;
      if (better) {
        worst = v;
        r = static_cast<int>(i);
      }
    }
    if (r < 0) return LpStatus::kOptimal;
    const auto rr = static_cast<std::size_t>(r);
    const int leave = head_[rr];
    const auto lk = static_cast<std::size_t>(leave);
    const bool below = x_[lk] < lo_[lk];
    // rho = e_r^T Binv.
    std::vector<double> rho(&binv_[rr * m], &binv_[rr * m] + m);
    // Eligible entering columns: moving them in their feasible direction pushes
    // x_r towards the violated bound.
    int enter = -1;
    double theta_max = kInf;
    std::vector<std::pair<int, double>> cand;  // (column, alpha_r)
    for (int j = 0; j < n_ + m_; ++j) {
      const auto k = static_cast<std::size_t>(j);
      if (pos_[k] >= 0 || is_fixed(j)) continue;
      const double a = dot_column(j, rho);
      if (std::abs(a) < kPivotTol) continue;
      // x_r changes by -a * dx_j.
      const bool can_increase = !at_upper_[k] && x_[k] < hi_[k];
      const bool can_decrease = at_upper_[k] && x_[k] > lo_[k];
      bool ok = false;
      if (below) {
        ok = (can_increase && a < 0.0) || (can_decrease && a > 0.0);
      } else {
        ok = (can_increase && a > 0.0) || (can_decrease && a < 0.0);
      }
      if (!ok) continue;
      const double d = reduced_cost(j, y);
      const double ratio = (std::abs(d) + kDualTol) / std::abs(a);
      theta_max = std::min(theta_max, ratio);
      cand.emplace_back(j, a);
    }
    if (cand.empty()) return LpStatus::kInfeasible;
    double best_pivot = 0.0;
    for (const auto& [j, a] : cand) {
      const double ratio = std::abs(reduced_cost(j, y)) / std::abs(a);
      if (ratio > theta_max) continue;
      const bool better = bland ? (enter < 0 || j < enter) : std::abs(a) > best_pivot;
      if (better) {
        best_pivot = std::abs(a);
        enter = j;
      }
    }
    std::vector<double> alpha;
    ftran(enter, alpha);
    if (std::abs(alpha[rr]) < kPivotTol) {
      refactor();
      return LpStatus::kIterationLimit;
    }
    const double target = below ? lo_[lk] : hi_[lk];
    const double dx = (x_[lk] - target) / alpha[rr];
    for (std::size_t i = 0; i < m; ++i) x_[static_cast<std::size_t>(head_[i])] -= alpha[i] * dx;
    x_[static_cast<std::size_t>(enter)] += dx;
    pivot(r, enter, alpha);
    park_leaving(leave, !below);
    return LpStatus::kIterationLimit;
  }

  int n_;
  int m_;
  double sense_sign_ = 1.0;
  double cost_scale_ = 1.0;
  std::vector<SparseCol> cols_;
  std::vector<double> col_scale_;
  std::vector<double> row_scale_;
  std::vector<double> pending_row_scale_;
  std::vector<double> lo_, hi_, cost_, x_;
  std::vector<char> at_upper_;
  std::vector<int> pos_;
  std::vector<int> head_;
  std::vector<double> binv_;
  int since_refactor_ = 0;
  long iterations_ = 0;
  bool xb_dirty_ = true;
  LpStatus status_ = LpStatus::kNumericalFailure;
};

// Solves the continuous relaxation of `model`.
inline LpSolution lp_solve(const MilpModel& model) {
  SimplexEngine engine(model);
  engine.solve();
  return engine.solution();
}

}  // namespace wnjam
