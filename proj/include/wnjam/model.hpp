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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wnjam/common.hpp"

namespace wnjam {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind { kBinary, kContinuous };
enum class RowSense { kLessEqual, kGreaterEqual, kEqual };
enum class ObjectiveSense { kMaximize, kMinimize };

struct Term {
  int var = 0;
  double coef = 0.0;
};

// Links a model column back to the domain entity it encodes, e.g. {"x", t, s}.
struct VarTag {
  std::string family;
  int i = -1;
  int j = -1;
};

struct Variable {
  std::string name;
  VarKind kind = VarKind::kContinuous;
  double lower = 0.0;
  double upper = 0.0;
  VarTag tag;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  RowSense sense = RowSense::kLessEqual;
  double rhs = 0.0;
};

// A linear model over binary and bounded continuous variables.
class MilpModel {
 public:
  int add_binary(std::string name, VarTag tag = {}) {
    return add_variable(Variable{std::move(name), VarKind::kBinary, 0.0, 1.0, std::move(tag)});
  }

  int add_continuous(std::string name, double lower, double upper, VarTag tag = {}) {
    return add_variable(Variable{std::move(name), VarKind::kContinuous, lower, upper, std::move(tag)});
  }

  int add_variable(Variable v) {
    require(v.lower <= v.upper, "model: variable '" + v.name + "' has lower > upper");
    if (v.kind == VarKind::kBinary) {
      require(v.lower >= 0.0 && v.upper <= 1.0, "model: binary bounds must lie in [0,1]");
    }
    vars_.push_back(std::move(v));
    objective_.push_back(0.0);
    return static_cast<int>(vars_.size()) - 1;
  }

  int add_row(Constraint row) {
    for (const Term& t : row.terms) {
      require(t.var >= 0 && t.var < num_variables(), "model: row '" + row.name + "' references unknown variable");
      require(std::isfinite(t.coef), "model: nonfinite coefficient in row '" + row.name + "'");
    }
    require(std::isfinite(row.rhs), "model: nonfinite rhs in row '" + row.name + "'");
    rows_.push_back(std::move(row));
    return static_cast<int>(rows_.size()) - 1;
  }

  void set_objective_sense(ObjectiveSense sense) { sense_ = sense; }
  void set_objective_coef(int var, double coef) { objective_.at(static_cast<std::size_t>(var)) = coef; }

  int num_variables() const { return static_cast<int>(vars_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }
  const std::vector<Variable>& variables() const { return vars_; }
  const Variable& variable(int j) const { return vars_.at(static_cast<std::size_t>(j)); }
  const std::vector<Constraint>& rows() const { return rows_; }
  const Constraint& row(int i) const { return rows_.at(static_cast<std::size_t>(i)); }
  const std::vector<double>& objective() const { return objective_; }
  ObjectiveSense objective_sense() const { return sense_; }

  // Column index of the variable tagged (family, i, j), or -1.
  int find(const std::string& family, int i, int j = -1) const {
    for (std::size_t k = 0; k < vars_.size(); ++k) {
      const VarTag& t = vars_[k].tag;
      if (t.family == family && t.i == i && t.j == j) return static_cast<int>(k);
    }
    return -1;
  }

  double objective_value(std::span<const double> x) const {
    double v = 0.0;
    for (std::size_t j = 0; j < objective_.size(); ++j) v += objective_[j] * x[j];
    return v;
  }

  double row_activity(int r, std::span<const double> x) const {
    double a = 0.0;
    for (const Term& t : row(r).terms) a += t.coef * x[static_cast<std::size_t>(t.var)];
    return a;
  }

  // Magnitude used to express row tolerances relatively: max(|rhs|, max_k |a_k x_k|).
  double row_scale(int r, std::span<const double> x) const {
    double s = std::abs(row(r).rhs);
    for (const Term& t : row(r).terms) s = std::max(s, std::abs(t.coef * x[static_cast<std::size_t>(t.var)]));
    return s;
  }

  // Amount by which row r is violated at x (0 when satisfied).
  double row_violation(int r, std::span<const double> x) const {
    const double a = row_activity(r, x);
    const Constraint& c = row(r);
    switch (c.sense) {
      case RowSense::kLessEqual: return std::max(0.0, a - c.rhs);
      case RowSense::kGreaterEqual: return std::max(0.0, c.rhs - a);
      case RowSense::kEqual: return std::abs(a - c.rhs);
    }
    return 0.0;
  }

  bool row_satisfied(int r, std::span<const double> x, double rel_tol = 1e-9) const {
    return row_violation(r, x) <= rel_tol * std::max(row_scale(r, x), 1e-300);
  }

  // Bounds, integrality and every row at relative tolerance `rel_tol`.
  bool is_feasible(std::span<const double> x, double rel_tol = 1e-9, double int_tol = 1e-6) const {
    if (x.size() != vars_.size()) return false;
    for (std::size_t j = 0; j < vars_.size(); ++j) {
      const Variable& v = vars_[j];
      const double slack = 1e-9 * std::max(1.0, std::max(std::abs(v.lower), std::abs(v.upper)));
      if (x[j] < v.lower - slack || x[j] > v.upper + slack) return false;
      if (v.kind == VarKind::kBinary && std::abs(x[j] - std::round(x[j])) > int_tol) return false;
    }
    for (int r = 0; r < num_rows(); ++r) {
      if (!row_satisfied(r, x, rel_tol)) return false;
    }
    return true;
  }

  void validate() const {
    for (const Variable& v : vars_) {
      require(v.lower <= v.upper, "model: bad bounds on '" + v.name + "'");
      if (v.kind == VarKind::kBinary) require(v.lower >= 0.0 && v.upper <= 1.0, "model: bad binary bounds");
    }
    for (const Constraint& c : rows_) {
      for (const Term& t : c.terms) require(t.var >= 0 && t.var < num_variables(), "model: undeclared variable");
    }
  }

 private:
  std::vector<Variable> vars_;
  std::vector<Constraint> rows_;
  std::vector<double> objective_;
  ObjectiveSense sense_ = ObjectiveSense::kMaximize;
};

namespace detail {

inline std::string lp_name(const std::string& name, const char* prefix, std::size_t index) {
  std::string out;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                    c == '.' || c == '(' || c == ')' || c == ',' || c == '[' || c == ']';
    out.push_back(ok ? c : '_');
  }
  if (out.empty() || (out[0] >= '0' && out[0] <= '9') || out[0] == '.') {
    out = std::string(prefix) + std::to_string(index) + (out.empty() ? "" : "_" + out);
  }
  return out;
}

inline void lp_number(std::ostream& os, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

inline void lp_terms(std::ostream& os, const std::vector<std::pair<double, std::string>>& terms) {
  if (terms.empty()) {
    os << " 0";
    return;
  }
  bool first = true;
  for (const auto& [c, n] : terms) {
    os << (c < 0 ? " - " : (first ? " " : " + "));
    lp_number(os, std::abs(c));
    os << ' ' << n;
    first = false;
  }
}

}  // namespace detail

// Writes `model` in the plain-text LP dialect documented in docs/lp_format.md.
inline void write_lp_format(const MilpModel& model, std::ostream& os) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(model.num_variables()));
  for (int j = 0; j < model.num_variables(); ++j) {
    names.push_back(detail::lp_name(model.variable(j).name, "v", static_cast<std::size_t>(j)));
  }
  os << "\\ wnjam LP export\n";
  os << (model.objective_sense() == ObjectiveSense::kMaximize ? "Maximize\n" : "Minimize\n");
  std::vector<std::pair<double, std::string>> terms;
  for (int j = 0; j < model.num_variables(); ++j) {
    const double c = model.objective()[static_cast<std::size_t>(j)];
    if (c != 0.0) terms.emplace_back(c, names[static_cast<std::size_t>(j)]);
  }
  os << " obj:";
  detail::lp_terms(os, terms);
  os << "\nSubject To\n";
  for (int r = 0; r < model.num_rows(); ++r) {
    const Constraint& c = model.row(r);
    terms.clear();
    for (const Term& t : c.terms) terms.emplace_back(t.coef, names[static_cast<std::size_t>(t.var)]);
    os << ' ' << detail::lp_name(c.name, "r", static_cast<std::size_t>(r)) << ':';
    detail::lp_terms(os, terms);
    os << (c.sense == RowSense::kLessEqual ? " <= " : c.sense == RowSense::kGreaterEqual ? " >= " : " = ");
    detail::lp_number(os, c.rhs);
    os << '\n';
  }
  os << "Bounds\n";
  for (int j = 0; j < model.num_variables(); ++j) {
    const Variable& v = model.variable(j);
    if (v.kind == VarKind::kBinary && v.lower == 0.0 && v.upper == 1.0) continue;
    os << ' ';
    detail::lp_number(os, v.lower);
    os << " <= " << names[static_cast<std::size_t>(j)] << " <= ";
    detail::lp_number(os, v.upper);
    os << '\n';
  }
  os << "Binaries\n";
  for (int j = 0; j < model.num_variables(); ++j) {
    if (model.variable(j).kind == VarKind::kBinary) os << ' ' << names[static_cast<std::size_t>(j)] << '\n';
  }
  os << "End\n";
}

}  // namespace wnjam
