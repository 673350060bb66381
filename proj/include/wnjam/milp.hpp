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

// LP-based branch-and-bound over binary variables with a lazy-constraint hook.
//
// Nodes are explored best bound first (deeper node on ties, then creation
// order), branching on the most fractional binary. Children inherit the
// parent's LP bound and basis and are solved lazily when popped, so a child
// LP is usually a handful of dual simplex pivots away from its parent.
//
// Whenever a node relaxation is integral the candidate is handed to the
// incumbent callback. A returned cut is added to the global row set, the
// candidate is discarded and the same node is solved again; otherwise the
// candidate becomes the incumbent if it improves on it.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wnjam/lp.hpp"
#include "wnjam/model.hpp"

namespace wnjam {

struct SolveLimits {
  std::int64_t node_limit = std::numeric_limits<std::int64_t>::max();
  double time_limit_seconds = kInf;
  // Nodes whose bound is within relative_gap of the incumbent are pruned.
  double relative_gap = 0.0;
};

enum class MilpStatus { kOptimal, kInfeasible, kBudgetLimit };

inline const char* to_string(MilpStatus s) {
  switch (s) {
    case MilpStatus::kOptimal: return "optimal";
    case MilpStatus::kInfeasible: return "infeasible";
    case MilpStatus::kBudgetLimit: return "budget-limit";
  }
  return "?";
}

struct Cut {
  std::vector<Term> terms;
  RowSense sense = RowSense::kLessEqual;
  double rhs = 0.0;
  std::string name = "cut";
};

// Receives an integral candidate (binaries rounded) and returns the cuts it
// violates; an empty list accepts the candidate.
using IncumbentCallback = std::function<std::vector<Cut>(std::span<const double>)>;

// Maps a node's LP point to integral candidates.
using RoundingHeuristic = std::function<std::vector<std::vector<double>>(std::span<const double>)>;

// Optional primal help: starting points and a rounding heuristic run at the
// root and then every `heuristic_period` nodes. Candidates go through the
// same feasibility check and incumbent callback as integral LP points.
struct SearchHints {
  std::vector<std::vector<double>> starts;
  RoundingHeuristic heuristic;
  int heuristic_period = 10;
};

struct MilpSolution {
  MilpStatus status = MilpStatus::kInfeasible;
  bool has_incumbent = false;
  std::vector<double> values;
  double objective = 0.0;
  double best_bound = 0.0;
  std::int64_t nodes = 0;
  int cuts_added = 0;
  long lp_iterations = 0;
  std::vector<Cut> cuts;
};

namespace detail {

struct BbNode {
  std::int64_t id = 0;
  int depth = 0;
  double bound = 0.0;  // in maximization form
  std::vector<std::pair<int, char>> fixings;
  std::shared_ptr<const LpBasis> basis;
};

struct BbNodeOrder {
  bool operator()(const BbNode& a, const BbNode& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.id > b.id;
  }
};

inline bool integral_objective(const MilpModel& model) {
  for (int j = 0; j < model.num_variables(); ++j) {
    const double c = model.objective()[static_cast<std::size_t>(j)];
    if (c == 0.0) continue;
    if (model.variable(j).kind != VarKind::kBinary || c != std::round(c)) return false;
  }
  return true;
}

}  // namespace detail

inline MilpSolution bb_solve(const MilpModel& model, const IncumbentCallback& on_incumbent = {},
                             const SolveLimits& limits = {}, const SearchHints& hints = {}) {
  model.validate();
  const auto start = std::chrono::steady_clock::now();
  const double sign = model.objective_sense() == ObjectiveSense::kMaximize ? 1.0 : -1.0;
  const bool integral_obj = detail::integral_objective(model);
  constexpr double kIntTol = 1e-6;

  MilpModel working = model;  // accumulates cuts for candidate checks
  SimplexEngine engine(model);
  std::vector<int> binaries;
  for (int j = 0; j < model.num_variables(); ++j) {
    if (model.variable(j).kind == VarKind::kBinary) binaries.push_back(j);
  }

  MilpSolution out;
  double incumbent = -kInf;  // maximization form
  auto prunable = [&](double bound) {
    if (!out.has_incumbent) return false;
    if (integral_obj) return std::floor(bound + 1e-6) <= incumbent + 0.5;
    const double tol = 1e-9 * std::max(1.0, std::abs(incumbent)) + limits.relative_gap * std::abs(incumbent);
    return bound <= incumbent + tol;
  };

  // Runs the callback on an integral point; returns true if it produced cuts.
  auto offer = [&](std::vector<double> x) {
    for (int j : binaries) x[static_cast<std::size_t>(j)] = std::round(x[static_cast<std::size_t>(j)]);
    const double value = sign * working.objective_value(x);
    if (out.has_incumbent && value <= incumbent) return false;
    if (!working.is_feasible(x, 1e-6)) return false;
    if (on_incumbent) {
      std::vector<Cut> cuts = on_incumbent(x);
      if (!cuts.empty()) {
        for (Cut& c : cuts) {
          working.add_row(Constraint{c.name, c.terms, c.sense, c.rhs});
          engine.add_row(c.terms, c.sense, c.rhs);
          out.cuts.push_back(std::move(c));
          ++out.cuts_added;
        }
        return true;
      }
    }
    incumbent = value;
    out.has_incumbent = true;
    out.values = std::move(x);
    return false;
  };
  for (const auto& x : hints.starts) {
    require(x.size() == static_cast<std::size_t>(model.num_variables()), "bb_solve: start has wrong size");
    offer(x);
  }

  std::priority_queue<detail::BbNode, std::vector<detail::BbNode>, detail::BbNodeOrder> open;
  std::int64_t next_id = 0;
  open.push(detail::BbNode{next_id++, 0, kInf, {}, nullptr});

  bool hit_limit = false;
  double limit_bound = -kInf;
  while (!open.empty()) {
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (out.nodes >= limits.node_limit || elapsed > limits.time_limit_seconds) {
      hit_limit = true;
      break;
    }
    detail::BbNode node = open.top();
    open.pop();
    if (prunable(node.bound)) continue;
    ++out.nodes;

    for (int j : binaries) {
      const Variable& v = model.variable(j);
      engine.set_bounds(j, v.lower, v.upper);
    }
    for (const auto& [j, val] : node.fixings) engine.set_bounds(j, val, val);
    if (node.basis) engine.load_basis(*node.basis);

    for (;;) {
      LpStatus st = engine.solve();
      if (st == LpStatus::kIterationLimit || st == LpStatus::kNumericalFailure) {
        throw SolverError(std::string("bb_solve: LP relaxation failed (") + to_string(st) + ")");
      }
      if (st != LpStatus::kOptimal) break;  // infeasible node
      const double bound = sign * engine.objective();
      if (prunable(bound)) break;
      std::vector<double> x = engine.values();

      if (hints.heuristic && (out.nodes == 1 || out.nodes % std::max(1, hints.heuristic_period) == 0)) {
        bool cut = false;
        for (std::vector<double>& cand : hints.heuristic(x)) cut = offer(std::move(cand)) || cut;
        if (cut) continue;  // cuts changed this node's LP
        if (prunable(bound)) break;
      }

      int branch_var = -1;
      double best_frac = kIntTol;
      for (int j : binaries) {
        const double v = x[static_cast<std::size_t>(j)];
        const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
        if (frac > best_frac + 1e-12) {
          best_frac = frac;
          branch_var = j;
        }
      }
      if (branch_var >= 0) {
        auto basis = std::make_shared<const LpBasis>(engine.basis());
        for (char val : {char{1}, char{0}}) {
          detail::BbNode child{next_id++, node.depth + 1, bound, node.fixings, basis};
          child.fixings.emplace_back(branch_var, val);
          open.push(std::move(child));
        }
        break;
      }

      if (offer(std::move(x))) continue;  // re-solve this node under the new row
      break;
    }
  }

  if (hit_limit) {
    limit_bound = incumbent;
    while (!open.empty()) {
      limit_bound = std::max(limit_bound, open.top().bound);
      open.pop();
    }
  }
  out.lp_iterations = engine.iterations();
  if (out.has_incumbent) {
    out.objective = sign * incumbent;
    out.status = hit_limit ? MilpStatus::kBudgetLimit : MilpStatus::kOptimal;
    out.best_bound = sign * (hit_limit ? limit_bound : incumbent);
  } else {
    out.status = hit_limit ? MilpStatus::kBudgetLimit : MilpStatus::kInfeasible;
    out.best_bound = hit_limit ? sign * limit_bound : sign * -kInf;
  }
  return out;
}

}  // namespace wnjam
