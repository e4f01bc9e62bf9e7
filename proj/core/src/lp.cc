// Copyright 2026 The semtag Authors.
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

#include "semtag/lp.h"

#include <cmath>
#include <limits>
#include <sstream>

namespace semtag {
namespace {

constexpr double kPivotEps = 1e-9;
constexpr double kCostEps = 1e-9;
constexpr int kDegenerateBeforeBland = 50;

class Tableau {
 public:
  Tableau(int rows, int cols)
      : rows_(rows), cols_(cols),
        a_(static_cast<std::size_t>(rows) * (cols + 1), 0.0),
        obj_(cols + 1, 0.0), basis_(rows, -1) {}

  double& at(int r, int c) { return a_[static_cast<std::size_t>(r) * (cols_ + 1) + c]; }
  double& rhs(int r) { return at(r, cols_); }
  std::vector<int>& basis() { return basis_; }

  // Recomputes the reduced-cost row for maximizing cost . x.
  void Price(const std::vector<double>& cost) {
    for (int c = 0; c <= cols_; ++c) obj_[c] = c < cols_ ? -cost[c] : 0.0;
    for (int r = 0; r < rows_; ++r) {
      const double cb = cost[basis_[r]];
      if (cb == 0.0) continue;
      for (int c = 0; c <= cols_; ++c) obj_[c] += cb * at(r, c);
    }
  }

  double Value() const { return obj_[cols_]; }

  void Pivot(int pr, int pc) {
    const double inv = 1.0 / at(pr, pc);
    for (int c = 0; c <= cols_; ++c) at(pr, c) *= inv;
    at(pr, pc) = 1.0;
    for (int r = 0; r < rows_; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (int c = 0; c <= cols_; ++c) at(r, c) -= f * at(pr, c);
      at(r, pc) = 0.0;
    }
    const double f = obj_[pc];
    if (f != 0.0) {
      for (int c = 0; c <= cols_; ++c) obj_[c] -= f * at(pr, c);
      obj_[pc] = 0.0;
    }
    basis_[pr] = pc;
  }

  // Returns false when unbounded.
  bool Optimize(const std::vector<bool>& allowed, int& pivots) {
    int degenerate = 0;
    while (true) {
      int enter = -1;
      double best = -kCostEps;
      const bool bland = degenerate >= kDegenerateBeforeBland;
      for (int c = 0; c < cols_; ++c) {
        if (!allowed[c]) continue;
        if (obj_[c] < best) {
          enter = c;
          if (bland) break;
          best = obj_[c];
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      double ratio = std::numeric_limits<double>::infinity();
      for (int r = 0; r < rows_; ++r) {
        const double v = at(r, enter);
        if (v <= kPivotEps) continue;
        const double q = rhs(r) / v;
        if (q < ratio - 1e-12 ||
            (q <= ratio + 1e-12 && leave >= 0 && basis_[r] < basis_[leave])) {
          ratio = q;
          leave = r;
        }
      }
      if (leave < 0) return false;
      degenerate = ratio <= 1e-12 ? degenerate + 1 : 0;
      Pivot(leave, enter);
      ++pivots;
    }
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

 private:
  int rows_;
  int cols_;
  std::vector<double> a_;
  std::vector<double> obj_;
  std::vector<int> basis_;
};

}  // namespace

LpSolution SolveLp(const LinearProgram& lp) {
  const int m = static_cast<int>(lp.constraints.size());
  const int n = lp.num_vars;

  // Column layout: [structural | slack/surplus | artificial].
  int num_slack = 0;
  int num_art = 0;
  for (const LinearConstraint& c : lp.constraints) {
    const bool flip = c.rhs < 0;
    ConstraintSense s = c.sense;
    if (flip && s != ConstraintSense::kEqual) {
      s = s == ConstraintSense::kLessEqual ? ConstraintSense::kGreaterEqual
                                           : ConstraintSense::kLessEqual;
    }
    if (s != ConstraintSense::kEqual) ++num_slack;
    if (s != ConstraintSense::kLessEqual) ++num_art;
  }
  const int cols = n + num_slack + num_art;
  const int art_begin = n + num_slack;
  Tableau t(m, cols);

  int next_slack = n;
  int next_art = art_begin;
  for (int r = 0; r < m; ++r) {
    const LinearConstraint& c = lp.constraints[r];
    const double sign = c.rhs < 0 ? -1.0 : 1.0;
    ConstraintSense s = c.sense;
    if (sign < 0 && s != ConstraintSense::kEqual) {
      s = s == ConstraintSense::kLessEqual ? ConstraintSense::kGreaterEqual
                                           : ConstraintSense::kLessEqual;
    }
    for (const auto& [var, coef] : c.terms) t.at(r, var) += sign * coef;
    t.rhs(r) = sign * c.rhs;
    if (s == ConstraintSense::kLessEqual) {
      t.at(r, next_slack) = 1.0;
      t.basis()[r] = next_slack++;
    } else {
      if (s == ConstraintSense::kGreaterEqual) t.at(r, next_slack++) = -1.0;
      t.at(r, next_art) = 1.0;
      t.basis()[r] = next_art++;
    }
  }

  LpSolution sol;
  std::vector<bool> allowed(cols, true);

  // Phase 1: maximize -sum(artificials).
  if (num_art > 0) {
    std::vector<double> cost(cols, 0.0);
    for (int c = art_begin; c < cols; ++c) cost[c] = -1.0;
    t.Price(cost);
    t.Optimize(allowed, sol.pivots);
    if (t.Value() < -1e-7) {
      sol.status = LpStatus::kInfeasible;
      return sol;
    }
    // Drive zero-valued artificials out of the basis where possible; rows
    // where that fails are redundant and keep a pinned artificial.
    for (int r = 0; r < m; ++r) {
      if (t.basis()[r] < art_begin) continue;
      for (int c = 0; c < art_begin; ++c) {
        if (std::abs(t.at(r, c)) > kPivotEps) {
          t.Pivot(r, c);
          ++sol.pivots;
          break;
        }
      }
    }
    for (int c = art_begin; c < cols; ++c) allowed[c] = false;
  }

  // Phase 2.
  std::vector<double> cost(cols, 0.0);
  for (int j = 0; j < n; ++j) cost[j] = lp.objective[j];
  t.Price(cost);
  if (!t.Optimize(allowed, sol.pivots)) {
    sol.status = LpStatus::kUnbounded;
    return sol;
  }
  sol.status = LpStatus::kOptimal;
  sol.x.assign(n, 0.0);
  for (int r = 0; r < m; ++r) {
    const int b = t.basis()[r];
    if (b < n) sol.x[b] = t.rhs(r);
  }
  double value = 0.0;
  for (int j = 0; j < n; ++j) value += lp.objective[j] * sol.x[j];
  sol.objective = value;
  return sol;
}

std::string WriteCplexLp(const LinearProgram& lp, bool binary) {
  auto name = [&](int j) {
    return j < static_cast<int>(lp.var_names.size()) && !lp.var_names[j].empty()
               ? lp.var_names[j]
               : "x" + std::to_string(j);
  };
  auto term = [&](std::ostringstream& os, double coef, int j, bool first) {
    if (coef < 0) {
      os << " - ";
      coef = -coef;
    } else if (!first) {
      os << " + ";
    } else {
      os << " ";
    }
    os << coef << " " << name(j);
  };
  std::ostringstream os;
  os.precision(17);
  os << "\\ generated by semtag\nMaximize\n obj:";
  bool first = true;
  for (int j = 0; j < lp.num_vars; ++j) {
    if (lp.objective[j] == 0.0) continue;
    term(os, lp.objective[j], j, first);
    first = false;
  }
  if (first) os << " 0 " << name(0);
  os << "\nSubject To\n";
  for (std::size_t r = 0; r < lp.constraints.size(); ++r) {
    const LinearConstraint& c = lp.constraints[r];
    os << " " << (c.name.empty() ? "c" + std::to_string(r) : c.name) << ":";
    first = true;
    for (const auto& [j, coef] : c.terms) {
      term(os, coef, j, first);
      first = false;
    }
    if (first) os << " 0 " << name(0);
    switch (c.sense) {
      case ConstraintSense::kLessEqual: os << " <= "; break;
      case ConstraintSense::kEqual: os << " = "; break;
      case ConstraintSense::kGreaterEqual: os << " >= "; break;
    }
    os << c.rhs << "\n";
  }
  os << "Bounds\n";
  for (int j = 0; j < lp.num_vars; ++j) os << " 0 <= " << name(j) << " <= 1\n";
  if (binary && lp.num_vars > 0) {
    os << "Binary\n";
    for (int j = 0; j < lp.num_vars; ++j) os << " " << name(j) << "\n";
  }
  os << "End\n";
  return os.str();
}

}  // namespace semtag
