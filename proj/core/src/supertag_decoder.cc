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

#include "semtag/supertag_decoder.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "semtag/error.h"

namespace semtag {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double Tolerance(double value) { return 1e-9 * std::max(1.0, std::abs(value)); }

void CheckShapes(const Matrix& phi_minus, const Matrix& phi_plus,
                 const std::vector<bool>& active) {
  if (phi_minus.rows() != static_cast<int>(active.size()) ||
      phi_plus.rows() != static_cast<int>(active.size())) {
    throw Error(ErrorCode::kShapeMismatch, "score rows do not match sentence length");
  }
}

std::vector<int> InventoryLabels(const SupertagInventory& inv) {
  std::set<int> labels;
  for (const SiteSet& s : inv.sites()) labels.insert(s.labels().begin(), s.labels().end());
  for (const RootSet& r : inv.roots()) labels.insert(r.labels().begin(), r.labels().end());
  return {labels.begin(), labels.end()};
}

// Allowed inventory indices per active position, for sites and for roots.
struct Node {
  std::vector<std::vector<int>> sites;
  std::vector<std::vector<int>> roots;
  double parent_bound = kInf;
};

struct VarRef {
  int slot;  // index among active positions
  bool is_site;
  int index;  // inventory index
};

class IlpSolver {
 public:
  IlpSolver(const Matrix& phi_minus, const Matrix& phi_plus,
            const std::vector<bool>& active, const SupertagInventory& inv,
            const IlpOptions& options)
      : phi_minus_(phi_minus), phi_plus_(phi_plus), inv_(inv), options_(options),
        labels_(InventoryLabels(inv)) {
    for (int i = 0; i < static_cast<int>(active.size()); ++i) {
      if (active[i]) positions_.push_back(i);
    }
    n_ = static_cast<int>(active.size());
  }

  Node RootNode() const {
    Node node;
    std::vector<int> all_sites(inv_.num_sites());
    std::vector<int> all_roots(inv_.num_roots());
    for (int s = 0; s < inv_.num_sites(); ++s) all_sites[s] = s;
    for (int r = 0; r < inv_.num_roots(); ++r) all_roots[r] = r;
    node.sites.assign(positions_.size(), all_sites);
    node.roots.assign(positions_.size(), all_roots);
    return node;
  }

  // Builds the node LP; `vars` receives the column -> variable mapping.
  LinearProgram BuildLp(const Node& node, std::vector<VarRef>* vars) const {
    LinearProgram lp;
    vars->clear();
    const int slots = static_cast<int>(positions_.size());
    std::vector<std::pair<int, int>> empty_cols(slots, {-1, -1});
    for (int k = 0; k < slots; ++k) {
      const int pos = positions_[k];
      LinearConstraint one_site{{}, ConstraintSense::kEqual, 1.0,
                                "sites_" + std::to_string(pos)};
      for (int s : node.sites[k]) {
        const int col = static_cast<int>(vars->size());
        vars->push_back({k, true, s});
        lp.objective.push_back(phi_minus_(pos, s));
        lp.var_names.push_back("ym_" + std::to_string(pos) + "_" + std::to_string(s));
        one_site.terms.emplace_back(col, 1.0);
        if (s == 0) empty_cols[k].first = col;
      }
      LinearConstraint one_root{{}, ConstraintSense::kEqual, 1.0,
                                "roots_" + std::to_string(pos)};
      for (int r : node.roots[k]) {
        const int col = static_cast<int>(vars->size());
        vars->push_back({k, false, r});
        lp.objective.push_back(phi_plus_(pos, r));
        lp.var_names.push_back("yp_" + std::to_string(pos) + "_" + std::to_string(r));
        one_root.terms.emplace_back(col, 1.0);
        if (r == 0) empty_cols[k].second = col;
      }
      lp.constraints.push_back(std::move(one_site));
      lp.constraints.push_back(std::move(one_root));
      if (empty_cols[k].first >= 0 && empty_cols[k].second >= 0) {
        lp.constraints.push_back({{{empty_cols[k].first, 1.0}, {empty_cols[k].second, 1.0}},
                                  ConstraintSense::kLessEqual, 1.0,
                                  "nonempty_" + std::to_string(pos)});
      }
    }
    for (int l : labels_) {
      LinearConstraint balance{{}, ConstraintSense::kEqual, 0.0,
                               "balance_" + std::to_string(l)};
      for (int col = 0; col < static_cast<int>(vars->size()); ++col) {
        const VarRef& v = (*vars)[col];
        const int count = v.is_site ? inv_.SiteCount(v.index, l) : inv_.RootCount(v.index, l);
        if (count != 0) balance.terms.emplace_back(col, v.is_site ? count : -count);
      }
      if (!balance.terms.empty()) lp.constraints.push_back(std::move(balance));
    }
    lp.num_vars = static_cast<int>(vars->size());
    return lp;
  }

  // Necessary condition: per label, the fewest sites any choice can produce
  // must not exceed the most roots, and vice versa.
  bool PassesReachability(const Node& node) const {
    for (int l : labels_) {
      long long min_sites = 0, max_sites = 0, min_roots = 0, max_roots = 0;
      for (std::size_t k = 0; k < positions_.size(); ++k) {
        int lo = std::numeric_limits<int>::max(), hi = 0;
        for (int s : node.sites[k]) {
          lo = std::min(lo, inv_.SiteCount(s, l));
          hi = std::max(hi, inv_.SiteCount(s, l));
        }
        if (node.sites[k].empty()) return false;
        min_sites += lo;
        max_sites += hi;
        lo = std::numeric_limits<int>::max();
        hi = 0;
        for (int r : node.roots[k]) {
          lo = std::min(lo, inv_.RootCount(r, l));
          hi = std::max(hi, inv_.RootCount(r, l));
        }
        if (node.roots[k].empty()) return false;
        min_roots += lo;
        max_roots += hi;
      }
      if (min_sites > max_roots || min_roots > max_sites) return false;
    }
    return true;
  }

  IlpResult Solve() {
    const auto start = std::chrono::steady_clock::now();
    IlpResult result;
    result.assignment = SupertagAssignment::Inactive(n_);
    std::vector<bool> active(n_, false);
    for (int p : positions_) active[p] = true;

    if (positions_.empty()) {
      result.stats.optimality_proved = true;
      result.stats.wall_time = std::chrono::steady_clock::now() - start;
      return result;
    }

    if (options_.unconstrained_shortcut) {
      SupertagAssignment greedy = DecodeUnconstrained(phi_minus_, phi_plus_, active);
      if (SatisfiesSupertagConstraints(greedy, active, inv_)) {
        result.assignment = std::move(greedy);
        result.objective = AssignmentWeight(result.assignment, phi_minus_, phi_plus_);
        result.stats.root_bound = result.objective;
        result.stats.optimality_proved = true;
        result.stats.wall_time = std::chrono::steady_clock::now() - start;
        return result;
      }
    }

    Node root = RootNode();
    if (!PassesReachability(root)) {
      throw Error(ErrorCode::kInfeasible, "some label can never be balanced");
    }

    bool have_incumbent = false;
    double incumbent = -kInf;
    std::vector<Node> stack;
    stack.push_back(std::move(root));
    bool root_done = false;
    std::vector<VarRef> vars;

    while (!stack.empty()) {
      Node node = std::move(stack.back());
      stack.pop_back();
      if (have_incumbent && node.parent_bound <= incumbent + Tolerance(incumbent)) continue;
      if (result.stats.nodes_explored >= options_.node_budget) {
        throw Error(ErrorCode::kTimeout,
                    "node budget of " + std::to_string(options_.node_budget) + " exhausted");
      }
      ++result.stats.nodes_explored;
      if (root_done && !PassesReachability(node)) continue;

      const LinearProgram lp = BuildLp(node, &vars);
      const LpSolution sol = SolveLp(lp);
      ++result.stats.lp_solves;
      if (sol.status != LpStatus::kOptimal) {
        if (!root_done) throw Error(ErrorCode::kInfeasible, "LP relaxation infeasible");
        continue;
      }
      if (!root_done) {
        result.stats.root_bound = sol.objective;
        root_done = true;
      }
      if (options_.node_observer) options_.node_observer(node.parent_bound, sol.objective);
      if (have_incumbent && sol.objective <= incumbent + Tolerance(incumbent)) continue;

      // Most fractional variable; ties go to the smallest (slot, kind, index).
      int branch = -1;
      double best_frac = options_.integrality_tolerance;
      for (int col = 0; col < lp.num_vars; ++col) {
        const double x = sol.x[col];
        const double frac = std::min(x, 1.0 - x);
        if (frac > best_frac + 1e-12) {
          best_frac = frac;
          branch = col;
        }
      }

      if (branch < 0) {
        SupertagAssignment cand = SupertagAssignment::Inactive(n_);
        for (int col = 0; col < lp.num_vars; ++col) {
          if (sol.x[col] < 0.5) continue;
          const VarRef& v = vars[col];
          (v.is_site ? cand.sites : cand.roots)[positions_[v.slot]] = v.index;
        }
        if (!SatisfiesSupertagConstraints(cand, active, inv_)) {
          throw Error(ErrorCode::kInfeasible, "internal: rounded LP vertex violates constraints");
        }
        const double weight = AssignmentWeight(cand, phi_minus_, phi_plus_);
        if (!have_incumbent || weight > incumbent + Tolerance(incumbent)) {
          have_incumbent = true;
          incumbent = weight;
          result.assignment = std::move(cand);
          result.objective = weight;
        }
        continue;
      }

      const VarRef& v = vars[branch];
      Node fix_one = node;
      Node fix_zero = std::move(node);
      fix_one.parent_bound = fix_zero.parent_bound = sol.objective;
      auto& one_list = v.is_site ? fix_one.sites[v.slot] : fix_one.roots[v.slot];
      one_list.assign(1, v.index);
      auto& zero_list = v.is_site ? fix_zero.sites[v.slot] : fix_zero.roots[v.slot];
      zero_list.erase(std::find(zero_list.begin(), zero_list.end(), v.index));
      // Depth-first, rounding toward 1 first.
      stack.push_back(std::move(fix_zero));
      stack.push_back(std::move(fix_one));
    }

    if (!have_incumbent) throw Error(ErrorCode::kInfeasible, "no integral solution");
    result.stats.optimality_proved = true;
    result.stats.wall_time = std::chrono::steady_clock::now() - start;
    return result;
  }

 private:
  const Matrix& phi_minus_;
  const Matrix& phi_plus_;
  const SupertagInventory& inv_;
  const IlpOptions& options_;
  std::vector<int> labels_;
  std::vector<int> positions_;
  int n_ = 0;
};

}  // namespace

std::vector<bool> ActiveFromTags(std::span<const int> tags) {
  std::vector<bool> active(tags.size());
  for (std::size_t i = 0; i < tags.size(); ++i) active[i] = tags[i] != kEmptyConceptId;
  return active;
}

double AssignmentWeight(const SupertagAssignment& a, const Matrix& phi_minus,
                        const Matrix& phi_plus) {
  double w = 0.0;
  for (int i = 0; i < a.size(); ++i) {
    if (!a.active(i)) continue;
    w += phi_minus(i, a.sites[i]) + phi_plus(i, a.roots[i]);
  }
  return w;
}

std::vector<Supertag> MaterializeSupertags(const SupertagAssignment& a,
                                           const SupertagInventory& inventory) {
  std::vector<Supertag> out;
  for (int i = 0; i < a.size(); ++i) {
    if (!a.active(i)) continue;
    out.push_back({inventory.sites()[a.sites[i]], inventory.roots()[a.roots[i]]});
  }
  return out;
}

bool SatisfiesSupertagConstraints(const SupertagAssignment& a,
                                  const std::vector<bool>& active,
                                  const SupertagInventory& inventory) {
  if (a.size() != static_cast<int>(active.size()) ||
      a.roots.size() != a.sites.size()) {
    return false;
  }
  for (int i = 0; i < a.size(); ++i) {
    const bool has_site = a.sites[i] >= 0;
    const bool has_root = a.roots[i] >= 0;
    if (has_site != active[i] || has_root != active[i]) return false;  // (1), (2)
    if (!active[i]) continue;
    if (a.sites[i] >= inventory.num_sites() || a.roots[i] >= inventory.num_roots()) {
      return false;
    }
    if (a.sites[i] == 0 && a.roots[i] == 0) return false;  // (3)
  }
  return VerifyCompanionship(MaterializeSupertags(a, inventory)).satisfied;  // (4)
}

SupertagAssignment DecodeUnconstrained(const Matrix& phi_minus,
                                       const Matrix& phi_plus,
                                       const std::vector<bool>& active) {
  CheckShapes(phi_minus, phi_plus, active);
  const int n = static_cast<int>(active.size());
  SupertagAssignment out = SupertagAssignment::Inactive(n);
  auto argmax_from = [](std::span<const double> row, int from) {
    int best = -1;
    for (int j = from; j < static_cast<int>(row.size()); ++j) {
      if (best < 0 || row[j] > row[best]) best = j;
    }
    return best;
  };
  for (int i = 0; i < n; ++i) {
    if (!active[i]) continue;
    int s = argmax_from(phi_minus.row(i), 0);
    int r = argmax_from(phi_plus.row(i), 0);
    if (s == 0 && r == 0) {
      // Best pair with a nonempty union; ties prefer the smaller
      // (site index, root index).
      const int s1 = argmax_from(phi_minus.row(i), 1);
      const int r1 = argmax_from(phi_plus.row(i), 1);
      const double keep_site =
          r1 >= 0 ? phi_minus(i, 0) + phi_plus(i, r1) : -kInf;
      const double keep_root =
          s1 >= 0 ? phi_minus(i, s1) + phi_plus(i, 0) : -kInf;
      if (r1 >= 0 && keep_site >= keep_root) {
        r = r1;
      } else if (s1 >= 0) {
        s = s1;
      }
    }
    out.sites[i] = s;
    out.roots[i] = r;
  }
  return out;
}

IlpResult DecodeIlp(const Matrix& phi_minus, const Matrix& phi_plus,
                    const std::vector<bool>& active,
                    const SupertagInventory& inventory, const IlpOptions& options) {
  CheckShapes(phi_minus, phi_plus, active);
  if (phi_minus.cols() != inventory.num_sites() ||
      phi_plus.cols() != inventory.num_roots()) {
    throw Error(ErrorCode::kShapeMismatch, "score columns do not match inventory");
  }
  return IlpSolver(phi_minus, phi_plus, active, inventory, options).Solve();
}

LinearProgram BuildSupertagLp(const Matrix& phi_minus, const Matrix& phi_plus,
                              const std::vector<bool>& active,
                              const SupertagInventory& inventory) {
  CheckShapes(phi_minus, phi_plus, active);
  IlpOptions options;
  IlpSolver solver(phi_minus, phi_plus, active, inventory, options);
  std::vector<VarRef> vars;
  return solver.BuildLp(solver.RootNode(), &vars);
}

SupertaggingInstance Reduce3dm(const ThreeDimMatchingInstance& instance) {
  const int m = instance.m;
  SupertaggingInstance out;
  for (char kind : {'a', 'b', 'c'}) {
    for (int i = 1; i <= m; ++i) out.concepts.push_back(std::string(1, kind) + std::to_string(i));
  }
  for (int i = 1; i <= m; ++i) out.labels.Intern("b" + std::to_string(i));
  for (int i = 1; i <= m; ++i) out.labels.Intern("c" + std::to_string(i));
  const auto b_label = [&](int b) { return b; };
  const auto c_label = [&](int c) { return m + c; };

  std::vector<SiteSet> sites{SiteSet()};
  std::map<std::pair<int, int>, int> pair_index;
  for (const auto& t : instance.triples) {
    if (t[0] < 0 || t[0] >= m || t[1] < 0 || t[1] >= m || t[2] < 0 || t[2] >= m) {
      throw Error(ErrorCode::kInvalidConfig, "3DM triple out of range");
    }
    if (pair_index.emplace(std::make_pair(t[1], t[2]), static_cast<int>(sites.size())).second) {
      sites.push_back(SiteSet({b_label(t[1]), c_label(t[2])}));
    }
  }
  std::vector<RootSet> roots{RootSet()};
  for (int b = 0; b < m; ++b) roots.push_back(RootSet({b_label(b)}));
  for (int c = 0; c < m; ++c) roots.push_back(RootSet({c_label(c)}));
  out.inventory = SupertagInventory(std::move(sites), std::move(roots));

  const int n = 3 * m;
  out.phi_minus = Matrix(n, out.inventory.num_sites(), 0.0);
  out.phi_plus = Matrix(n, out.inventory.num_roots(), 0.0);
  // a(i): designated supertags are the triples' site pairs with no roots.
  for (const auto& t : instance.triples) {
    out.phi_minus(t[0], pair_index.at({t[1], t[2]})) = 0.5;
    out.phi_plus(t[0], 0) = 0.5;
  }
  // b(i), c(i): designated supertag is their own single root.
  for (int b = 0; b < m; ++b) {
    out.phi_minus(m + b, 0) = 0.5;
    out.phi_plus(m + b, 1 + b) = 0.5;
  }
  for (int c = 0; c < m; ++c) {
    out.phi_minus(2 * m + c, 0) = 0.5;
    out.phi_plus(2 * m + c, 1 + m + c) = 0.5;
  }
  return out;
}

}  // namespace semtag
