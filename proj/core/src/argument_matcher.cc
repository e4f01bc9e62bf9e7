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

#include "semtag/argument_matcher.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "semtag/assignment.h"
#include "semtag/error.h"

namespace semtag {
namespace {

double PairWeight(const Tensor3& mu, int site, int root, int label) {
  return site == root ? kSelfPairPenalty : mu(site, root, label);
}

double BestCompletion(const Matrix& w, const std::vector<int>& rows,
                      const std::vector<int>& cols) {
  if (rows.empty()) return 0.0;
  Matrix sub(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) sub(r, c) = w(rows[r], cols[c]);
  }
  return SolveMaxAssignment(sub).weight;
}

}  // namespace

std::vector<std::pair<int, int>> MatchLabel(const LabelSlotGroup& group,
                                            const Tensor3& mu) {
  const int k = static_cast<int>(group.site_positions.size());
  if (k != static_cast<int>(group.root_positions.size())) {
    throw Error(ErrorCode::kSizeMismatch,
                "label " + std::to_string(group.label) + ": " + std::to_string(k) +
                    " sites vs " + std::to_string(group.root_positions.size()) + " roots");
  }
  std::vector<int> sites = group.site_positions;
  std::vector<int> roots = group.root_positions;
  std::sort(sites.begin(), sites.end());
  std::sort(roots.begin(), roots.end());
  if (k == 0) return {};
  if (k == 1) return {{sites[0], roots[0]}};

  Matrix w(k, k);
  double scale = 1.0;
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) {
      w(r, c) = PairWeight(mu, sites[r], roots[c], group.label);
      if (sites[r] != roots[c]) scale = std::max(scale, std::abs(w(r, c)));
    }
  }
  const double tol = 1e-9 * scale * k;

  // Fix pairs greedily in lexicographic order, keeping each choice only if
  // the remaining rows can still complete an optimal matching.
  std::vector<std::pair<int, int>> out;
  std::vector<int> free_rows(k), free_cols(k);
  for (int i = 0; i < k; ++i) free_rows[i] = free_cols[i] = i;
  while (!free_rows.empty()) {
    const int r = free_rows.front();
    std::vector<int> rest_rows(free_rows.begin() + 1, free_rows.end());
    std::vector<double> value(free_cols.size());
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t ci = 0; ci < free_cols.size(); ++ci) {
      std::vector<int> rest_cols = free_cols;
      rest_cols.erase(rest_cols.begin() + ci);
      value[ci] = w(r, free_cols[ci]) + BestCompletion(w, rest_rows, rest_cols);
      best = std::max(best, value[ci]);
    }
    std::size_t pick = 0;
    while (value[pick] < best - tol) ++pick;
    out.emplace_back(sites[r], roots[free_cols[pick]]);
    free_rows.erase(free_rows.begin());
    free_cols.erase(free_cols.begin() + pick);
  }
  return out;
}

ArcSet IdentifyArguments(const SupertagAssignment& assignment,
                         const SupertagInventory& inventory, const Tensor3& mu) {
  std::map<int, LabelSlotGroup> groups;
  for (int i = 0; i < assignment.size(); ++i) {
    if (!assignment.active(i)) continue;
    for (int l : inventory.sites()[assignment.sites[i]].labels()) {
      groups[l].label = l;
      groups[l].site_positions.push_back(i);
    }
    for (int l : inventory.roots()[assignment.roots[i]].labels()) {
      groups[l].label = l;
      groups[l].root_positions.push_back(i);
    }
  }
  ArcSet arcs;
  for (const auto& [label, group] : groups) {
    for (const auto& [site, root] : MatchLabel(group, mu)) {
      arcs.push_back({site, root, label});
    }
  }
  std::sort(arcs.begin(), arcs.end());
  return arcs;
}

ArcSet DecodeArcsBaseline(const Tensor3& mu, const std::vector<bool>& active) {
  const int n = static_cast<int>(active.size());
  if (mu.dim0() != n || mu.dim1() != n) {
    throw Error(ErrorCode::kShapeMismatch, "arc weights do not match sentence length");
  }
  ArcSet arcs;
  for (int i = 0; i < n; ++i) {
    if (!active[i]) continue;
    for (int j = 0; j < n; ++j) {
      if (j == i || !active[j]) continue;
      int best = -1;
      double best_score = 0.0;  // the null label
      for (int l = 0; l < mu.dim2(); ++l) {
        if (mu(i, j, l) > best_score) {
          best_score = mu(i, j, l);
          best = l;
        }
      }
      if (best >= 0) arcs.push_back({i, j, best});
    }
  }
  return arcs;
}

}  // namespace semtag
