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

#ifndef SEMTAG_SUPERTAG_DECODER_H_
#define SEMTAG_SUPERTAG_DECODER_H_

// Supertag decoding: independent per-position argmax and the exact
// branch-and-bound ILP that enforces the companionship principle.

#include <array>
#include <chrono>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "semtag/lp.h"
#include "semtag/supertag.h"
#include "semtag/tensor.h"
#include "semtag/vocabulary.h"

namespace semtag {

// Per-position choice of a site-set index and a root-set index into the
// inventory; -1 at inactive (empty-concept) positions. This is the one-hot
// y- / y+ matrices stored by their nonzero column.
struct SupertagAssignment {
  std::vector<int> sites;
  std::vector<int> roots;

  static SupertagAssignment Inactive(int n) {
    return {std::vector<int>(n, -1), std::vector<int>(n, -1)};
  }
  int size() const { return static_cast<int>(sites.size()); }
  bool active(int i) const { return sites[i] >= 0; }

  bool operator==(const SupertagAssignment&) const = default;
};

// Active positions are those whose concept tag is not the empty concept.
std::vector<bool> ActiveFromTags(std::span<const int> tags);

double AssignmentWeight(const SupertagAssignment& a, const Matrix& phi_minus,
                        const Matrix& phi_plus);

// Supertags (as label multisets) at the active positions, in position order.
std::vector<Supertag> MaterializeSupertags(const SupertagAssignment& a,
                                           const SupertagInventory& inventory);

// Constraints (1)-(4) with respect to the given active mask: exactly one site
// set and one root set per active position, none elsewhere, no empty
// supertag, and balanced labels.
bool SatisfiesSupertagConstraints(const SupertagAssignment& a,
                                  const std::vector<bool>& active,
                                  const SupertagInventory& inventory);

SupertagAssignment DecodeUnconstrained(const Matrix& phi_minus,
                                       const Matrix& phi_plus,
                                       const std::vector<bool>& active);

struct IlpOptions {
  long long node_budget = 100000;
  double integrality_tolerance = 1e-6;
  // Skip the B&B when the unconstrained optimum already satisfies the
  // companionship principle (it is then provably optimal).
  bool unconstrained_shortcut = true;
  // Called once per solved node with the parent's LP bound (+inf at the root)
  // and the node's own LP bound.
  std::function<void(double parent_bound, double node_bound)> node_observer;
};

struct IlpStats {
  long long nodes_explored = 0;
  long long lp_solves = 0;
  std::chrono::duration<double> wall_time{0.0};
  bool optimality_proved = false;
  // Largest LP relaxation value seen at the root node.
  double root_bound = 0.0;
};

struct IlpResult {
  SupertagAssignment assignment;
  double objective = 0.0;
  IlpStats stats;
};

// Throws Error(kInfeasible) when constraints (1)-(4) admit no solution and
// Error(kTimeout) when the node budget is exhausted.
IlpResult DecodeIlp(const Matrix& phi_minus, const Matrix& phi_plus,
                    const std::vector<bool>& active,
                    const SupertagInventory& inventory,
                    const IlpOptions& options = {});

// The continuous relaxation of the supertagging ILP at the root node.
LinearProgram BuildSupertagLp(const Matrix& phi_minus, const Matrix& phi_plus,
                              const std::vector<bool>& active,
                              const SupertagInventory& inventory);

// ---------------------------------------------------------------------------
// 3-dimensional matching reduction.

struct ThreeDimMatchingInstance {
  int m = 0;
  std::vector<std::array<int, 3>> triples;  // 0-based (a, b, c)
};

struct SupertaggingInstance {
  std::vector<std::string> concepts;  // a1..am, b1..bm, c1..cm
  Vocabulary labels;                  // b1..bm, c1..cm
  SupertagInventory inventory;
  Matrix phi_minus;
  Matrix phi_plus;

  std::vector<bool> active() const {
    return std::vector<bool>(concepts.size(), true);
  }
};

// Builds the supertagging instance whose CP-constrained optimum reaches 3m
// exactly when a perfect 3-dimensional matching exists. Each designated
// supertag carries total weight 1, split evenly between its site part and its
// root part; every other combination scores at most 1/2.
SupertaggingInstance Reduce3dm(const ThreeDimMatchingInstance& instance);

}  // namespace semtag

#endif  // SEMTAG_SUPERTAG_DECODER_H_
