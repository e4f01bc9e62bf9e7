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

#ifndef SEMTAG_TESTS_ORACLES_ORACLES_H_
#define SEMTAG_TESTS_ORACLES_ORACLES_H_

// Reference implementations used only by tests. They share no code with the
// library beyond its plain data types.

#include <array>
#include <functional>
#include <random>
#include <vector>

#include "semtag/supertag.h"
#include "semtag/supertag_decoder.h"
#include "semtag/tensor.h"

namespace semtag::oracle {

// Label multiplicities of every site set and root set of an inventory.
struct CountTables {
  int num_labels = 0;
  std::vector<std::vector<int>> site;  // [site index][label]
  std::vector<std::vector<int>> root;  // [root index][label]
};

CountTables CountsOf(const SupertagInventory& inventory, int num_labels);

struct SupertaggingOptimum {
  bool feasible = false;
  double objective = 0.0;
};

// Exhaustive depth-first enumeration of every (site, root) choice at every
// active position, keeping the balanced, non-empty ones.
SupertaggingOptimum EnumerateSupertagging(const Matrix& phi_minus, const Matrix& phi_plus,
                                          const std::vector<bool>& active,
                                          const CountTables& counts);

// Constraints checked directly from the counts: one choice per active
// position, none elsewhere, no empty pair, per-label balance.
bool AssignmentIsValid(const SupertagAssignment& a, const std::vector<bool>& active,
                       const CountTables& counts);

double AssignmentObjective(const SupertagAssignment& a, const Matrix& phi_minus,
                           const Matrix& phi_plus);

// Whether `triples` (0-based, over [m]^3) contain m pairwise disjoint ones.
bool HasPerfect3dm(int m, const std::vector<std::array<int, 3>>& triples);

// Best sum over injective row -> column maps (rows <= cols).
double EnumerateAssignment(const std::vector<std::vector<double>>& weights);

struct FactorBinary {
  int head = 0;
  int dep = 0;
  int label = 0;
};

// Best total over injective variable -> word maps.
double EnumerateAlignment(int num_words, const std::vector<int>& concepts,
                          const std::vector<FactorBinary>& binaries, const Matrix& lambda,
                          const Tensor3& mu);

// Fourth-order central difference of f at x.
double CentralDifference(const std::function<double(double)>& f, double x, double h);

// |a - b| / max(|a|, |b|, floor).
double RelativeError(double a, double b, double floor = 1e-3);

// Random inventory over `num_labels` labels with at most `max_sets` entries
// per side (the empty set included).
SupertagInventory RandomInventory(std::mt19937_64& rng, int num_labels, int max_sets);

Matrix RandomMatrix(std::mt19937_64& rng, int rows, int cols, double lo, double hi);

}  // namespace semtag::oracle

#endif  // SEMTAG_TESTS_ORACLES_ORACLES_H_
