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

#ifndef SEMTAG_ALIGNMENT_H_
#define SEMTAG_ALIGNMENT_H_

// MAP inference in the alignment factor graph used by the weakly supervised
// E step: one variable per concept instance ranging over word positions,
// unary factors from concept scores, binary factors from arc scores, and a
// global at-most-one constraint (injectivity).

#include <vector>

#include "semtag/corpus.h"
#include "semtag/tensor.h"
#include "semtag/vocabulary.h"

namespace semtag {

struct AlignmentFactorGraph {
  struct BinaryFactor {
    int head = 0;  // variable index
    int dep = 0;   // variable index
    int label = 0;
  };

  int num_words = 0;
  std::vector<int> concepts;  // concept id per variable
  std::vector<BinaryFactor> binaries;

  int num_variables() const { return static_cast<int>(concepts.size()); }

  // Variables follow graph.vertices() order.
  static AlignmentFactorGraph FromGraph(const SemanticGraph& graph, int num_words,
                                        const Vocabulary& concepts,
                                        const Vocabulary& labels);
};

struct Alignment {
  std::vector<int> position;  // word per variable
  double objective = 0.0;
};

struct AlignmentOptions {
  // Enumerate outright when the number of injective maps is at most this.
  long long exhaustive_limit = 200000;
  bool force_branch_and_bound = false;
};

// Sum of unary and binary factor values; -inf if not injective.
double AlignmentScore(const AlignmentFactorGraph& fg, const std::vector<int>& position,
                      const Matrix& lambda, const Tensor3& mu);

// Exact argmax. Throws Error(kTooManyInstances) when variables > words.
Alignment MapAlignment(const AlignmentFactorGraph& fg, const Matrix& lambda,
                       const Tensor3& mu, const AlignmentOptions& options = {});

}  // namespace semtag

#endif  // SEMTAG_ALIGNMENT_H_
