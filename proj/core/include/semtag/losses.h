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

#ifndef SEMTAG_LOSSES_H_
#define SEMTAG_LOSSES_H_

// Separable negative log-likelihood losses over the four score tables.
// Each returns the value and its exact gradient with respect to the scores.

#include <span>
#include <vector>

#include "semtag/argument_matcher.h"
#include "semtag/supertag_decoder.h"
#include "semtag/tensor.h"

namespace semtag {

struct MatrixLoss {
  double value = 0.0;
  Matrix grad;
};

struct SupertagLoss {
  double value = 0.0;
  Matrix grad_minus;
  Matrix grad_plus;
};

struct ArcLoss {
  double value = 0.0;
  Tensor3 grad;
};

// sum_i [ -lambda(i, gold_i) + log sum_t exp lambda(i, t) ] over all words.
MatrixLoss ConceptLoss(const Matrix& lambda, std::span<const int> gold_tags);

// Site and root NLL summed over the active positions of `gold` only.
SupertagLoss SupertagNll(const Matrix& phi_minus, const Matrix& phi_plus,
                         const SupertagAssignment& gold);

// Per ordered pair of distinct active positions, NLL over the labels plus a
// null label of score 0; the gold class is the arc's label or null.
ArcLoss ArcNll(const Tensor3& mu, const ArcSet& gold, const std::vector<bool>& active);

}  // namespace semtag

#endif  // SEMTAG_LOSSES_H_
