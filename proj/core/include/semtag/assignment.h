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

#ifndef SEMTAG_ASSIGNMENT_H_
#define SEMTAG_ASSIGNMENT_H_

#include <vector>

#include "semtag/tensor.h"

namespace semtag {

struct AssignmentResult {
  std::vector<int> col_of_row;
  double weight = 0.0;
};

// Maximum-weight assignment of every row to a distinct column (rows <= cols)
// by shortest augmenting paths with dual potentials, the augmentation scheme
// of Jonker and Volgenant. O(rows^2 * cols). Entries must be finite.
AssignmentResult SolveMaxAssignment(const Matrix& weights);

}  // namespace semtag

#endif  // SEMTAG_ASSIGNMENT_H_
