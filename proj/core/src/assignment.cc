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

#include "semtag/assignment.h"

#include <limits>

#include "semtag/error.h"

namespace semtag {

AssignmentResult SolveMaxAssignment(const Matrix& weights) {
  const int rows = weights.rows();
  const int cols = weights.cols();
  if (rows > cols) {
    throw Error(ErrorCode::kSizeMismatch, "more rows than columns in assignment");
  }
  AssignmentResult result;
  result.col_of_row.assign(rows, -1);
  if (rows == 0) return result;

  // Minimize cost = -weight. Arrays are 1-based with a virtual column 0.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(rows + 1, 0.0), v(cols + 1, 0.0);
  std::vector<int> row_of_col(cols + 1, 0), way(cols + 1, 0);
  std::vector<double> min_to(cols + 1);
  std::vector<char> used(cols + 1);

  for (int i = 1; i <= rows; ++i) {
    row_of_col[0] = i;
    int j0 = 0;
    std::fill(min_to.begin(), min_to.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = row_of_col[j0];
      double delta = inf;
      int j1 = -1;
      for (int j = 1; j <= cols; ++j) {
        if (used[j]) continue;
        const double cur = -weights(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < min_to[j]) {
          min_to[j] = cur;
          way[j] = j0;
        }
        if (min_to[j] < delta) {
          delta = min_to[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= cols; ++j) {
        if (used[j]) {
          u[row_of_col[j]] += delta;
          v[j] -= delta;
        } else {
          min_to[j] -= delta;
        }
      }
      j0 = j1;
    } while (row_of_col[j0] != 0);
    do {
      const int j1 = way[j0];
      row_of_col[j0] = row_of_col[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  for (int j = 1; j <= cols; ++j) {
    if (row_of_col[j] != 0) result.col_of_row[row_of_col[j] - 1] = j - 1;
  }
  for (int i = 0; i < rows; ++i) result.weight += weights(i, result.col_of_row[i]);
  return result;
}

}  // namespace semtag
