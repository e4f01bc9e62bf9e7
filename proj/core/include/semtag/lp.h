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

#ifndef SEMTAG_LP_H_
#define SEMTAG_LP_H_

#include <string>
#include <utility>
#include <vector>

namespace semtag {

enum class ConstraintSense { kLessEqual, kEqual, kGreaterEqual };

struct LinearConstraint {
  std::vector<std::pair<int, double>> terms;  // (variable, coefficient)
  ConstraintSense sense = ConstraintSense::kEqual;
  double rhs = 0.0;
  std::string name;
};

// maximize objective . x  subject to constraints, x >= 0.
struct LinearProgram {
  int num_vars = 0;
  std::vector<double> objective;
  std::vector<LinearConstraint> constraints;
  std::vector<std::string> var_names;  // optional, used by the LP writer
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  double objective = 0.0;
  std::vector<double> x;
  int pivots = 0;
};

// Dense two-phase tableau simplex. Dantzig pricing, switching to Bland's rule
// after a run of degenerate pivots.
LpSolution SolveLp(const LinearProgram& lp);

// CPLEX LP text format. With `binary`, every variable is declared binary.
std::string WriteCplexLp(const LinearProgram& lp, bool binary);

}  // namespace semtag

#endif  // SEMTAG_LP_H_
