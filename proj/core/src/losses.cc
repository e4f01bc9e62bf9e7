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

#include "semtag/losses.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "semtag/error.h"

namespace semtag {
namespace {

// Adds softmax(row) - onehot(gold) into grad and returns -row[gold] + lse(row).
// `gold` may be -1 for an implicit extra logit of value `extra` (null label).
double RowNll(std::span<const double> row, int gold, std::span<double> grad,
              bool with_null) {
  double mx = with_null ? 0.0 : -std::numeric_limits<double>::infinity();
  for (double x : row) mx = std::max(mx, x);
  double z = with_null ? std::exp(-mx) : 0.0;
  for (double x : row) z += std::exp(x - mx);
  const double lse = mx + std::log(z);
  for (std::size_t j = 0; j < row.size(); ++j) grad[j] += std::exp(row[j] - lse);
  if (gold >= 0) {
    grad[gold] -= 1.0;
    return lse - row[gold];
  }
  return lse;  // gold is the null logit, whose score is 0
}

}  // namespace

MatrixLoss ConceptLoss(const Matrix& lambda, std::span<const int> gold_tags) {
  if (static_cast<int>(gold_tags.size()) != lambda.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "gold tags vs concept scores");
  }
  MatrixLoss out{0.0, Matrix(lambda.rows(), lambda.cols())};
  for (int i = 0; i < lambda.rows(); ++i) {
    if (gold_tags[i] < 0 || gold_tags[i] >= lambda.cols()) {
      throw Error(ErrorCode::kShapeMismatch, "gold tag out of range");
    }
    out.value += RowNll(lambda.row(i), gold_tags[i], out.grad.row(i), false);
  }
  return out;
}

SupertagLoss SupertagNll(const Matrix& phi_minus, const Matrix& phi_plus,
                         const SupertagAssignment& gold) {
  if (gold.size() != phi_minus.rows() || gold.size() != phi_plus.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "gold supertags vs supertag scores");
  }
  SupertagLoss out{0.0, Matrix(phi_minus.rows(), phi_minus.cols()),
                   Matrix(phi_plus.rows(), phi_plus.cols())};
  for (int i = 0; i < gold.size(); ++i) {
    if (!gold.active(i)) continue;
    if (gold.sites[i] >= phi_minus.cols() || gold.roots[i] >= phi_plus.cols()) {
      throw Error(ErrorCode::kShapeMismatch, "gold supertag out of range");
    }
    out.value += RowNll(phi_minus.row(i), gold.sites[i], out.grad_minus.row(i), false);
    out.value += RowNll(phi_plus.row(i), gold.roots[i], out.grad_plus.row(i), false);
  }
  return out;
}

ArcLoss ArcNll(const Tensor3& mu, const ArcSet& gold, const std::vector<bool>& active) {
  const int n = static_cast<int>(active.size());
  if (mu.dim0() != n || mu.dim1() != n) {
    throw Error(ErrorCode::kShapeMismatch, "arc scores vs sentence length");
  }
  std::map<std::pair<int, int>, int> gold_label;
  for (const LabeledArc& a : gold) {
    if (a.head == a.dep || a.label < 0 || a.label >= mu.dim2()) {
      throw Error(ErrorCode::kShapeMismatch, "invalid gold arc");
    }
    if (!gold_label.emplace(std::make_pair(a.head, a.dep), a.label).second) {
      throw Error(ErrorCode::kShapeMismatch, "two gold labels on one ordered pair");
    }
  }
  const int num_labels = mu.dim2();
  ArcLoss out{0.0, Tensor3(n, n, num_labels)};
  for (int i = 0; i < n; ++i) {
    if (!active[i]) continue;
    for (int j = 0; j < n; ++j) {
      if (j == i || !active[j]) continue;
      auto it = gold_label.find({i, j});
      const int g = it == gold_label.end() ? -1 : it->second;
      std::span<const double> row(&mu.data()[(static_cast<std::size_t>(i) * n + j) * num_labels],
                                  num_labels);
      std::span<double> grad(&out.grad.data()[(static_cast<std::size_t>(i) * n + j) * num_labels],
                             num_labels);
      out.value += RowNll(row, g, grad, true);
    }
  }
  return out;
}

}  // namespace semtag
