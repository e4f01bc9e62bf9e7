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

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.h"
#include "semtag/error.h"

namespace semtag {
namespace {

constexpr int kTrials = 120;
constexpr double kStep = 1e-3;
constexpr double kMaxRelError = 1e-8;

// Plain log-sum-exp NLL of one row, optionally with an extra zero logit.
double NaiveNll(const std::vector<double>& row, int gold, bool with_null) {
  double z = with_null ? 1.0 : 0.0;
  for (double x : row) z += std::exp(x);
  return std::log(z) - (gold >= 0 ? row[gold] : 0.0);
}

struct Problem {
  Matrix lambda;
  std::vector<int> tags;
  Matrix phi_minus, phi_plus;
  SupertagAssignment gold;
  Tensor3 mu;
  ArcSet arcs;
  std::vector<bool> active;
};

Problem RandomProblem(std::mt19937_64& rng) {
  Problem p;
  const int n = std::uniform_int_distribution<int>(2, 6)(rng);
  const int t = std::uniform_int_distribution<int>(2, 5)(rng);
  const int s = std::uniform_int_distribution<int>(2, 4)(rng);
  const int r = std::uniform_int_distribution<int>(2, 4)(rng);
  const int l = std::uniform_int_distribution<int>(1, 3)(rng);
  p.lambda = oracle::RandomMatrix(rng, n, t, -2, 2);
  for (int i = 0; i < n; ++i) p.lambda(i, 0) = 0.0;
  p.phi_minus = oracle::RandomMatrix(rng, n, s, -2, 2);
  p.phi_plus = oracle::RandomMatrix(rng, n, r, -2, 2);
  p.mu = Tensor3(n, n, l);
  std::uniform_real_distribution<double> u(-2, 2);
  for (double& v : p.mu.data()) v = u(rng);
  p.gold = SupertagAssignment::Inactive(n);
  std::bernoulli_distribution on(0.7);
  for (int i = 0; i < n; ++i) {
    const int tag = std::uniform_int_distribution<int>(0, t - 1)(rng);
    p.tags.push_back(on(rng) ? tag : 0);
    p.active.push_back(p.tags[i] != 0);
    if (p.active[i]) {
      p.gold.sites[i] = std::uniform_int_distribution<int>(0, s - 1)(rng);
      p.gold.roots[i] = std::uniform_int_distribution<int>(0, r - 1)(rng);
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && p.active[i] && p.active[j] && on(rng)) {
        p.arcs.push_back({i, j, std::uniform_int_distribution<int>(0, l - 1)(rng)});
      }
    }
  }
  return p;
}

TEST(ConceptLossTest, ValueMatchesNaiveFormula) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const Problem p = RandomProblem(rng);
    double expected = 0;
    for (int i = 0; i < p.lambda.rows(); ++i) {
      const auto row = p.lambda.row(i);
      expected += NaiveNll({row.begin(), row.end()}, p.tags[i], false);
    }
    EXPECT_NEAR(ConceptLoss(p.lambda, p.tags).value, expected, 1e-10);
  }
}

TEST(ConceptLossTest, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < kTrials; ++trial) {
    Problem p = RandomProblem(rng);
    const MatrixLoss loss = ConceptLoss(p.lambda, p.tags);
    const int i = std::uniform_int_distribution<int>(0, p.lambda.rows() - 1)(rng);
    const int t = std::uniform_int_distribution<int>(0, p.lambda.cols() - 1)(rng);
    const double x0 = p.lambda(i, t);
    const double fd = oracle::CentralDifference(
        [&](double x) {
          p.lambda(i, t) = x;
          return ConceptLoss(p.lambda, p.tags).value;
        },
        x0, kStep);
    EXPECT_LE(oracle::RelativeError(loss.grad(i, t), fd), kMaxRelError) << "trial " << trial;
  }
}

TEST(SupertagNllTest, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < kTrials; ++trial) {
    Problem p = RandomProblem(rng);
    const SupertagLoss loss = SupertagNll(p.phi_minus, p.phi_plus, p.gold);
    const bool minus = trial % 2 == 0;
    Matrix& m = minus ? p.phi_minus : p.phi_plus;
    const int i = std::uniform_int_distribution<int>(0, m.rows() - 1)(rng);
    const int c = std::uniform_int_distribution<int>(0, m.cols() - 1)(rng);
    const double x0 = m(i, c);
    const double fd = oracle::CentralDifference(
        [&](double x) {
          m(i, c) = x;
          return SupertagNll(p.phi_minus, p.phi_plus, p.gold).value;
        },
        x0, kStep);
    const double analytic = minus ? loss.grad_minus(i, c) : loss.grad_plus(i, c);
    EXPECT_LE(oracle::RelativeError(analytic, fd), kMaxRelError) << "trial " << trial;
  }
}

TEST(SupertagNllTest, InactiveWordsContributeNothing) {
  std::mt19937_64 rng(34);
  const Problem p = RandomProblem(rng);
  const SupertagLoss loss =
      SupertagNll(p.phi_minus, p.phi_plus, SupertagAssignment::Inactive(p.gold.size()));
  EXPECT_EQ(loss.value, 0.0);
  for (double g : loss.grad_minus.data()) EXPECT_EQ(g, 0.0);
}

TEST(ArcNllTest, ValueMatchesNaiveFormula) {
  std::mt19937_64 rng(35);
  for (int trial = 0; trial < 50; ++trial) {
    const Problem p = RandomProblem(rng);
    const int n = p.mu.dim0(), l = p.mu.dim2();
    double expected = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j || !p.active[i] || !p.active[j]) continue;
        std::vector<double> row(l);
        for (int k = 0; k < l; ++k) row[k] = p.mu(i, j, k);
        int gold = -1;
        for (const LabeledArc& a : p.arcs) {
          if (a.head == i && a.dep == j) gold = a.label;
        }
        expected += NaiveNll(row, gold, true);
      }
    }
    EXPECT_NEAR(ArcNll(p.mu, p.arcs, p.active).value, expected, 1e-10);
  }
}

TEST(ArcNllTest, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(36);
  for (int trial = 0; trial < kTrials; ++trial) {
    Problem p = RandomProblem(rng);
    const ArcLoss loss = ArcNll(p.mu, p.arcs, p.active);
    const int n = p.mu.dim0();
    const int i = std::uniform_int_distribution<int>(0, n - 1)(rng);
    const int j = std::uniform_int_distribution<int>(0, n - 1)(rng);
    const int k = std::uniform_int_distribution<int>(0, p.mu.dim2() - 1)(rng);
    const double x0 = p.mu(i, j, k);
    const double fd = oracle::CentralDifference(
        [&](double x) {
          p.mu(i, j, k) = x;
          return ArcNll(p.mu, p.arcs, p.active).value;
        },
        x0, kStep);
    EXPECT_LE(oracle::RelativeError(loss.grad(i, j, k), fd), kMaxRelError) << "trial " << trial;
  }
}

TEST(LossLimitTest, DominantGoldDrivesEveryLossToZero) {
  std::mt19937_64 rng(37);
  Problem p = RandomProblem(rng);
  for (int i = 0; i < p.lambda.rows(); ++i) {
    for (int t = 0; t < p.lambda.cols(); ++t) p.lambda(i, t) = t == p.tags[i] ? 60.0 : 0.0;
    for (int s = 0; s < p.phi_minus.cols(); ++s) {
      p.phi_minus(i, s) = s == p.gold.sites[i] ? 60.0 : 0.0;
    }
    for (int r = 0; r < p.phi_plus.cols(); ++r) {
      p.phi_plus(i, r) = r == p.gold.roots[i] ? 60.0 : 0.0;
    }
  }
  for (double& v : p.mu.data()) v = -60.0;
  for (const LabeledArc& a : p.arcs) p.mu(a.head, a.dep, a.label) = 60.0;
  EXPECT_LT(ConceptLoss(p.lambda, p.tags).value, 1e-20);
  EXPECT_LT(SupertagNll(p.phi_minus, p.phi_plus, p.gold).value, 1e-20);
  EXPECT_LT(ArcNll(p.mu, p.arcs, p.active).value, 1e-20);
  // A wrong gold under the same scores costs about the margin.
  std::vector<int> wrong = p.tags;
  wrong[0] = (wrong[0] + 1) % p.lambda.cols();
  EXPECT_GT(ConceptLoss(p.lambda, wrong).value, 59.0);
}

TEST(LossShapeTest, MismatchesThrow) {
  EXPECT_THROW(ConceptLoss(Matrix(2, 3), std::vector<int>{0}), Error);
  EXPECT_THROW(ConceptLoss(Matrix(1, 3), std::vector<int>{3}), Error);
  EXPECT_THROW(ArcNll(Tensor3(2, 2, 1), {{0, 0, 0}}, {true, true}), Error);
  EXPECT_THROW(ArcNll(Tensor3(2, 2, 1), {{0, 1, 0}, {0, 1, 0}}, {true, true}), Error);
}

}  // namespace
}  // namespace semtag
