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

#include "semtag/alignment.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "semtag/assignment.h"
#include "semtag/error.h"

namespace semtag {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double Tolerance(double v) { return 1e-9 * std::max(1.0, std::abs(v)); }

class AlignmentSearch {
 public:
  AlignmentSearch(const AlignmentFactorGraph& fg, const Matrix& lambda, const Tensor3& mu)
      : fg_(fg), lambda_(lambda), mu_(mu), k_(fg.num_variables()), n_(fg.num_words),
        position_(k_, -1), used_(n_, false) {
    incident_.resize(k_);
    for (int f = 0; f < static_cast<int>(fg.binaries.size()); ++f) {
      incident_[fg.binaries[f].head].push_back(f);
      incident_[fg.binaries[f].dep].push_back(f);
    }
  }

  Alignment Exhaustive() {
    Enumerate(0, 0.0);
    return Finish();
  }

  Alignment BranchAndBound() {
    // Variables in decreasing degree order tighten bounds early.
    order_.resize(k_);
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) {
      return incident_[a].size() > incident_[b].size();
    });
    Search(0, 0.0);
    return Finish();
  }

 private:
  double Unary(int var, int word) const { return lambda_(word, fg_.concepts[var]); }

  // Binary factors between `var` (placed at `word`) and already placed variables.
  double Gain(int var, int word) const {
    double g = Unary(var, word);
    for (int f : incident_[var]) {
      const auto& b = fg_.binaries[f];
      const int other = b.head == var ? b.dep : b.head;
      if (other == var || position_[other] < 0) continue;
      g += b.head == var ? mu_(word, position_[other], b.label)
                         : mu_(position_[other], word, b.label);
    }
    return g;
  }

  void Offer(double score) {
    if (!found_ || score > best_ + Tolerance(best_)) {
      found_ = true;
      best_ = score;
      best_position_ = position_;
    }
  }

  void Enumerate(int var, double score) {
    if (var == k_) {
      Offer(score);
      return;
    }
    for (int w = 0; w < n_; ++w) {
      if (used_[w]) continue;
      const double g = Gain(var, w);
      position_[var] = w;
      used_[w] = true;
      Enumerate(var + 1, score + g);
      used_[w] = false;
      position_[var] = -1;
    }
  }

  // Upper bound on the best completion: every unplaced variable gets its unary
  // plus exact binaries to placed neighbours plus, for factors between two
  // unplaced variables, the best case charged to the head; then an assignment
  // over free words enforces injectivity among the unplaced variables.
  double CompletionBound(int depth) const {
    std::vector<int> rest(order_.begin() + depth, order_.end());
    if (rest.empty()) return 0.0;
    std::vector<int> free_words;
    for (int w = 0; w < n_; ++w) {
      if (!used_[w]) free_words.push_back(w);
    }
    Matrix est(static_cast<int>(rest.size()), static_cast<int>(free_words.size()));
    for (std::size_t r = 0; r < rest.size(); ++r) {
      const int var = rest[r];
      for (std::size_t c = 0; c < free_words.size(); ++c) {
        const int w = free_words[c];
        double value = Gain(var, w);
        for (int f : incident_[var]) {
          const auto& b = fg_.binaries[f];
          if (b.head != var || position_[b.dep] >= 0) continue;
          double best = kNegInf;
          for (int w2 : free_words) {
            if (w2 != w) best = std::max(best, mu_(w, w2, b.label));
          }
          if (best == kNegInf) return kNegInf;
          value += best;
        }
        est(r, c) = value;
      }
    }
    return SolveMaxAssignment(est).weight;
  }

  void Search(int depth, double score) {
    if (depth == k_) {
      Offer(score);
      return;
    }
    if (found_) {
      const double bound = CompletionBound(depth);
      if (score + bound <= best_ + Tolerance(best_)) return;
    }
    const int var = order_[depth];
    std::vector<std::pair<double, int>> candidates;
    for (int w = 0; w < n_; ++w) {
      if (!used_[w]) candidates.emplace_back(Gain(var, w), w);
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (const auto& [g, w] : candidates) {
      position_[var] = w;
      used_[w] = true;
      Search(depth + 1, score + g);
      used_[w] = false;
      position_[var] = -1;
    }
  }

  Alignment Finish() {
    Alignment a;
    a.position = best_position_;
    a.objective = best_;
    return a;
  }

  const AlignmentFactorGraph& fg_;
  const Matrix& lambda_;
  const Tensor3& mu_;
  int k_;
  int n_;
  std::vector<int> position_;
  std::vector<bool> used_;
  std::vector<std::vector<int>> incident_;
  std::vector<int> order_;
  bool found_ = false;
  double best_ = kNegInf;
  std::vector<int> best_position_;
};

}  // namespace

AlignmentFactorGraph AlignmentFactorGraph::FromGraph(const SemanticGraph& graph,
                                                     int num_words,
                                                     const Vocabulary& concepts,
                                                     const Vocabulary& labels) {
  AlignmentFactorGraph fg;
  fg.num_words = num_words;
  for (const Vertex& v : graph.vertices()) fg.concepts.push_back(concepts.IdOf(v.concept_name));
  for (const Arc& a : graph.arcs()) {
    fg.binaries.push_back({graph.IndexOf(a.head), graph.IndexOf(a.dep), labels.IdOf(a.label)});
  }
  return fg;
}

double AlignmentScore(const AlignmentFactorGraph& fg, const std::vector<int>& position,
                      const Matrix& lambda, const Tensor3& mu) {
  std::vector<bool> used(fg.num_words, false);
  double s = 0.0;
  for (int k = 0; k < fg.num_variables(); ++k) {
    if (used[position[k]]) return kNegInf;
    used[position[k]] = true;
    s += lambda(position[k], fg.concepts[k]);
  }
  for (const auto& b : fg.binaries) s += mu(position[b.head], position[b.dep], b.label);
  return s;
}

Alignment MapAlignment(const AlignmentFactorGraph& fg, const Matrix& lambda,
                       const Tensor3& mu, const AlignmentOptions& options) {
  const int k = fg.num_variables();
  const int n = fg.num_words;
  if (k > n) {
    throw Error(ErrorCode::kTooManyInstances,
                std::to_string(k) + " concept instances for " + std::to_string(n) + " words");
  }
  if (lambda.rows() != n || mu.dim0() != n || mu.dim1() != n) {
    throw Error(ErrorCode::kShapeMismatch, "score tables vs sentence length");
  }
  if (k == 0) return {};
  // n! / (n-k)!, saturating.
  long long maps = 1;
  for (int i = 0; i < k && maps <= options.exhaustive_limit; ++i) maps *= n - i;
  AlignmentSearch search(fg, lambda, mu);
  if (!options.force_branch_and_bound && maps <= options.exhaustive_limit) {
    return search.Exhaustive();
  }
  return search.BranchAndBound();
}

}  // namespace semtag
