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

#ifndef SEMTAG_SCORER_H_
#define SEMTAG_SCORER_H_

// BiLSTM scorer producing concept scores (lambda), site and root scores
// (phi-, phi+) and biaffine arc scores (mu), with hand-written backprop.
//
// Architecture: embedding -> 1-layer BiLSTM -> four heads.
//   tag head:   Linear(2H, tag_mlp) ReLU Linear(tag_mlp, |T|-1)  (empty tag pinned at 0)
//   site head:  Linear(2H, supertag_mlp) ReLU Linear(supertag_mlp, |S-|)
//   root head:  Linear(2H, supertag_mlp) ReLU Linear(supertag_mlp, |S+|)
//   arc head:   head/dependent Linear(2H, arc_mlp) ReLU, then per label
//               mu(i, j, l) = [h_i; 1]^T U_l [d_j; 1]
// Dropout is applied to the outputs of the embedding, the BiLSTM and every
// hidden MLP layer in training mode.

#include <array>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "semtag/tensor.h"

namespace semtag {

struct ScorerConfig {
  int embed_dim = 200;
  int lstm_hidden = 400;
  int tag_mlp_dim = 300;
  int supertag_mlp_dim = 200;
  int arc_mlp_dim = 200;
  double dropout = 0.3;
  double learning_rate = 5e-4;
  int batch_size = 30;
  std::uint64_t seed = 1;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double unk_replace_prob = 0.1;

  // Throws Error(kInvalidConfig).
  void Validate() const;

  nlohmann::json ToJson() const;
  static ScorerConfig FromJson(const nlohmann::json& j);
};

// Output sizes the scorer is built for.
struct ModelSizes {
  int vocab = 0;     // words, including the unknown-word entry
  int concepts = 0;  // |T|, including the empty concept
  int sites = 0;     // |S-|
  int roots = 0;     // |S+|
  int labels = 0;    // |L|

  bool operator==(const ModelSizes&) const = default;
};

// Independently freezable parts of the network.
enum class ParamGroup { kEncoder = 0, kTagHead, kSiteHead, kRootHead, kArcHead };
inline constexpr int kNumParamGroups = 5;
std::string_view ParamGroupName(ParamGroup group);

// Column-major dense array with a name and a group.
struct NamedArray {
  std::string name;
  ParamGroup group = ParamGroup::kEncoder;
  int rows = 0;
  int cols = 0;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
};

class ParameterSet {
 public:
  ParameterSet() = default;
  ParameterSet(ScorerConfig config, ModelSizes sizes);

  const ScorerConfig& config() const { return config_; }
  const ModelSizes& sizes() const { return sizes_; }

  std::vector<NamedArray>& arrays() { return arrays_; }
  const std::vector<NamedArray>& arrays() const { return arrays_; }
  NamedArray& array(int index) { return arrays_[index]; }
  const NamedArray& array(int index) const { return arrays_[index]; }
  const NamedArray& Find(std::string_view name) const;

  std::size_t TotalSize() const;
  // Flat views used by the optimizer and gradient checks.
  double& Scalar(std::size_t flat_index);
  double Scalar(std::size_t flat_index) const;

  bool frozen(ParamGroup g) const { return frozen_[static_cast<int>(g)]; }
  void Freeze(ParamGroup g) { frozen_[static_cast<int>(g)] = true; }
  void Unfreeze(ParamGroup g) { frozen_[static_cast<int>(g)] = false; }
  void FreezeAll() { frozen_.fill(true); }
  void UnfreezeAll() { frozen_.fill(false); }
  std::vector<std::string> FrozenNames() const;

  // Zero-filled copy with the same layout.
  ParameterSet ZerosLike() const;
  void SetZero();
  void Add(const ParameterSet& other, double scale = 1.0);
  bool AllFinite() const;

  bool operator==(const ParameterSet& other) const;

 private:
  ScorerConfig config_;
  ModelSizes sizes_;
  std::vector<NamedArray> arrays_;
  std::array<bool, kNumParamGroups> frozen_{};
};

// Closed-form parameter count of the architecture above.
std::size_t ExpectedParameterCount(const ScorerConfig& config, const ModelSizes& sizes);

// Deterministic given config.seed. No frozen groups.
ParameterSet ScorerInit(const ScorerConfig& config, const ModelSizes& sizes);

struct ScoreTables {
  Matrix lambda;     // n x |T|, column 0 is the empty concept and always 0
  Matrix phi_minus;  // n x |S-|
  Matrix phi_plus;   // n x |S+|
  Tensor3 mu;        // n x n x |L|, diagonal (i == i) entries are 0 and unused

  int length() const { return lambda.rows(); }
  static ScoreTables Zeros(int n, const ModelSizes& sizes);
};

enum class ForwardMode { kTrain, kEval };

struct ForwardCache;

// Result of a forward pass; keeps the activations needed by ScorerBackward.
struct ForwardPass {
  ScoreTables tables;
  std::shared_ptr<const ForwardCache> cache;
};

// kTrain applies dropout using `rng` (required when dropout > 0);
// kEval is deterministic. Throws Error(kEmptySentence).
ForwardPass ScorerForward(const ParameterSet& params, std::span<const int> word_ids,
                          ForwardMode mode, std::mt19937_64* rng = nullptr);

// Gradient of sum(upstream * tables) with respect to every parameter. Frozen
// groups receive zeros. Throws Error(kShapeMismatch).
ParameterSet ScorerBackward(const ParameterSet& params, const ForwardPass& pass,
                            const ScoreTables& upstream);

// Adam over the unfrozen groups of a ParameterSet.
class AdamOptimizer {
 public:
  explicit AdamOptimizer(const ParameterSet& params);

  // params -= lr * adam_direction(grads); frozen groups are left untouched.
  void Step(ParameterSet& params, const ParameterSet& grads);
  long long steps() const { return step_; }

 private:
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  long long step_ = 0;
};

// Uniform double in [0, 1) from 53 random bits; portable across libraries.
inline double UniformUnit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace semtag

#endif  // SEMTAG_SCORER_H_
