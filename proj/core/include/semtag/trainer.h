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

#ifndef SEMTAG_TRAINER_H_
#define SEMTAG_TRAINER_H_

// Supervised training with incremental early stopping, output-layer
// fine-tuning and weakly supervised hard EM.

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "semtag/alignment.h"
#include "semtag/argument_matcher.h"
#include "semtag/corpus.h"
#include "semtag/model.h"
#include "semtag/supertag_decoder.h"

namespace semtag {

struct TrainConfig {
  ScorerConfig scorer;
  int max_epochs = 100;
  bool early_stopping = true;
  int finetune_epochs = 5;
  int threads = 1;

  // Throws Error(kInvalidConfig).
  void Validate() const;
};

// Marks a gold concept, site set or root set that the model cannot
// represent. Such positions are still active but can never be predicted.
inline constexpr int kOutsideVocabulary = -2;

// The gold tuple (tags, site sets, root sets, arcs) of an anchored graph.
struct GoldDecomposition {
  std::vector<int> tags;  // concept id per word, 0 when empty
  SupertagAssignment supertags;
  ArcSet arcs;

  std::vector<bool> Active() const;
  // True when every entry is representable by the model.
  bool Complete() const;
};

// Throws Error(kUnanchoredVertex) if a vertex has no anchor.
GoldDecomposition DecomposeGraph(const SemanticGraph& graph, int num_words,
                                 const ModelVocabularies& vocab);

// Words, concepts, labels and the supertag inventory of a training set.
// Throws Error(kEmptyTrainingSet).
ModelVocabularies BuildVocabularies(std::span<const CogsExample> train);

// Copy of `graph` anchored by `alignment` (variables in vertex order).
SemanticGraph AnchorGraph(const SemanticGraph& graph, const Alignment& alignment);

// E step: best anchoring of an unanchored graph under the current scorer.
SemanticGraph InduceAnchors(const Model& model, std::span<const std::string> words,
                            const SemanticGraph& graph);

// Exact-match accuracies of each output head in isolation, in [0, 1].
// tag: all tokens; site/root: gold-active tokens; arc: ordered pairs of
// distinct gold-active tokens (label or null).
struct SubtaskAccuracy {
  double tag = 1.0;
  double site = 1.0;
  double root = 1.0;
  double arc = 1.0;
};

SubtaskAccuracy EvaluateSubtasks(const Model& model, std::span<const CogsExample> dev,
                                 int threads = 1);

struct EpochRecord {
  std::string phase;  // "train" or "finetune:<head>"
  int epoch = 0;
  double loss_concept = 0.0;
  double loss_supertag = 0.0;
  double loss_arc = 0.0;
  SubtaskAccuracy dev;
  std::vector<std::string> frozen;
  double wall_seconds = 0.0;

  nlohmann::json ToJson() const;
};

enum class Supervision { kGoldAnchors, kHardEm };

struct TrainResult {
  Model model;
  std::vector<EpochRecord> log;
  // True when every head reached full dev accuracy before max_epochs.
  bool converged = false;
};

// Each record is also written to `log` as one JSON line when given.
// Throws Error(kEmptyTrainingSet), Error(kInvalidConfig) or
// Error(kDivergedLoss).
TrainResult TrainModel(std::span<const CogsExample> train, std::span<const CogsExample> dev,
                       const TrainConfig& config, Supervision supervision,
                       std::ostream* log = nullptr);

enum class OutputHead { kTag, kSite, kRoot, kArc };

// Throws Error(kUnknownHead).
OutputHead ParseOutputHead(std::string_view name);
std::string_view OutputHeadName(OutputHead head);
ParamGroup HeadGroup(OutputHead head);

// Trains only `head` for config.finetune_epochs epochs; the frozen state of
// the model is restored afterwards.
std::vector<EpochRecord> OutputFinetune(Model& model, std::span<const CogsExample> train,
                                        std::span<const CogsExample> dev, OutputHead head,
                                        const TrainConfig& config, Supervision supervision,
                                        std::ostream* log = nullptr);

}  // namespace semtag

#endif  // SEMTAG_TRAINER_H_
