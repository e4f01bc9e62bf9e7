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

#ifndef SEMTAG_PIPELINE_H_
#define SEMTAG_PIPELINE_H_

// Sentence to graph: concept tagging, supertagging (ILP or independent
// argmax) and argument identification (matching or per-pair argmax).

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "semtag/corpus.h"
#include "semtag/model.h"
#include "semtag/supertag_decoder.h"

namespace semtag {

// A supertag spelled with label names; both lists are sorted.
struct NamedSupertag {
  std::vector<std::string> sites;
  std::vector<std::string> roots;

  static NamedSupertag From(const Supertag& tag, const Vocabulary& labels);
  bool operator==(const NamedSupertag&) const = default;
};

// One entry per word; nullopt where the word has no concept.
using SupertagSequence = std::vector<std::optional<NamedSupertag>>;

struct ParseOptions {
  bool use_ilp = true;
  bool baseline_arcs = false;
  int threads = 1;
  IlpOptions ilp;
};

struct ParseResult {
  SemanticGraph graph;
  SupertagSequence supertags_ilp;
  SupertagSequence supertags_no_ilp;
  // Set when the ILP had no solution or ran out of budget and the
  // independent argmax was used in its place.
  bool ilp_fallback = false;
  // Non-empty when the sentence could not be parsed; the graph is then empty.
  std::string error;
};

// Decodes one sentence from precomputed score tables.
ParseResult DecodeScores(const ScoreTables& tables, const ModelVocabularies& vocab,
                         const ParseOptions& options);

// Never throws for a single bad sentence; see ParseResult::error. Output
// order follows input order for any thread count.
std::vector<ParseResult> RunParse(const Model& model,
                                  std::span<const std::vector<std::string>> sentences,
                                  const ParseOptions& options);

// {"predictions": [{"sentence", "graph", "supertags_ilp", "supertags_no_ilp",
// "ilp_fallback", "error"?}, ...]}
nlohmann::json PredictionsToJson(std::span<const ParseResult> results,
                                 std::span<const std::vector<std::string>> sentences);
std::vector<ParseResult> PredictionsFromJson(const nlohmann::json& j);

}  // namespace semtag

#endif  // SEMTAG_PIPELINE_H_
