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

#ifndef SEMTAG_EVALUATION_H_
#define SEMTAG_EVALUATION_H_

// Exact-match and supertagging accuracy reports.

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "semtag/corpus.h"
#include "semtag/pipeline.h"

namespace semtag {

struct Tally {
  long long correct = 0;
  long long total = 0;

  // nullopt when nothing was counted.
  std::optional<double> Percent() const;
  void Count(bool ok) {
    ++total;
    correct += ok ? 1 : 0;
  }
  bool operator==(const Tally&) const = default;
};

struct EvalReport {
  // Exact match by category group.
  Tally overall;
  Tally lexical;
  Tally obj_to_subj_pp;
  Tally pp_recursion;
  Tally cp_recursion;
  Tally in_distribution;
  // Supertagging accuracy against supertags extracted from the gold graph.
  // Word level counts gold-active tokens; sentence level requires every
  // token (including inactive ones) to match.
  Tally supertag_word_ilp;
  Tally supertag_word_no_ilp;
  Tally supertag_sentence_ilp;
  Tally supertag_sentence_no_ilp;
  // Sentences per second of the run that produced the predictions.
  std::optional<double> throughput;

  Tally& Group(CategoryGroup group);

  // Includes raw counts next to every percentage.
  nlohmann::json ToJson() const;
  static EvalReport FromJson(const nlohmann::json& j);
  bool operator==(const EvalReport&) const = default;
};

// Predictions and gold examples are paired by index. Throws
// Error(kLengthMismatch).
EvalReport Evaluate(std::span<const ParseResult> predictions,
                    std::span<const CogsExample> gold);

enum class ReportFormat { kJson, kTsv, kMarkdown };

// Throws Error(kInvalidConfig).
ReportFormat ParseReportFormat(std::string_view name);

std::string EmitReport(const EvalReport& report, ReportFormat format);

}  // namespace semtag

#endif  // SEMTAG_EVALUATION_H_
