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

#include "semtag/evaluation.h"

#include <cstdio>
#include <sstream>
#include <utility>

#include "semtag/error.h"
#include "semtag/supertag.h"

namespace semtag {
namespace {

struct Field {
  const char* name;
  Tally EvalReport::*member;
};

constexpr Field kFields[] = {
    {"overall", &EvalReport::overall},
    {"lexical", &EvalReport::lexical},
    {"obj_to_subj_pp", &EvalReport::obj_to_subj_pp},
    {"pp_recursion", &EvalReport::pp_recursion},
    {"cp_recursion", &EvalReport::cp_recursion},
    {"in_distribution", &EvalReport::in_distribution},
    {"supertag_word_ilp", &EvalReport::supertag_word_ilp},
    {"supertag_word_no_ilp", &EvalReport::supertag_word_no_ilp},
    {"supertag_sentence_ilp", &EvalReport::supertag_sentence_ilp},
    {"supertag_sentence_no_ilp", &EvalReport::supertag_sentence_no_ilp},
};

SupertagSequence GoldSupertags(const CogsExample& ex) {
  Vocabulary labels;
  InternLabels(std::span<const SemanticGraph>(&ex.graph, 1), labels);
  const std::vector<Supertag> tags = ExtractSupertags(ex.graph, labels);
  SupertagSequence seq(ex.sentence.size());
  const auto& vertices = ex.graph.vertices();
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    const auto& anchor = vertices[k].anchor;
    if (!anchor || *anchor < 0 || *anchor >= static_cast<int>(seq.size())) {
      throw Error(ErrorCode::kUnanchoredVertex, "gold vertex " + std::to_string(vertices[k].id));
    }
    seq[*anchor] = NamedSupertag::From(tags[k], labels);
  }
  return seq;
}

void ScoreSupertags(const SupertagSequence& predicted, const SupertagSequence& gold,
                    Tally& word, Tally& sentence) {
  bool all = predicted.size() == gold.size();
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool ok = i < predicted.size() && predicted[i] == gold[i];
    if (gold[i]) word.Count(ok);
    all = all && ok;
  }
  sentence.Count(all);
}

std::string FormatPercent(const Tally& t) {
  const auto p = t.Percent();
  if (!p) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", *p);
  return buf;
}

}  // namespace

std::optional<double> Tally::Percent() const {
  if (total == 0) return std::nullopt;
  return 100.0 * static_cast<double>(correct) / static_cast<double>(total);
}

Tally& EvalReport::Group(CategoryGroup group) {
  switch (group) {
    case CategoryGroup::kInDistribution: return in_distribution;
    case CategoryGroup::kLexical: return lexical;
    case CategoryGroup::kObjToSubjPP: return obj_to_subj_pp;
    case CategoryGroup::kPPRecursion: return pp_recursion;
    case CategoryGroup::kCPRecursion: return cp_recursion;
  }
  return overall;
}

nlohmann::json EvalReport::ToJson() const {
  nlohmann::json j = nlohmann::json::object();
  for (const Field& f : kFields) {
    const Tally& t = this->*f.member;
    const auto p = t.Percent();
    j[f.name] = {{"correct", t.correct},
                 {"total", t.total},
                 {"percent", p ? nlohmann::json(*p) : nlohmann::json(nullptr)}};
  }
  j["sentences_per_second"] = throughput ? nlohmann::json(*throughput) : nlohmann::json(nullptr);
  return j;
}

EvalReport EvalReport::FromJson(const nlohmann::json& j) {
  EvalReport r;
  try {
    for (const Field& f : kFields) {
      Tally& t = r.*f.member;
      t.correct = j.at(f.name).at("correct").get<long long>();
      t.total = j.at(f.name).at("total").get<long long>();
    }
    const auto& tp = j.at("sentences_per_second");
    if (!tp.is_null()) r.throughput = tp.get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorpusParse, std::string("report: ") + e.what());
  }
  return r;
}

EvalReport Evaluate(std::span<const ParseResult> predictions,
                    std::span<const CogsExample> gold) {
  if (predictions.size() != gold.size()) {
    throw Error(ErrorCode::kLengthMismatch, std::to_string(predictions.size()) +
                                                " predictions for " +
                                                std::to_string(gold.size()) + " gold examples");
  }
  EvalReport r;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    const bool exact = predictions[s].error.empty() &&
                       GraphsEqual(predictions[s].graph, gold[s].graph);
    r.overall.Count(exact);
    r.Group(ClassifyCategory(gold[s].category)).Count(exact);
    const SupertagSequence gold_tags = GoldSupertags(gold[s]);
    ScoreSupertags(predictions[s].supertags_ilp, gold_tags, r.supertag_word_ilp,
                   r.supertag_sentence_ilp);
    ScoreSupertags(predictions[s].supertags_no_ilp, gold_tags, r.supertag_word_no_ilp,
                   r.supertag_sentence_no_ilp);
  }
  return r;
}

ReportFormat ParseReportFormat(std::string_view name) {
  if (name == "json") return ReportFormat::kJson;
  if (name == "tsv") return ReportFormat::kTsv;
  if (name == "markdown" || name == "md") return ReportFormat::kMarkdown;
  throw Error(ErrorCode::kInvalidConfig, "unknown report format " + std::string(name));
}

std::string EmitReport(const EvalReport& report, ReportFormat format) {
  std::ostringstream out;
  switch (format) {
    case ReportFormat::kJson:
      out << report.ToJson().dump(2) << '\n';
      break;
    case ReportFormat::kTsv: {
      for (const Field& f : kFields) out << f.name << "_percent\t" << f.name << "_correct\t"
                                         << f.name << "_total\t";
      out << "sentences_per_second\n";
      for (const Field& f : kFields) {
        const Tally& t = report.*f.member;
        out << FormatPercent(t) << '\t' << t.correct << '\t' << t.total << '\t';
      }
      if (report.throughput) {
        out << *report.throughput;
      } else {
        out << "n/a";
      }
      out << '\n';
      break;
    }
    case ReportFormat::kMarkdown: {
      out << "| Overall | Lexical | Obj to Subj PP | PP recursion | CP recursion |\n"
          << "|---|---|---|---|---|\n"
          << "| " << FormatPercent(report.overall) << " | " << FormatPercent(report.lexical)
          << " | " << FormatPercent(report.obj_to_subj_pp) << " | "
          << FormatPercent(report.pp_recursion) << " | " << FormatPercent(report.cp_recursion)
          << " |\n\n"
          << "| Supertagging | Word | Sentence |\n"
          << "|---|---|---|\n"
          << "| ILP | " << FormatPercent(report.supertag_word_ilp) << " | "
          << FormatPercent(report.supertag_sentence_ilp) << " |\n"
          << "| No ILP | " << FormatPercent(report.supertag_word_no_ilp) << " | "
          << FormatPercent(report.supertag_sentence_no_ilp) << " |\n";
      if (report.throughput) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.1f", *report.throughput);
        out << "\nThroughput: " << buf << " sentences/s\n";
      }
      break;
    }
  }
  return out.str();
}

}  // namespace semtag
