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

#include "semtag/pipeline.h"

#include <algorithm>
#include <map>
#include <set>

#include "parallel.h"
#include "semtag/argument_matcher.h"
#include "semtag/assignment.h"
#include "semtag/error.h"

namespace semtag {
namespace {

SupertagSequence Spell(const SupertagAssignment& a, const SupertagInventory& inventory,
                       const Vocabulary& labels) {
  SupertagSequence out(a.size());
  for (int i = 0; i < a.size(); ++i) {
    if (!a.active(i)) continue;
    out[i] = NamedSupertag::From({inventory.sites()[a.sites[i]], inventory.roots()[a.roots[i]]},
                                 labels);
  }
  return out;
}

// Maximum-weight matching that covers the smaller side only; used when the
// supertags are not balanced per label.
ArcSet MatchUnbalanced(const SupertagAssignment& a, const SupertagInventory& inventory,
                       const Tensor3& mu) {
  std::map<int, LabelSlotGroup> groups;
  for (int i = 0; i < a.size(); ++i) {
    if (!a.active(i)) continue;
    for (int l : inventory.sites()[a.sites[i]].labels()) groups[l].site_positions.push_back(i);
    for (int l : inventory.roots()[a.roots[i]].labels()) groups[l].root_positions.push_back(i);
  }
  ArcSet arcs;
  for (auto& [label, g] : groups) {
    g.label = label;
    if (g.site_positions.size() == g.root_positions.size()) {
      for (const auto& [s, r] : MatchLabel(g, mu)) arcs.push_back({s, r, label});
      continue;
    }
    if (g.site_positions.empty() || g.root_positions.empty()) continue;
    const bool sites_are_rows = g.site_positions.size() < g.root_positions.size();
    const std::vector<int>& rows = sites_are_rows ? g.site_positions : g.root_positions;
    const std::vector<int>& cols = sites_are_rows ? g.root_positions : g.site_positions;
    Matrix w(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
    for (int r = 0; r < w.rows(); ++r) {
      for (int c = 0; c < w.cols(); ++c) {
        const int head = sites_are_rows ? rows[r] : cols[c];
        const int dep = sites_are_rows ? cols[c] : rows[r];
        w(r, c) = head == dep ? kSelfPairPenalty : mu(head, dep, label);
      }
    }
    const AssignmentResult m = SolveMaxAssignment(w);
    for (int r = 0; r < w.rows(); ++r) {
      const int c = m.col_of_row[r];
      arcs.push_back(sites_are_rows ? LabeledArc{rows[r], cols[c], label}
                                    : LabeledArc{cols[c], rows[r], label});
    }
  }
  std::sort(arcs.begin(), arcs.end());
  return arcs;
}

bool Balanced(const SupertagAssignment& a, const SupertagInventory& inventory) {
  std::vector<Supertag> tags = MaterializeSupertags(a, inventory);
  return VerifyCompanionship(tags).satisfied;
}

SemanticGraph BuildGraph(std::span<const int> tags, const ArcSet& arcs,
                         const ModelVocabularies& vocab, const Tensor3& mu) {
  SemanticGraph g;
  std::vector<int> vertex_at(tags.size(), -1);
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (tags[i] != kEmptyConceptId) {
      vertex_at[i] = g.AddVertex(vocab.concepts.Symbol(tags[i]), static_cast<int>(i));
    }
  }
  // A word pair carries at most one arc; keep the best-scored label.
  std::map<std::pair<int, int>, int> chosen;
  for (const LabeledArc& a : arcs) {
    if (a.head == a.dep || vertex_at[a.head] < 0 || vertex_at[a.dep] < 0) continue;
    auto [it, inserted] = chosen.emplace(std::make_pair(a.head, a.dep), a.label);
    if (!inserted && mu(a.head, a.dep, a.label) > mu(a.head, a.dep, it->second)) {
      it->second = a.label;
    }
  }
  for (const auto& [pair, label] : chosen) {
    g.AddArc(vertex_at[pair.first], vertex_at[pair.second], vocab.labels.Symbol(label));
  }
  return g;
}

nlohmann::json SequenceToJson(const SupertagSequence& seq) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& t : seq) {
    if (t) {
      j.push_back({{"sites", t->sites}, {"roots", t->roots}});
    } else {
      j.push_back(nullptr);
    }
  }
  return j;
}

SupertagSequence SequenceFromJson(const nlohmann::json& j) {
  SupertagSequence seq;
  for (const auto& t : j) {
    if (t.is_null()) {
      seq.emplace_back();
    } else {
      NamedSupertag s{t.at("sites").get<std::vector<std::string>>(),
                      t.at("roots").get<std::vector<std::string>>()};
      std::sort(s.sites.begin(), s.sites.end());
      std::sort(s.roots.begin(), s.roots.end());
      seq.emplace_back(std::move(s));
    }
  }
  return seq;
}

}  // namespace

NamedSupertag NamedSupertag::From(const Supertag& tag, const Vocabulary& labels) {
  NamedSupertag out;
  for (int l : tag.sites.labels()) out.sites.push_back(labels.Symbol(l));
  for (int l : tag.roots.labels()) out.roots.push_back(labels.Symbol(l));
  std::sort(out.sites.begin(), out.sites.end());
  std::sort(out.roots.begin(), out.roots.end());
  return out;
}

ParseResult DecodeScores(const ScoreTables& tables, const ModelVocabularies& vocab,
                         const ParseOptions& options) {
  const int n = tables.length();
  std::vector<int> tags(n);
  for (int i = 0; i < n; ++i) {
    const auto row = tables.lambda.row(i);
    tags[i] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  const std::vector<bool> active = ActiveFromTags(tags);

  ParseResult result;
  const SupertagAssignment independent =
      DecodeUnconstrained(tables.phi_minus, tables.phi_plus, active);
  result.supertags_no_ilp = Spell(independent, vocab.inventory, vocab.labels);

  SupertagAssignment constrained = independent;
  try {
    constrained = DecodeIlp(tables.phi_minus, tables.phi_plus, active, vocab.inventory,
                            options.ilp).assignment;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInfeasible && e.code() != ErrorCode::kTimeout) throw;
    result.ilp_fallback = true;
  }
  result.supertags_ilp = Spell(constrained, vocab.inventory, vocab.labels);

  const SupertagAssignment& chosen = options.use_ilp ? constrained : independent;
  ArcSet arcs;
  if (options.baseline_arcs) {
    arcs = DecodeArcsBaseline(tables.mu, active);
  } else if (Balanced(chosen, vocab.inventory)) {
    arcs = IdentifyArguments(chosen, vocab.inventory, tables.mu);
  } else {
    arcs = MatchUnbalanced(chosen, vocab.inventory, tables.mu);
  }
  result.graph = BuildGraph(tags, arcs, vocab, tables.mu);
  return result;
}

std::vector<ParseResult> RunParse(const Model& model,
                                  std::span<const std::vector<std::string>> sentences,
                                  const ParseOptions& options) {
  std::vector<ParseResult> results(sentences.size());
  internal::ParallelFor(static_cast<int>(sentences.size()), options.threads, [&](int s, int) {
    try {
      const std::vector<int> ids = model.vocab.WordIds(sentences[s]);
      const ForwardPass pass = ScorerForward(model.params, ids, ForwardMode::kEval);
      results[s] = DecodeScores(pass.tables, model.vocab, options);
    } catch (const std::exception& e) {
      results[s] = ParseResult{};
      results[s].error = e.what();
    }
  });
  return results;
}

nlohmann::json PredictionsToJson(std::span<const ParseResult> results,
                                 std::span<const std::vector<std::string>> sentences) {
  if (results.size() != sentences.size()) {
    throw Error(ErrorCode::kLengthMismatch, "results vs sentences");
  }
  nlohmann::json list = nlohmann::json::array();
  for (std::size_t s = 0; s < results.size(); ++s) {
    const ParseResult& r = results[s];
    nlohmann::json entry = {{"sentence", sentences[s]},
                            {"graph", GraphToJson(r.graph)},
                            {"supertags_ilp", SequenceToJson(r.supertags_ilp)},
                            {"supertags_no_ilp", SequenceToJson(r.supertags_no_ilp)},
                            {"ilp_fallback", r.ilp_fallback}};
    if (!r.error.empty()) entry["error"] = r.error;
    list.push_back(std::move(entry));
  }
  return {{"predictions", std::move(list)}};
}

std::vector<ParseResult> PredictionsFromJson(const nlohmann::json& j) {
  std::vector<ParseResult> out;
  try {
    for (const auto& entry : j.at("predictions")) {
      ParseResult r;
      r.graph = GraphFromJson(entry.at("graph"));
      r.supertags_ilp = SequenceFromJson(entry.value("supertags_ilp", nlohmann::json::array()));
      r.supertags_no_ilp =
          SequenceFromJson(entry.value("supertags_no_ilp", nlohmann::json::array()));
      r.ilp_fallback = entry.value("ilp_fallback", false);
      r.error = entry.value("error", std::string());
      out.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorpusParse, std::string("predictions: ") + e.what());
  }
  return out;
}

}  // namespace semtag
