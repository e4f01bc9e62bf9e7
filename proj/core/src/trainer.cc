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

#include "semtag/trainer.h"

#include <chrono>
#include <cmath>
#include <map>
#include <ostream>
#include <random>

#include "parallel.h"
#include "semtag/error.h"
#include "semtag/losses.h"

namespace semtag {
namespace {

using internal::MixSeed;
using internal::ParallelFor;
using internal::WorkerCount;

int ArgmaxRow(std::span<const double> row) {
  int best = 0;
  for (int k = 1; k < static_cast<int>(row.size()); ++k) {
    if (row[k] > row[best]) best = k;
  }
  return best;
}

struct Prepared {
  std::vector<std::string> words;
  std::vector<int> word_ids;
  std::vector<bool> singleton;
  const SemanticGraph* graph = nullptr;
  std::optional<GoldDecomposition> gold;  // fixed when anchors are known
};

std::vector<Prepared> Prepare(std::span<const CogsExample> examples, const Model& model,
                              const std::map<std::string, int>& counts,
                              Supervision supervision) {
  std::vector<Prepared> out;
  out.reserve(examples.size());
  for (const CogsExample& ex : examples) {
    Prepared p;
    p.words = ex.Words();
    p.word_ids = model.vocab.WordIds(p.words);
    for (const std::string& w : p.words) {
      auto it = counts.find(w);
      p.singleton.push_back(it != counts.end() && it->second == 1);
    }
    p.graph = &ex.graph;
    if (supervision == Supervision::kGoldAnchors) {
      p.gold = DecomposeGraph(ex.graph, static_cast<int>(p.words.size()), model.vocab);
      if (!p.gold->Complete()) {
        throw Error(ErrorCode::kUnknownSymbol, "training graph outside the model vocabularies");
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::map<std::string, int> WordCounts(std::span<const CogsExample> examples) {
  std::map<std::string, int> counts;
  for (const CogsExample& ex : examples) {
    for (const Token& t : ex.sentence) ++counts[t.surface];
  }
  return counts;
}

struct LossTotals {
  double tag = 0.0;
  double supertag = 0.0;
  double arc = 0.0;
};

// Gradient of the summed losses of one sentence, accumulated into `grads`.
LossTotals AccumulateSentence(const Model& model, const Prepared& ex, std::uint64_t seed,
                              ParameterSet& grads) {
  std::mt19937_64 rng(seed);
  const ScorerConfig& cfg = model.params.config();
  std::vector<int> ids = ex.word_ids;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ex.singleton[i] && UniformUnit(rng) < cfg.unk_replace_prob) ids[i] = kUnknownWordId;
  }

  GoldDecomposition gold;
  if (ex.gold) {
    gold = *ex.gold;
  } else {
    const SemanticGraph anchored = InduceAnchors(model, ex.words, *ex.graph);
    gold = DecomposeGraph(anchored, static_cast<int>(ex.words.size()), model.vocab);
  }

  const ForwardPass pass = ScorerForward(model.params, ids, ForwardMode::kTrain, &rng);
  MatrixLoss tag = ConceptLoss(pass.tables.lambda, gold.tags);
  SupertagLoss supertag = SupertagNll(pass.tables.phi_minus, pass.tables.phi_plus,
                                      gold.supertags);
  ArcLoss arc = ArcNll(pass.tables.mu, gold.arcs, gold.Active());
  LossTotals totals{tag.value, supertag.value, arc.value};
  if (!std::isfinite(totals.tag + totals.supertag + totals.arc)) {
    throw Error(ErrorCode::kDivergedLoss, "non-finite training loss");
  }
  ScoreTables upstream{std::move(tag.grad), std::move(supertag.grad_minus),
                       std::move(supertag.grad_plus), std::move(arc.grad)};
  grads.Add(ScorerBackward(model.params, pass, upstream));
  return totals;
}

std::vector<int> ShuffledOrder(int count, std::uint64_t seed) {
  std::vector<int> order(count);
  for (int i = 0; i < count; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (int i = count - 1; i > 0; --i) {
    const int j = static_cast<int>(UniformUnit(rng) * (i + 1));
    std::swap(order[i], order[j]);
  }
  return order;
}

// One pass over the data in mini-batches; returns per-sentence mean losses.
LossTotals RunEpoch(Model& model, const std::vector<Prepared>& data, AdamOptimizer& adam,
                    const TrainConfig& config, std::uint64_t epoch_seed) {
  const int count = static_cast<int>(data.size());
  const std::vector<int> order = ShuffledOrder(count, MixSeed(epoch_seed));
  const int batch_size = config.scorer.batch_size;
  std::vector<ParameterSet> worker_grads;
  LossTotals epoch;
  for (int start = 0; start < count; start += batch_size) {
    const int size = std::min(batch_size, count - start);
    const int workers = WorkerCount(size, config.threads);
    if (static_cast<int>(worker_grads.size()) < workers) {
      worker_grads.resize(workers, model.params.ZerosLike());
    }
    for (int w = 0; w < workers; ++w) worker_grads[w].SetZero();
    std::vector<LossTotals> losses(size);
    ParallelFor(size, config.threads, [&](int b, int w) {
      const int idx = order[start + b];
      losses[b] = AccumulateSentence(model, data[idx], MixSeed(epoch_seed ^ MixSeed(idx + 1)),
                                     worker_grads[w]);
    });
    for (int w = 1; w < workers; ++w) worker_grads[0].Add(worker_grads[w]);
    ParameterSet& grad = worker_grads[0];
    for (NamedArray& a : grad.arrays()) {
      for (double& v : a.values) v /= size;
    }
    if (!grad.AllFinite()) throw Error(ErrorCode::kDivergedLoss, "non-finite gradient");
    adam.Step(model.params, grad);
    for (const LossTotals& l : losses) {
      epoch.tag += l.tag;
      epoch.supertag += l.supertag;
      epoch.arc += l.arc;
    }
  }
  if (count > 0) {
    epoch.tag /= count;
    epoch.supertag /= count;
    epoch.arc /= count;
  }
  return epoch;
}

EpochRecord MakeRecord(std::string phase, int epoch, const LossTotals& losses,
                       const SubtaskAccuracy& dev, const ParameterSet& params,
                       std::chrono::steady_clock::time_point start) {
  EpochRecord r;
  r.phase = std::move(phase);
  r.epoch = epoch;
  r.loss_concept = losses.tag;
  r.loss_supertag = losses.supertag;
  r.loss_arc = losses.arc;
  r.dev = dev;
  r.frozen = params.FrozenNames();
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

void Emit(const EpochRecord& r, std::ostream* log) {
  if (log != nullptr) *log << r.ToJson().dump() << '\n' << std::flush;
}

double Ratio(long long good, long long total) {
  return total == 0 ? 1.0 : static_cast<double>(good) / static_cast<double>(total);
}

}  // namespace

void TrainConfig::Validate() const {
  scorer.Validate();
  if (max_epochs < 0) throw Error(ErrorCode::kInvalidConfig, "max_epochs must be >= 0");
  if (finetune_epochs < 0) throw Error(ErrorCode::kInvalidConfig, "finetune_epochs must be >= 0");
  if (threads < 1) throw Error(ErrorCode::kInvalidConfig, "threads must be >= 1");
}

std::vector<bool> GoldDecomposition::Active() const {
  std::vector<bool> active(tags.size());
  for (std::size_t i = 0; i < tags.size(); ++i) active[i] = tags[i] != kEmptyConceptId;
  return active;
}

bool GoldDecomposition::Complete() const {
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (tags[i] == kOutsideVocabulary) return false;
    if (tags[i] != kEmptyConceptId &&
        (supertags.sites[i] == kOutsideVocabulary || supertags.roots[i] == kOutsideVocabulary)) {
      return false;
    }
  }
  for (const LabeledArc& a : arcs) {
    if (a.label == kOutsideVocabulary) return false;
  }
  return true;
}

GoldDecomposition DecomposeGraph(const SemanticGraph& graph, int num_words,
                                 const ModelVocabularies& vocab) {
  GoldDecomposition gold;
  gold.tags.assign(num_words, kEmptyConceptId);
  gold.supertags = SupertagAssignment::Inactive(num_words);
  const auto& vertices = graph.vertices();
  // Labels unknown to the model are interned into a scratch copy so that
  // supertags can still be extracted; they never match the inventory.
  Vocabulary labels = vocab.labels;
  for (const Arc& a : graph.arcs()) labels.Intern(a.label);
  const std::vector<Supertag> supertags = ExtractSupertags(graph, labels);
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    const Vertex& v = vertices[k];
    if (!v.anchor || *v.anchor < 0 || *v.anchor >= num_words) {
      throw Error(ErrorCode::kUnanchoredVertex, "vertex " + std::to_string(v.id));
    }
    const int i = *v.anchor;
    gold.tags[i] = vocab.concepts.Find(v.concept_name).value_or(kOutsideVocabulary);
    gold.supertags.sites[i] =
        vocab.inventory.FindSites(supertags[k].sites).value_or(kOutsideVocabulary);
    gold.supertags.roots[i] =
        vocab.inventory.FindRoots(supertags[k].roots).value_or(kOutsideVocabulary);
  }
  for (const Arc& a : graph.arcs()) {
    const int head = *vertices[graph.IndexOf(a.head)].anchor;
    const int dep = *vertices[graph.IndexOf(a.dep)].anchor;
    gold.arcs.push_back({head, dep, vocab.labels.Find(a.label).value_or(kOutsideVocabulary)});
  }
  std::sort(gold.arcs.begin(), gold.arcs.end());
  return gold;
}

ModelVocabularies BuildVocabularies(std::span<const CogsExample> train) {
  if (train.empty()) throw Error(ErrorCode::kEmptyTrainingSet, "no training examples");
  ModelVocabularies v;
  v.words.Intern(kUnknownWord);
  v.concepts.Intern(kEmptyConcept);
  std::vector<SemanticGraph> graphs;
  graphs.reserve(train.size());
  for (const CogsExample& ex : train) {
    for (const Token& t : ex.sentence) v.words.Intern(t.surface);
    for (const Vertex& vx : ex.graph.vertices()) v.concepts.Intern(vx.concept_name);
    graphs.push_back(ex.graph);
  }
  InternLabels(graphs, v.labels);
  v.inventory = SupertagInventory::Build(graphs, v.labels);
  return v;
}

SemanticGraph AnchorGraph(const SemanticGraph& graph, const Alignment& alignment) {
  SemanticGraph out;
  const auto& vertices = graph.vertices();
  if (alignment.position.size() != vertices.size()) {
    throw Error(ErrorCode::kSizeMismatch, "alignment does not cover the graph");
  }
  std::vector<int> ids(vertices.size());
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    ids[k] = out.AddVertex(vertices[k].concept_name, alignment.position[k]);
  }
  for (const Arc& a : graph.arcs()) {
    out.AddArc(ids[graph.IndexOf(a.head)], ids[graph.IndexOf(a.dep)], a.label);
  }
  return out;
}

SemanticGraph InduceAnchors(const Model& model, std::span<const std::string> words,
                            const SemanticGraph& graph) {
  const int n = static_cast<int>(words.size());
  const std::vector<int> ids = model.vocab.WordIds(words);
  const ForwardPass pass = ScorerForward(model.params, ids, ForwardMode::kEval);
  const AlignmentFactorGraph fg =
      AlignmentFactorGraph::FromGraph(graph, n, model.vocab.concepts, model.vocab.labels);
  return AnchorGraph(graph, MapAlignment(fg, pass.tables.lambda, pass.tables.mu));
}

SubtaskAccuracy EvaluateSubtasks(const Model& model, std::span<const CogsExample> dev,
                                 int threads) {
  struct Counts {
    long long tag = 0, tag_total = 0, site = 0, root = 0, active = 0, arc = 0, arc_total = 0;
  };
  std::vector<Counts> per(dev.size());
  ParallelFor(static_cast<int>(dev.size()), threads, [&](int e, int) {
    const CogsExample& ex = dev[e];
    const std::vector<std::string> words = ex.Words();
    const int n = static_cast<int>(words.size());
    const SemanticGraph graph =
        ex.graph.FullyAnchored() ? ex.graph : InduceAnchors(model, words, ex.graph);
    const GoldDecomposition gold = DecomposeGraph(graph, n, model.vocab);
    const ForwardPass pass =
        ScorerForward(model.params, model.vocab.WordIds(words), ForwardMode::kEval);
    const ScoreTables& t = pass.tables;
    Counts& c = per[e];
    const std::vector<bool> active = gold.Active();
    for (int i = 0; i < n; ++i) {
      ++c.tag_total;
      c.tag += ArgmaxRow(t.lambda.row(i)) == gold.tags[i];
      if (!active[i]) continue;
      ++c.active;
      c.site += ArgmaxRow(t.phi_minus.row(i)) == gold.supertags.sites[i];
      c.root += ArgmaxRow(t.phi_plus.row(i)) == gold.supertags.roots[i];
    }
    std::map<std::pair<int, int>, int> gold_label;
    for (const LabeledArc& a : gold.arcs) gold_label[{a.head, a.dep}] = a.label;
    const int num_labels = t.mu.dim2();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j || !active[i] || !active[j]) continue;
        int best = -1;
        double best_score = 0.0;
        for (int l = 0; l < num_labels; ++l) {
          if (t.mu(i, j, l) > best_score) {
            best = l;
            best_score = t.mu(i, j, l);
          }
        }
        auto it = gold_label.find({i, j});
        const int expected = it == gold_label.end() ? -1 : it->second;
        ++c.arc_total;
        c.arc += best == expected;
      }
    }
  });
  Counts total;
  for (const Counts& c : per) {
    total.tag += c.tag;
    total.tag_total += c.tag_total;
    total.site += c.site;
    total.root += c.root;
    total.active += c.active;
    total.arc += c.arc;
    total.arc_total += c.arc_total;
  }
  return {Ratio(total.tag, total.tag_total), Ratio(total.site, total.active),
          Ratio(total.root, total.active), Ratio(total.arc, total.arc_total)};
}

nlohmann::json EpochRecord::ToJson() const {
  return {{"phase", phase},
          {"epoch", epoch},
          {"losses", {{"concept", loss_concept}, {"supertag", loss_supertag}, {"arc", loss_arc}}},
          {"dev_accuracy", {{"tag", dev.tag}, {"site", dev.site}, {"root", dev.root},
                            {"arc", dev.arc}}},
          {"frozen", frozen},
          {"wall_seconds", wall_seconds}};
}

TrainResult TrainModel(std::span<const CogsExample> train, std::span<const CogsExample> dev,
                       const TrainConfig& config, Supervision supervision, std::ostream* log) {
  config.Validate();
  if (config.early_stopping && dev.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "early stopping needs a development set");
  }
  TrainResult result;
  Model& model = result.model;
  model.vocab = BuildVocabularies(train);
  model.params = ScorerInit(config.scorer, model.vocab.Sizes());
  const std::vector<Prepared> data = Prepare(train, model, WordCounts(train), supervision);
  AdamOptimizer adam(model.params);
  const auto start = std::chrono::steady_clock::now();
  constexpr OutputHead kHeads[] = {OutputHead::kTag, OutputHead::kSite, OutputHead::kRoot,
                                   OutputHead::kArc};
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const LossTotals losses = RunEpoch(model, data, adam, config,
                                       MixSeed(config.scorer.seed) ^ MixSeed(epoch));
    const SubtaskAccuracy acc = dev.empty() ? SubtaskAccuracy{}
                                            : EvaluateSubtasks(model, dev, config.threads);
    if (config.early_stopping) {
      const double per_head[] = {acc.tag, acc.site, acc.root, acc.arc};
      for (int h = 0; h < 4; ++h) {
        const ParamGroup g = HeadGroup(kHeads[h]);
        if (per_head[h] >= 1.0 && !model.params.frozen(g)) {
          model.params.Freeze(ParamGroup::kEncoder);
          model.params.Freeze(g);
        }
      }
    }
    const EpochRecord record = MakeRecord("train", epoch, losses, acc, model.params, start);
    Emit(record, log);
    result.log.push_back(record);
    bool all_frozen = true;
    for (OutputHead h : kHeads) all_frozen = all_frozen && model.params.frozen(HeadGroup(h));
    if (config.early_stopping && all_frozen) {
      result.converged = true;
      break;
    }
  }
  return result;
}

OutputHead ParseOutputHead(std::string_view name) {
  if (name == "tag") return OutputHead::kTag;
  if (name == "site") return OutputHead::kSite;
  if (name == "root") return OutputHead::kRoot;
  if (name == "arc") return OutputHead::kArc;
  throw Error(ErrorCode::kUnknownHead, std::string(name));
}

std::string_view OutputHeadName(OutputHead head) {
  return ParamGroupName(HeadGroup(head));
}

ParamGroup HeadGroup(OutputHead head) {
  switch (head) {
    case OutputHead::kTag: return ParamGroup::kTagHead;
    case OutputHead::kSite: return ParamGroup::kSiteHead;
    case OutputHead::kRoot: return ParamGroup::kRootHead;
    case OutputHead::kArc: return ParamGroup::kArcHead;
  }
  throw Error(ErrorCode::kUnknownHead, "invalid head");
}

std::vector<EpochRecord> OutputFinetune(Model& model, std::span<const CogsExample> train,
                                        std::span<const CogsExample> dev, OutputHead head,
                                        const TrainConfig& config, Supervision supervision,
                                        std::ostream* log) {
  config.Validate();
  std::vector<EpochRecord> records;
  if (config.finetune_epochs == 0) return records;
  if (train.empty()) throw Error(ErrorCode::kEmptyTrainingSet, "no training examples");
  std::array<bool, kNumParamGroups> saved{};
  for (int g = 0; g < kNumParamGroups; ++g) saved[g] = model.params.frozen(static_cast<ParamGroup>(g));
  model.params.FreezeAll();
  model.params.Unfreeze(HeadGroup(head));

  const std::vector<Prepared> data = Prepare(train, model, WordCounts(train), supervision);
  AdamOptimizer adam(model.params);
  const auto start = std::chrono::steady_clock::now();
  const std::string phase = "finetune:" + std::string(OutputHeadName(head));
  const std::uint64_t salt = MixSeed(config.scorer.seed) ^ MixSeed(1000 + static_cast<int>(head));
  for (int epoch = 1; epoch <= config.finetune_epochs; ++epoch) {
    const LossTotals losses = RunEpoch(model, data, adam, config, salt ^ MixSeed(epoch));
    const SubtaskAccuracy acc = dev.empty() ? SubtaskAccuracy{}
                                            : EvaluateSubtasks(model, dev, config.threads);
    records.push_back(MakeRecord(phase, epoch, losses, acc, model.params, start));
    Emit(records.back(), log);
  }
  for (int g = 0; g < kNumParamGroups; ++g) {
    if (saved[g]) {
      model.params.Freeze(static_cast<ParamGroup>(g));
    } else {
      model.params.Unfreeze(static_cast<ParamGroup>(g));
    }
  }
  return records;
}

}  // namespace semtag
