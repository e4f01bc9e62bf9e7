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

// Acceptance checks. Prints one PASS, FAIL or SKIP line per criterion and
// exits nonzero when any criterion fails.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "oracles.h"
#include "semtag/alignment.h"
#include "semtag/argument_matcher.h"
#include "semtag/assignment.h"
#include "semtag/error.h"
#include "semtag/evaluation.h"
#include "semtag/losses.h"
#include "semtag/pipeline.h"
#include "semtag/run_config.h"
#include "semtag/scorer.h"
#include "semtag/supertag_decoder.h"
#include "semtag/trainer.h"

namespace semtag {
namespace {

namespace fs = std::filesystem;

enum class Verdict { kPass, kFail, kSkip };

struct Outcome {
  Verdict verdict;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string Format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

const std::string kData = SEMTAG_DATA_DIR;

std::optional<fs::path> CogsDir() {
  const char* dir = std::getenv("COGS_DIR");
  if (dir == nullptr || *dir == '\0') return std::nullopt;
  return fs::path(dir);
}

// 1. Supertagging ILP against exhaustive enumeration.
Outcome IlpOracle() {
  const auto start = Clock::now();
  std::mt19937_64 rng(101);
  int mismatches = 0, infeasible = 0, feasible = 0;
  // Infeasible draws are checked too but do not count toward the 200.
  while (feasible < 200) {
    const int num_labels = std::uniform_int_distribution<int>(1, 3)(rng);
    const SupertagInventory inv = oracle::RandomInventory(rng, num_labels, 4);
    const int n = std::uniform_int_distribution<int>(1, 6)(rng);
    const Matrix pm = oracle::RandomMatrix(rng, n, inv.num_sites(), -1, 1);
    const Matrix pp = oracle::RandomMatrix(rng, n, inv.num_roots(), -1, 1);
    std::vector<bool> active;
    std::bernoulli_distribution on(0.85);
    for (int i = 0; i < n; ++i) active.push_back(on(rng));
    const oracle::CountTables counts = oracle::CountsOf(inv, num_labels);
    const oracle::SupertaggingOptimum expected =
        oracle::EnumerateSupertagging(pm, pp, active, counts);
    feasible += expected.feasible;
    try {
      const IlpResult r = DecodeIlp(pm, pp, active, inv);
      const bool ok = expected.feasible && std::abs(r.objective - expected.objective) <= 1e-9 &&
                      oracle::AssignmentIsValid(r.assignment, active, counts) &&
                      std::abs(oracle::AssignmentObjective(r.assignment, pm, pp) - r.objective) <=
                          1e-9;
      mismatches += !ok;
    } catch (const Error& e) {
      ++infeasible;
      mismatches += expected.feasible || e.code() != ErrorCode::kInfeasible;
    }
  }
  const double secs = SecondsSince(start);
  return {mismatches == 0 && secs < 30 ? Verdict::kPass : Verdict::kFail,
          Format("200 feasible instances, %d mismatches (plus %d infeasible draws), %.2fs",
                 mismatches, infeasible, secs)};
}

// 2. The 3DM reduction reaches 3m exactly when a perfect matching exists.
Outcome ThreeDimMatching() {
  int checked = 0, disagreements = 0;
  auto check = [&](const ThreeDimMatchingInstance& inst) {
    bool reaches = false;
    try {
      const SupertaggingInstance red = Reduce3dm(inst);
      IlpOptions options;
      options.node_budget = 10'000'000;
      const IlpResult r =
          DecodeIlp(red.phi_minus, red.phi_plus, red.active(), red.inventory, options);
      reaches = std::abs(r.objective - 3 * inst.m) <= 1e-9;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kInfeasible) ++disagreements;
    }
    ++checked;
    disagreements += reaches != oracle::HasPerfect3dm(inst.m, inst.triples);
  };
  std::vector<std::array<int, 3>> all;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int c = 0; c < 2; ++c) all.push_back({a, b, c});
    }
  }
  for (int mask = 0; mask < 256; ++mask) {
    if (std::popcount(static_cast<unsigned>(mask)) > 4) continue;
    ThreeDimMatchingInstance inst{2, {}};
    for (int t = 0; t < 8; ++t) {
      if (mask >> t & 1) inst.triples.push_back(all[t]);
    }
    check(inst);
  }
  const int exhaustive = checked;
  std::mt19937_64 rng(202);
  int positives = 0;
  for (int trial = 0; trial < 200; ++trial) {
    ThreeDimMatchingInstance inst;
    inst.m = std::uniform_int_distribution<int>(1, 4)(rng);
    std::uniform_int_distribution<int> coord(0, inst.m - 1);
    if (trial % 2 == 0) {
      // Plant a perfect matching.
      std::vector<int> b(inst.m), c(inst.m);
      std::iota(b.begin(), b.end(), 0);
      std::iota(c.begin(), c.end(), 0);
      std::shuffle(b.begin(), b.end(), rng);
      std::shuffle(c.begin(), c.end(), rng);
      for (int a = 0; a < inst.m; ++a) inst.triples.push_back({a, b[a], c[a]});
    }
    const int extra = std::uniform_int_distribution<int>(0, 2 * inst.m)(rng);
    for (int t = 0; t < extra; ++t) inst.triples.push_back({coord(rng), coord(rng), coord(rng)});
    std::sort(inst.triples.begin(), inst.triples.end());
    inst.triples.erase(std::unique(inst.triples.begin(), inst.triples.end()), inst.triples.end());
    std::shuffle(inst.triples.begin(), inst.triples.end(), rng);
    positives += oracle::HasPerfect3dm(inst.m, inst.triples);
    check(inst);
  }
  return {disagreements == 0 ? Verdict::kPass : Verdict::kFail,
          Format("%d exhaustive subsets of [2]^3 + 200 random (%d with a matching), "
                 "%d disagreements",
                 exhaustive, positives, disagreements)};
}

// 3. Assignment and per-label matching against permutation search.
Outcome MatchingOracle() {
  std::mt19937_64 rng(303);
  int mismatches = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int k = std::uniform_int_distribution<int>(1, 6)(rng);
    std::uniform_int_distribution<int> w(-50, 50);
    std::vector<std::vector<double>> weights(k, std::vector<double>(k));
    Matrix m(k, k);
    for (int r = 0; r < k; ++r) {
      for (int c = 0; c < k; ++c) m(r, c) = weights[r][c] = w(rng);
    }
    mismatches += SolveMaxAssignment(m).weight != oracle::EnumerateAssignment(weights);

    // The same weights routed through a label group on 2k words.
    Tensor3 mu(2 * k, 2 * k, 1);
    LabelSlotGroup group;
    for (int i = 0; i < k; ++i) {
      group.site_positions.push_back(i);
      group.root_positions.push_back(k + i);
    }
    for (int r = 0; r < k; ++r) {
      for (int c = 0; c < k; ++c) mu(r, k + c, 0) = weights[r][c];
    }
    double got = 0;
    for (const auto& [site, root] : MatchLabel(group, mu)) got += mu(site, root, 0);
    mismatches += got != oracle::EnumerateAssignment(weights);
  }
  return {mismatches == 0 ? Verdict::kPass : Verdict::kFail,
          Format("500 instances (k <= 6), %d mismatches", mismatches)};
}

// 4. Alignment MAP against injective-map enumeration.
Outcome AlignmentOracle() {
  std::mt19937_64 rng(404);
  auto dyadic = [&]() { return std::uniform_int_distribution<int>(-64, 64)(rng) / 16.0; };
  int mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 7)(rng);
    const int k = std::uniform_int_distribution<int>(1, std::min(n, 5))(rng);
    const int t = std::uniform_int_distribution<int>(2, 4)(rng);
    const int l = std::uniform_int_distribution<int>(1, 3)(rng);
    AlignmentFactorGraph fg;
    fg.num_words = n;
    std::vector<oracle::FactorBinary> binaries;
    for (int v = 0; v < k; ++v) fg.concepts.push_back(std::uniform_int_distribution<int>(1, t - 1)(rng));
    std::bernoulli_distribution edge(0.4);
    for (int h = 0; h < k; ++h) {
      for (int d = 0; d < k; ++d) {
        if (h == d || !edge(rng)) continue;
        const int label = std::uniform_int_distribution<int>(0, l - 1)(rng);
        fg.binaries.push_back({h, d, label});
        binaries.push_back({h, d, label});
      }
    }
    Matrix lambda(n, t);
    for (int i = 0; i < n; ++i) {
      for (int c = 1; c < t; ++c) lambda(i, c) = dyadic();
    }
    Tensor3 mu(n, n, l);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int c = 0; c < l; ++c) mu(i, j, c) = i == j ? 0.0 : dyadic();
      }
    }
    const double expected = oracle::EnumerateAlignment(n, fg.concepts, binaries, lambda, mu);
    for (bool force : {false, true}) {
      AlignmentOptions options;
      options.force_branch_and_bound = force;
      mismatches += MapAlignment(fg, lambda, mu, options).objective != expected;
    }
  }
  return {mismatches == 0 ? Verdict::kPass : Verdict::kFail,
          Format("200 graphs, enumeration and branch-and-bound, %d mismatches", mismatches)};
}

// 5. Finite-difference gradient checks.
Outcome GradientChecks() {
  constexpr int kTrials = 100;
  std::mt19937_64 rng(505);
  double worst_concept = 0, worst_supertag = 0, worst_arc = 0, worst_net = 0;
  std::uniform_real_distribution<double> u(-2, 2);
  for (int trial = 0; trial < kTrials; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 6)(rng);
    const int t = 4, s = 3, r = 3, l = 2;
    Matrix lambda = oracle::RandomMatrix(rng, n, t, -2, 2);
    for (int i = 0; i < n; ++i) lambda(i, 0) = 0;
    Matrix pm = oracle::RandomMatrix(rng, n, s, -2, 2);
    Matrix pp = oracle::RandomMatrix(rng, n, r, -2, 2);
    Tensor3 mu(n, n, l);
    for (double& v : mu.data()) v = u(rng);
    std::vector<int> tags(n);
    std::vector<bool> active(n);
    SupertagAssignment gold = SupertagAssignment::Inactive(n);
    for (int i = 0; i < n; ++i) {
      tags[i] = std::uniform_int_distribution<int>(0, t - 1)(rng);
      active[i] = tags[i] != 0;
      if (active[i]) {
        gold.sites[i] = std::uniform_int_distribution<int>(0, s - 1)(rng);
        gold.roots[i] = std::uniform_int_distribution<int>(0, r - 1)(rng);
      }
    }
    ArcSet arcs;
    std::bernoulli_distribution on(0.5);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i != j && active[i] && active[j] && on(rng)) {
          arcs.push_back({i, j, std::uniform_int_distribution<int>(0, l - 1)(rng)});
        }
      }
    }
    const int i = std::uniform_int_distribution<int>(0, n - 1)(rng);
    const int j = std::uniform_int_distribution<int>(0, n - 1)(rng);
    constexpr double h = 1e-3;
    {
      const int c = std::uniform_int_distribution<int>(0, t - 1)(rng);
      const double g = ConceptLoss(lambda, tags).grad(i, c);
      const double x0 = lambda(i, c);
      const double fd = oracle::CentralDifference(
          [&](double x) { lambda(i, c) = x; return ConceptLoss(lambda, tags).value; }, x0, h);
      lambda(i, c) = x0;
      worst_concept = std::max(worst_concept, oracle::RelativeError(g, fd));
    }
    {
      const int c = std::uniform_int_distribution<int>(0, s - 1)(rng);
      const double g = SupertagNll(pm, pp, gold).grad_minus(i, c);
      const double x0 = pm(i, c);
      const double fd = oracle::CentralDifference(
          [&](double x) { pm(i, c) = x; return SupertagNll(pm, pp, gold).value; }, x0, h);
      pm(i, c) = x0;
      const int c2 = std::uniform_int_distribution<int>(0, r - 1)(rng);
      const double g2 = SupertagNll(pm, pp, gold).grad_plus(j, c2);
      const double y0 = pp(j, c2);
      const double fd2 = oracle::CentralDifference(
          [&](double x) { pp(j, c2) = x; return SupertagNll(pm, pp, gold).value; }, y0, h);
      pp(j, c2) = y0;
      worst_supertag = std::max({worst_supertag, oracle::RelativeError(g, fd),
                                 oracle::RelativeError(g2, fd2)});
    }
    {
      const int c = std::uniform_int_distribution<int>(0, l - 1)(rng);
      const double g = ArcNll(mu, arcs, active).grad(i, j, c);
      const double x0 = mu(i, j, c);
      const double fd = oracle::CentralDifference(
          [&](double x) { mu(i, j, c) = x; return ArcNll(mu, arcs, active).value; }, x0, h);
      mu(i, j, c) = x0;
      worst_arc = std::max(worst_arc, oracle::RelativeError(g, fd));
    }
  }

  // End to end: the losses on top of the scorer in training mode.
  ScorerConfig config;
  config.embed_dim = 5;
  config.lstm_hidden = 4;
  config.tag_mlp_dim = config.supertag_mlp_dim = config.arc_mlp_dim = 4;
  config.dropout = 0.2;
  const ModelSizes sizes{6, 4, 3, 3, 2};
  ParameterSet params = ScorerInit(config, sizes);
  for (int trial = 0; trial < kTrials; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 5)(rng);
    std::vector<int> words(n), tags(n);
    std::vector<bool> active(n);
    SupertagAssignment gold = SupertagAssignment::Inactive(n);
    for (int i = 0; i < n; ++i) {
      words[i] = std::uniform_int_distribution<int>(0, sizes.vocab - 1)(rng);
      tags[i] = std::uniform_int_distribution<int>(0, sizes.concepts - 1)(rng);
      active[i] = tags[i] != 0;
      if (active[i]) {
        gold.sites[i] = std::uniform_int_distribution<int>(0, sizes.sites - 1)(rng);
        gold.roots[i] = std::uniform_int_distribution<int>(0, sizes.roots - 1)(rng);
      }
    }
    ArcSet arcs;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i != j && active[i] && active[j] && rng() % 2) arcs.push_back({i, j, 0});
      }
    }
    const std::uint64_t drop_seed = rng();
    auto total = [&](ScoreTables* upstream) {
      std::mt19937_64 drop(drop_seed);
      const ForwardPass pass = ScorerForward(params, words, ForwardMode::kTrain, &drop);
      const auto c = ConceptLoss(pass.tables.lambda, tags);
      const auto s = SupertagNll(pass.tables.phi_minus, pass.tables.phi_plus, gold);
      const auto a = ArcNll(pass.tables.mu, arcs, active);
      if (upstream != nullptr) *upstream = {c.grad, s.grad_minus, s.grad_plus, a.grad};
      return c.value + s.value + a.value;
    };
    ScoreTables upstream;
    total(&upstream);
    std::mt19937_64 drop(drop_seed);
    const ParameterSet grad = ScorerBackward(
        params, ScorerForward(params, words, ForwardMode::kTrain, &drop), upstream);
    const std::size_t k =
        std::uniform_int_distribution<std::size_t>(0, params.TotalSize() - 1)(rng);
    const double x0 = params.Scalar(k);
    const double fd = oracle::CentralDifference(
        [&](double x) { params.Scalar(k) = x; return total(nullptr); }, x0, 1e-5);
    params.Scalar(k) = x0;
    worst_net = std::max(worst_net, oracle::RelativeError(grad.Scalar(k), fd));
  }
  const bool ok = worst_concept <= 1e-8 && worst_supertag <= 1e-8 && worst_arc <= 1e-8 &&
                  worst_net <= 1e-4;
  return {ok ? Verdict::kPass : Verdict::kFail,
          Format("%d trials each; max rel err concept %.1e, supertag %.1e, arc %.1e, "
                 "network %.1e",
                 kTrials, worst_concept, worst_supertag, worst_arc, worst_net)};
}

// Score tables that put the gold decomposition on top, with the oracle arc
// scores set to 1 on gold arcs and 0 elsewhere.
ScoreTables OracleTables(const GoldDecomposition& gold, const ModelSizes& sizes) {
  const int n = static_cast<int>(gold.tags.size());
  ScoreTables t = ScoreTables::Zeros(n, sizes);
  for (int i = 0; i < n; ++i) {
    for (int c = 1; c < sizes.concepts; ++c) t.lambda(i, c) = c == gold.tags[i] ? 1.0 : -1.0;
    if (gold.supertags.active(i)) {
      t.phi_minus(i, gold.supertags.sites[i]) = 1.0;
      t.phi_plus(i, gold.supertags.roots[i]) = 1.0;
    }
  }
  for (const LabeledArc& a : gold.arcs) t.mu(a.head, a.dep, a.label) = 1.0;
  return t;
}

// 6. Gold supertags plus oracle arc scores rebuild every gold graph.
Outcome RoundTrip() {
  std::vector<std::pair<std::string, fs::path>> corpora = {
      {"cogs_sample", kData + "/cogs_sample/train.tsv"},
      {"toy", kData + "/toy/train.tsv"},
      {"toy_dev", kData + "/toy/dev.tsv"},
      {"toy_heldout", kData + "/toy/heldout.tsv"}};
  if (const auto dir = CogsDir()) corpora.push_back({"cogs_train", *dir / "train.tsv"});
  std::string detail;
  bool ok = true;
  for (const auto& [name, path] : corpora) {
    std::vector<CogsExample> examples;
    try {
      examples = LoadCorpusFile(path, name);
    } catch (const Error& e) {
      detail += name + ": " + e.what() + "; ";
      ok = false;
      continue;
    }
    const ModelVocabularies vocab = BuildVocabularies(examples);
    long long same = 0;
    for (const CogsExample& ex : examples) {
      const int n = static_cast<int>(ex.sentence.size());
      const GoldDecomposition gold = DecomposeGraph(ex.graph, n, vocab);
      ParseOptions options;
      const ParseResult r = DecodeScores(OracleTables(gold, vocab.Sizes()), vocab, options);
      same += gold.Complete() && GraphsEqual(r.graph, ex.graph);
    }
    ok = ok && same == static_cast<long long>(examples.size());
    detail += Format("%s %lld/%zu; ", name.c_str(), same, examples.size());
  }
  if (!CogsDir()) detail += "COGS_DIR unset, full training set not checked";
  return {ok ? Verdict::kPass : Verdict::kFail, detail};
}

TrainConfig ToyConfig() {
  TrainConfig config;
  const ConfigMap rest = ApplyTrainConfig(LoadConfigFile(kData + "/toy/toy.conf"), config);
  if (!rest.empty()) throw Error(ErrorCode::kInvalidConfig, "unknown key " + rest.begin()->first);
  config.threads = 1;
  config.Validate();
  return config;
}

Model TrainAndFinetune(std::span<const CogsExample> train, std::span<const CogsExample> dev,
                       const TrainConfig& config, TrainResult* out) {
  TrainResult r = TrainModel(train, dev, config, Supervision::kGoldAnchors);
  for (OutputHead h : {OutputHead::kTag, OutputHead::kSite, OutputHead::kRoot, OutputHead::kArc}) {
    OutputFinetune(r.model, train, dev, h, config, Supervision::kGoldAnchors);
  }
  Model model = std::move(r.model);
  if (out != nullptr) {
    out->log = std::move(r.log);
    out->converged = r.converged;
  }
  return model;
}

std::vector<std::vector<std::string>> Sentences(std::span<const CogsExample> examples) {
  std::vector<std::vector<std::string>> out;
  for (const CogsExample& ex : examples) out.push_back(ex.Words());
  return out;
}

// 7. Toy grammar: held-out recombinations after training with early stopping.
Outcome ToyGeneralization(Model* trained) {
  const std::clock_t cpu_start = std::clock();
  const auto start = Clock::now();
  const auto train = LoadCorpusFile(kData + "/toy/train.tsv", "train");
  const auto dev = LoadCorpusFile(kData + "/toy/dev.tsv", "dev");
  const auto heldout = LoadCorpusFile(kData + "/toy/heldout.tsv", "heldout");
  const TrainConfig config = ToyConfig();
  TrainResult info;
  *trained = TrainAndFinetune(train, dev, config, &info);
  const auto sentences = Sentences(heldout);
  const EvalReport report = Evaluate(RunParse(*trained, sentences, ParseOptions{}), heldout);
  const double cpu = static_cast<double>(std::clock() - cpu_start) / CLOCKS_PER_SEC;
  const double wall = SecondsSince(start);
  const double exact = report.overall.Percent().value_or(0.0);
  const bool ok = report.overall.correct == report.overall.total && report.overall.total > 0 &&
                  cpu < 300.0;
  return {ok ? Verdict::kPass : Verdict::kFail,
          Format("held-out exact match %.1f%% (%lld/%lld; lexical %s, PP recursion %s), "
                 "seed %llu, %zu epochs%s + %d finetune epochs/head, %.1fs CPU, %.1fs wall",
                 exact, report.overall.correct, report.overall.total,
                 report.lexical.Percent() ? Format("%.1f%%", *report.lexical.Percent()).c_str()
                                          : "n/a",
                 report.pp_recursion.Percent()
                     ? Format("%.1f%%", *report.pp_recursion.Percent()).c_str()
                     : "n/a",
                 static_cast<unsigned long long>(config.scorer.seed), info.log.size(),
                 info.converged ? " (early stop)" : "", config.finetune_epochs, cpu, wall)};
}

// 8. Full COGS numbers, three seeds.
Outcome CogsReproduction() {
  const auto dir = CogsDir();
  const char* flag = std::getenv("SEMTAG_RUN_EXTENDED");
  if (!dir || flag == nullptr || std::string(flag) != "1") {
    return {Verdict::kSkip, "needs COGS_DIR and SEMTAG_RUN_EXTENDED=1 (hours of training)"};
  }
  const auto train = LoadCorpusFile(*dir / "train.tsv", "train");
  const auto dev = LoadCorpusFile(*dir / "dev.tsv", "dev");
  const auto gen = LoadCorpusFile(*dir / "gen.tsv", "gen");
  const auto sentences = Sentences(gen);
  std::vector<CogsExample> obj_pp;
  std::vector<std::size_t> obj_pp_index;
  for (std::size_t s = 0; s < gen.size(); ++s) {
    if (ClassifyCategory(gen[s].category) == CategoryGroup::kObjToSubjPP) {
      obj_pp.push_back(gen[s]);
      obj_pp_index.push_back(s);
    }
  }
  double overall = 0, lexical = 0, obj = 0, pp = 0, cp = 0, st_ilp = 0, st_no_ilp = 0;
  constexpr int kRuns = 3;
  for (int run = 1; run <= kRuns; ++run) {
    TrainConfig config;
    config.scorer.seed = run;
    config.threads = DefaultThreadCount();
    const Model model = TrainAndFinetune(train, dev, config, nullptr);
    ParseOptions options;
    options.threads = config.threads;
    const std::vector<ParseResult> pred = RunParse(model, sentences, options);
    const EvalReport r = Evaluate(pred, gen);
    overall += r.overall.Percent().value_or(0) / kRuns;
    lexical += r.lexical.Percent().value_or(0) / kRuns;
    obj += r.obj_to_subj_pp.Percent().value_or(0) / kRuns;
    pp += r.pp_recursion.Percent().value_or(0) / kRuns;
    cp += r.cp_recursion.Percent().value_or(0) / kRuns;
    std::vector<ParseResult> sub;
    for (std::size_t s : obj_pp_index) sub.push_back(pred[s]);
    const EvalReport rs = Evaluate(sub, obj_pp);
    st_ilp += rs.supertag_sentence_ilp.Percent().value_or(0) / kRuns;
    st_no_ilp += rs.supertag_sentence_no_ilp.Percent().value_or(0) / kRuns;
  }
  const bool ok = std::abs(overall - 98.1) <= 2.0 && std::abs(obj - 75.0) <= 10.0 &&
                  st_ilp > st_no_ilp + 30.0;
  return {ok ? Verdict::kPass : Verdict::kFail,
          Format("3-run mean: overall %.1f, lexical %.1f, obj-to-subj PP %.1f, PP rec %.1f, "
                 "CP rec %.1f; obj-to-subj PP sentence supertagging ILP %.1f vs no ILP %.1f",
                 overall, lexical, obj, pp, cp, st_ilp, st_no_ilp)};
}

// 9. Single-threaded ILP decode throughput.
Outcome Throughput(const Model& toy_model) {
  std::vector<ScoreTables> tables;
  ModelVocabularies vocab;
  std::string source;
  if (const auto dir = CogsDir(); dir && fs::exists(*dir / "gen.tsv")) {
    // Full COGS inventory with untrained scores: a harder search than a fitted model.
    const auto train = LoadCorpusFile(*dir / "train.tsv", "train");
    const auto gen = LoadCorpusFile(*dir / "gen.tsv", "gen");
    vocab = BuildVocabularies(train);
    const ParameterSet params = ScorerInit(ScorerConfig{}, vocab.Sizes());
    for (std::size_t s = 0; s < gen.size() && s < 2000; ++s) {
      tables.push_back(
          ScorerForward(params, vocab.WordIds(gen[s].Words()), ForwardMode::kEval).tables);
    }
    source = "COGS gen sentences, COGS inventory, untrained scorer";
  } else {
    vocab = toy_model.vocab;
    std::vector<CogsExample> inputs = LoadCorpusFile(kData + "/cogs_sample/train.tsv", "sample");
    for (const char* f : {"/toy/dev.tsv", "/toy/heldout.tsv"}) {
      const auto more = LoadCorpusFile(kData + f, "toy");
      inputs.insert(inputs.end(), more.begin(), more.end());
    }
    for (const CogsExample& ex : inputs) {
      tables.push_back(ScorerForward(toy_model.params, vocab.WordIds(ex.Words()),
                                     ForwardMode::kEval)
                           .tables);
    }
    source = "COGS sample + toy sentences, toy model (COGS_DIR unset)";
  }
  double words = 0;
  for (const ScoreTables& t : tables) words += t.length();
  auto rate = [&](const IlpOptions& options) {
    long long decoded = 0;
    const auto start = Clock::now();
    while (SecondsSince(start) < 1.0) {
      for (const ScoreTables& t : tables) {
        std::vector<bool> active(t.length());
        for (int i = 0; i < t.length(); ++i) {
          const auto row = t.lambda.row(i);
          active[i] = std::max_element(row.begin(), row.end()) != row.begin();
        }
        try {
          DecodeIlp(t.phi_minus, t.phi_plus, active, vocab.inventory, options);
        } catch (const Error&) {
        }
        ++decoded;
      }
    }
    return decoded / SecondsSince(start);
  };
  IlpOptions forced;
  forced.unconstrained_shortcut = false;
  const double standard = rate(IlpOptions{});
  const double branch_and_bound = rate(forced);
  return {standard >= 100.0 ? Verdict::kPass : Verdict::kFail,
          Format("%.0f sentences/s single-threaded (%.0f with branch-and-bound forced); "
                 "mean length %.1f; %s",
                 standard, branch_and_bound, words / tables.size(), source.c_str())};
}

void Report(int id, const char* name, const Outcome& o, int& failures) {
  const char* tag = o.verdict == Verdict::kPass ? "PASS" : o.verdict == Verdict::kFail ? "FAIL"
                                                                                       : "SKIP";
  if (o.verdict == Verdict::kFail) ++failures;
  std::printf("%s %d %s: %s\n", tag, id, name, o.detail.c_str());
  std::fflush(stdout);
}

Outcome Guard(const std::function<Outcome()>& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    return {Verdict::kFail, std::string("exception: ") + e.what()};
  }
}

}  // namespace
}  // namespace semtag

int main() {
  using namespace semtag;
  int failures = 0;
  Report(1, "ilp-oracle", Guard(IlpOracle), failures);
  Report(2, "3dm-reduction", Guard(ThreeDimMatching), failures);
  Report(3, "matching-oracle", Guard(MatchingOracle), failures);
  Report(4, "alignment-map", Guard(AlignmentOracle), failures);
  Report(5, "gradient-checks", Guard(GradientChecks), failures);
  Report(6, "round-trip", Guard(RoundTrip), failures);
  Model toy;
  bool have_toy = false;
  Report(7, "toy-generalization", Guard([&] {
           Outcome o = ToyGeneralization(&toy);
           have_toy = true;
           return o;
         }),
         failures);
  Report(8, "cogs-reproduction", Guard(CogsReproduction), failures);
  Report(9, "ilp-throughput", Guard([&] {
           if (!have_toy) return Outcome{Verdict::kFail, "no toy model to score inputs"};
           return Throughput(toy);
         }),
         failures);
  return failures == 0 ? 0 : 1;
}
