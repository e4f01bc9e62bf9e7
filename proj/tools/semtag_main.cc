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

// semtag command-line interface.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data error,
// 3 internal error.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI/CLI11.hpp>

#include "semtag/corpus.h"
#include "semtag/error.h"
#include "semtag/evaluation.h"
#include "semtag/model.h"
#include "semtag/pipeline.h"
#include "semtag/run_config.h"
#include "semtag/supertag_decoder.h"
#include "semtag/trainer.h"

namespace {

using namespace semtag;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kUnknownHead:
    case ErrorCode::kKTooLarge:
      return kExitUsage;
    case ErrorCode::kMalformedAtom:
    case ErrorCode::kVariableOutOfRange:
    case ErrorCode::kUnanchorableProperName:
    case ErrorCode::kDanglingArgument:
    case ErrorCode::kIoError:
    case ErrorCode::kCorpusParse:
    case ErrorCode::kUnanchoredVertex:
    case ErrorCode::kEmptyTrainingSet:
    case ErrorCode::kEmptySentence:
    case ErrorCode::kCheckpointMismatch:
    case ErrorCode::kLengthMismatch:
    case ErrorCode::kUnknownSymbol:
    case ErrorCode::kTooManyInstances:
      return kExitData;
    default:
      return kExitInternal;
  }
}

// Settings shared by every subcommand: a config file whose keys are
// overridden by explicit flags.
struct Common {
  std::string config_path;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
};

struct Settings {
  TrainConfig train;
  ConfigMap extra;  // non-training keys from the config file

  std::string Get(const std::string& key, const std::string& fallback = "") const {
    auto it = extra.find(key);
    return it == extra.end() ? fallback : it->second;
  }
};

Settings LoadSettings(const Common& common, std::initializer_list<const char*> allowed) {
  Settings s;
  s.train.threads = DefaultThreadCount();
  if (!common.config_path.empty()) {
    s.extra = ApplyTrainConfig(LoadConfigFile(common.config_path), s.train);
    for (const auto& [key, value] : s.extra) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || key == a;
      if (!ok) throw Error(ErrorCode::kInvalidConfig, "unknown config key '" + key + "'");
    }
  }
  if (common.threads) s.train.threads = *common.threads;
  if (common.seed) s.train.scorer.seed = *common.seed;
  s.train.Validate();
  return s;
}

std::string Require(const std::optional<std::string>& flag, const Settings& s,
                    const std::string& key) {
  if (flag) return *flag;
  std::string v = s.Get(key);
  if (v.empty()) throw Error(ErrorCode::kInvalidConfig, "missing --" + key);
  return v;
}

Supervision ParseSupervision(const std::string& name) {
  if (name == "gold") return Supervision::kGoldAnchors;
  if (name == "hard-em") return Supervision::kHardEm;
  throw Error(ErrorCode::kInvalidConfig, "supervision must be gold or hard-em");
}

std::vector<CogsExample> StripAnchors(std::vector<CogsExample> examples) {
  for (CogsExample& ex : examples) ex.graph = ex.graph.WithoutAnchors();
  return examples;
}

void WriteText(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
}

std::vector<std::vector<std::string>> ReadSentences(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  std::vector<std::vector<std::string>> sentences;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string text = line.substr(0, line.find('\t'));
    std::vector<std::string> words;
    for (const Token& t : Tokenize(text)) words.push_back(t.surface);
    if (!words.empty()) sentences.push_back(std::move(words));
  }
  return sentences;
}

std::vector<std::vector<std::string>> SentencesOf(const std::vector<CogsExample>& examples) {
  std::vector<std::vector<std::string>> out;
  out.reserve(examples.size());
  for (const CogsExample& ex : examples) out.push_back(ex.Words());
  return out;
}

std::string TsvLine(const CogsExample& ex) {
  std::string sentence;
  for (const Token& t : ex.sentence) {
    if (!sentence.empty()) sentence += ' ';
    sentence += t.surface;
  }
  return sentence + '\t' + ex.logical_form + '\t' + ex.category;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semantic parsing with supertags and the companionship principle"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "key=value configuration file");
    sub->add_option("--threads", common.threads,
                    std::string("worker threads (default: $") + kThreadsEnvVar + " or 1)");
    sub->add_option("--seed", common.seed, "random seed");
  };

  // train
  std::optional<std::string> train_path, dev_path, checkpoint, log_path, supervision;
  std::optional<int> max_epochs;
  bool no_early_stopping = false;
  bool then_finetune = false;
  CLI::App* train = app.add_subcommand("train", "train a model from a COGS TSV file");
  add_common(train);
  train->add_option("--train", train_path, "training TSV");
  train->add_option("--dev", dev_path, "in-distribution development TSV");
  train->add_option("--checkpoint", checkpoint, "output checkpoint directory");
  train->add_option("--log", log_path, "JSON-lines training log");
  train->add_option("--supervision", supervision, "gold (anchored graphs) or hard-em");
  train->add_option("--max-epochs", max_epochs, "epoch limit");
  train->add_flag("--no-early-stopping", no_early_stopping, "never freeze layers");
  train->add_flag("--finetune", then_finetune, "run output fine-tuning of every head");

  // finetune-heads
  std::optional<std::string> heads_arg, out_checkpoint;
  std::optional<int> finetune_epochs;
  CLI::App* finetune = app.add_subcommand("finetune-heads", "fine-tune output layers");
  add_common(finetune);
  finetune->add_option("--checkpoint", checkpoint, "input checkpoint directory");
  finetune->add_option("--out", out_checkpoint, "output checkpoint (default: overwrite)");
  finetune->add_option("--train", train_path, "training TSV");
  finetune->add_option("--dev", dev_path, "development TSV");
  finetune->add_option("--heads", heads_arg, "comma-separated heads (default tag,site,root,arc)");
  finetune->add_option("--epochs", finetune_epochs, "epochs per head");
  finetune->add_option("--log", log_path, "JSON-lines log");
  finetune->add_option("--supervision", supervision, "gold or hard-em");

  // parse
  std::optional<std::string> input_path, output_path;
  bool no_ilp = false, baseline_arcs = false;
  std::optional<long long> node_budget;
  CLI::App* parse = app.add_subcommand("parse", "parse sentences into semantic graphs");
  add_common(parse);
  parse->add_option("--checkpoint", checkpoint, "checkpoint directory");
  parse->add_option("--input", input_path, "one sentence per line (or a COGS TSV)");
  parse->add_option("--output", output_path, "predictions JSON (default stdout)");
  parse->add_flag("--no-ilp", no_ilp, "independent supertag argmax instead of the ILP");
  parse->add_flag("--baseline-arcs", baseline_arcs, "per-pair arc argmax instead of matching");
  parse->add_option("--ilp-node-budget", node_budget, "branch-and-bound node limit");

  // eval
  std::optional<std::string> predictions_path, gold_path, format;
  CLI::App* eval = app.add_subcommand("eval", "exact-match and supertagging accuracy");
  add_common(eval);
  eval->add_option("--gold", gold_path, "gold COGS TSV");
  eval->add_option("--predictions", predictions_path, "predictions JSON from parse");
  eval->add_option("--checkpoint", checkpoint, "parse the gold sentences with this model");
  eval->add_option("--format", format, "json, tsv or markdown (default markdown)");
  eval->add_option("--output", output_path, "report file (default stdout)");
  eval->add_flag("--no-ilp", no_ilp, "with --checkpoint: skip the ILP");
  eval->add_flag("--baseline-arcs", baseline_arcs, "with --checkpoint: per-pair arcs");
  eval->add_option("--ilp-node-budget", node_budget, "branch-and-bound node limit");

  // reduce-3dm
  int m = 0;
  std::string triples_arg;
  std::string reduce_format = "lp";
  bool solve = false;
  CLI::App* reduce = app.add_subcommand("reduce-3dm", "emit the supertagging instance of a 3DM");
  add_common(reduce);
  reduce->add_option("--m", m, "size of each of the three sets")->required();
  reduce->add_option("--triples", triples_arg, "1-based triples, e.g. 1,1,1;2,2,2")->required();
  reduce->add_option("--format", reduce_format, "lp (CPLEX LP) or json");
  reduce->add_flag("--solve", solve, "also solve the ILP and report whether 3m is reached");
  reduce->add_option("--output", output_path, "output file (default stdout)");

  // dev-sample
  std::optional<std::string> gen_path, dev_out, rest_out;
  std::size_t k = 0;
  CLI::App* dev_sample = app.add_subcommand("dev-sample", "sample a dev split from gen");
  add_common(dev_sample);
  dev_sample->add_option("--gen", gen_path, "generalization TSV")->required();
  dev_sample->add_option("--k", k, "sample size")->required();
  dev_sample->add_option("--dev-out", dev_out, "sampled examples TSV")->required();
  dev_sample->add_option("--rest-out", rest_out, "remaining examples TSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (train->parsed()) {
      Settings s = LoadSettings(common, {"train", "dev", "checkpoint", "log", "supervision"});
      if (max_epochs) s.train.max_epochs = *max_epochs;
      if (no_early_stopping) s.train.early_stopping = false;
      s.train.Validate();
      const Supervision sup = ParseSupervision(supervision.value_or(s.Get("supervision", "gold")));
      std::vector<CogsExample> train_set = LoadCorpusFile(Require(train_path, s, "train"), "train");
      std::vector<CogsExample> dev_set;
      const std::string dev_file = dev_path.value_or(s.Get("dev"));
      if (!dev_file.empty()) dev_set = LoadCorpusFile(dev_file, "dev");
      if (sup == Supervision::kHardEm) train_set = StripAnchors(std::move(train_set));
      const std::string out_dir = Require(checkpoint, s, "checkpoint");
      std::ofstream log_file;
      const std::string log_file_path = log_path.value_or(s.Get("log"));
      if (!log_file_path.empty()) {
        log_file.open(log_file_path);
        if (!log_file) throw Error(ErrorCode::kIoError, "cannot write " + log_file_path);
      }
      std::ostream* log = log_file.is_open() ? &log_file : nullptr;
      TrainResult result = TrainModel(train_set, dev_set, s.train, sup, log);
      if (then_finetune) {
        for (OutputHead h : {OutputHead::kTag, OutputHead::kSite, OutputHead::kRoot,
                             OutputHead::kArc}) {
          OutputFinetune(result.model, train_set, dev_set, h, s.train, sup, log);
        }
      }
      SaveCheckpoint(result.model, out_dir);
      std::cerr << "trained " << result.log.size() << " epochs"
                << (result.converged ? " (all heads converged)" : "") << "; saved " << out_dir
                << '\n';
      return kExitOk;
    }

    if (finetune->parsed()) {
      Settings s = LoadSettings(common, {"train", "dev", "checkpoint", "log", "supervision"});
      if (finetune_epochs) s.train.finetune_epochs = *finetune_epochs;
      s.train.Validate();
      const Supervision sup = ParseSupervision(supervision.value_or(s.Get("supervision", "gold")));
      const std::string in_dir = Require(checkpoint, s, "checkpoint");
      Model model = LoadCheckpoint(in_dir);
      std::vector<CogsExample> train_set = LoadCorpusFile(Require(train_path, s, "train"), "train");
      if (sup == Supervision::kHardEm) train_set = StripAnchors(std::move(train_set));
      std::vector<CogsExample> dev_set;
      const std::string dev_file = dev_path.value_or(s.Get("dev"));
      if (!dev_file.empty()) dev_set = LoadCorpusFile(dev_file, "dev");
      std::vector<OutputHead> heads;
      std::stringstream list(heads_arg.value_or("tag,site,root,arc"));
      for (std::string name; std::getline(list, name, ',');) heads.push_back(ParseOutputHead(name));
      std::ofstream log_file;
      const std::string log_file_path = log_path.value_or(s.Get("log"));
      if (!log_file_path.empty()) log_file.open(log_file_path);
      std::ostream* log = log_file.is_open() ? &log_file : nullptr;
      for (OutputHead h : heads) OutputFinetune(model, train_set, dev_set, h, s.train, sup, log);
      SaveCheckpoint(model, out_checkpoint.value_or(in_dir));
      return kExitOk;
    }

    if (parse->parsed() || eval->parsed()) {
      Settings s = LoadSettings(common, {"checkpoint", "format", "ilp_node_budget"});
      ParseOptions options;
      options.use_ilp = !no_ilp;
      options.baseline_arcs = baseline_arcs;
      options.threads = s.train.threads;
      if (node_budget) {
        options.ilp.node_budget = *node_budget;
      } else if (!s.Get("ilp_node_budget").empty()) {
        options.ilp.node_budget = std::stoll(s.Get("ilp_node_budget"));
      }

      if (parse->parsed()) {
        const Model model = LoadCheckpoint(Require(checkpoint, s, "checkpoint"));
        if (!input_path) throw Error(ErrorCode::kInvalidConfig, "missing --input");
        const auto sentences = ReadSentences(*input_path);
        const auto results = RunParse(model, sentences, options);
        int failures = 0;
        for (std::size_t i = 0; i < results.size(); ++i) {
          if (!results[i].error.empty()) {
            ++failures;
            std::cerr << "sentence " << i + 1 << ": " << results[i].error << '\n';
          } else if (results[i].ilp_fallback) {
            std::cerr << "sentence " << i + 1 << ": ILP failed, used independent supertags\n";
          }
        }
        WriteText(output_path.value_or("-"), PredictionsToJson(results, sentences).dump(1) + "\n");
        if (failures > 0) std::cerr << failures << " sentence(s) could not be parsed\n";
        return kExitOk;
      }

      if (!gold_path) throw Error(ErrorCode::kInvalidConfig, "missing --gold");
      const std::vector<CogsExample> gold = LoadCorpusFile(*gold_path, "gold");
      std::vector<ParseResult> predictions;
      std::optional<double> throughput;
      if (predictions_path) {
        std::ifstream in(*predictions_path);
        if (!in) throw Error(ErrorCode::kIoError, "cannot open " + *predictions_path);
        nlohmann::json j;
        try {
          in >> j;
        } catch (const nlohmann::json::exception& e) {
          throw Error(ErrorCode::kCorpusParse, std::string("predictions: ") + e.what());
        }
        predictions = PredictionsFromJson(j);
      } else {
        const std::string dir = checkpoint.value_or(s.Get("checkpoint"));
        if (dir.empty()) throw Error(ErrorCode::kInvalidConfig, "need --predictions or --checkpoint");
        const Model model = LoadCheckpoint(dir);
        const auto sentences = SentencesOf(gold);
        const auto start = std::chrono::steady_clock::now();
        predictions = RunParse(model, sentences, options);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs > 0.0) throughput = static_cast<double>(sentences.size()) / secs;
      }
      EvalReport report = Evaluate(predictions, gold);
      report.throughput = throughput;
      const ReportFormat fmt = ParseReportFormat(format.value_or(s.Get("format", "markdown")));
      WriteText(output_path.value_or("-"), EmitReport(report, fmt));
      return kExitOk;
    }

    if (reduce->parsed()) {
      LoadSettings(common, {});
      ThreeDimMatchingInstance inst;
      inst.m = m;
      if (m < 1) throw Error(ErrorCode::kInvalidConfig, "--m must be >= 1");
      std::stringstream list(triples_arg);
      for (std::string item; std::getline(list, item, ';');) {
        std::array<int, 3> t{};
        char c1 = 0, c2 = 0;
        std::stringstream one(item);
        if (!(one >> t[0] >> c1 >> t[1] >> c2 >> t[2]) || c1 != ',' || c2 != ',') {
          throw Error(ErrorCode::kInvalidConfig, "bad triple '" + item + "'");
        }
        for (int& v : t) {
          if (v < 1 || v > m) throw Error(ErrorCode::kInvalidConfig, "triple out of range");
          --v;
        }
        inst.triples.push_back(t);
      }
      const SupertaggingInstance st = Reduce3dm(inst);
      std::string text;
      if (reduce_format == "lp") {
        text = WriteCplexLp(BuildSupertagLp(st.phi_minus, st.phi_plus, st.active(), st.inventory),
                            true);
      } else if (reduce_format == "json") {
        nlohmann::json j = {{"concepts", st.concepts},
                            {"inventory", st.inventory.ToJson(st.labels)},
                            {"phi_minus", nlohmann::json::array()},
                            {"phi_plus", nlohmann::json::array()}};
        for (int i = 0; i < st.phi_minus.rows(); ++i) {
          auto rm = st.phi_minus.row(i);
          auto rp = st.phi_plus.row(i);
          j["phi_minus"].push_back(std::vector<double>(rm.begin(), rm.end()));
          j["phi_plus"].push_back(std::vector<double>(rp.begin(), rp.end()));
        }
        text = j.dump(1) + "\n";
      } else {
        throw Error(ErrorCode::kInvalidConfig, "--format must be lp or json");
      }
      WriteText(output_path.value_or("-"), text);
      if (solve) {
        try {
          const IlpResult r =
              DecodeIlp(st.phi_minus, st.phi_plus, st.active(), st.inventory);
          std::cerr << "optimum " << r.objective << " (3m = " << 3 * m << "): "
                    << (r.objective >= 3 * m - 1e-9 ? "matching exists" : "no matching") << '\n';
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kInfeasible) throw;
          std::cerr << "infeasible: no matching\n";
        }
      }
      return kExitOk;
    }

    if (dev_sample->parsed()) {
      Settings s = LoadSettings(common, {});
      const std::vector<CogsExample> gen = LoadCorpusFile(*gen_path, "gen");
      const DevSample split = SampleGenDev(gen, k, s.train.scorer.seed);
      std::ofstream dev_file(*dev_out), rest_file(*rest_out);
      for (const CogsExample& ex : split.dev) dev_file << TsvLine(ex) << '\n';
      for (const CogsExample& ex : split.rest) rest_file << TsvLine(ex) << '\n';
      if (!dev_file || !rest_file) throw Error(ErrorCode::kIoError, "cannot write samples");
      std::cerr << "sampled " << split.dev.size() << " of " << gen.size() << '\n';
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitUsage;
}
