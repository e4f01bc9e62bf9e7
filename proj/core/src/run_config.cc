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

#include "semtag/run_config.h"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <istream>
#include <string_view>

#include "semtag/error.h"

namespace semtag {
namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T ParseNumber(const std::string& key, const std::string& value) {
  T out{};
  const char* begin = value.data();
  const char* end = begin + value.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::kInvalidConfig, key + ": not a number: '" + value + "'");
  }
  return out;
}

bool ParseBool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw Error(ErrorCode::kInvalidConfig, key + ": not a boolean: '" + value + "'");
}

}  // namespace

ConfigMap ParseConfig(std::istream& in) {
  ConfigMap config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = Trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kInvalidConfig,
                  "line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string_view key = Trim(body.substr(0, eq));
    if (key.empty()) {
      throw Error(ErrorCode::kInvalidConfig, "line " + std::to_string(line_no) + ": empty key");
    }
    config[std::string(key)] = std::string(Trim(body.substr(eq + 1)));
  }
  return config;
}

ConfigMap LoadConfigFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return ParseConfig(in);
}

ConfigMap ApplyTrainConfig(const ConfigMap& config, TrainConfig& train) {
  using Setter = std::function<void(const std::string&, const std::string&)>;
  ScorerConfig& s = train.scorer;
  const std::map<std::string, Setter> setters = {
      {"embed_dim", [&](auto& k, auto& v) { s.embed_dim = ParseNumber<int>(k, v); }},
      {"lstm_hidden", [&](auto& k, auto& v) { s.lstm_hidden = ParseNumber<int>(k, v); }},
      {"tag_mlp_dim", [&](auto& k, auto& v) { s.tag_mlp_dim = ParseNumber<int>(k, v); }},
      {"supertag_mlp_dim",
       [&](auto& k, auto& v) { s.supertag_mlp_dim = ParseNumber<int>(k, v); }},
      {"arc_mlp_dim", [&](auto& k, auto& v) { s.arc_mlp_dim = ParseNumber<int>(k, v); }},
      {"dropout", [&](auto& k, auto& v) { s.dropout = ParseNumber<double>(k, v); }},
      {"learning_rate", [&](auto& k, auto& v) { s.learning_rate = ParseNumber<double>(k, v); }},
      {"batch_size", [&](auto& k, auto& v) { s.batch_size = ParseNumber<int>(k, v); }},
      {"seed", [&](auto& k, auto& v) { s.seed = ParseNumber<std::uint64_t>(k, v); }},
      {"adam_beta1", [&](auto& k, auto& v) { s.adam_beta1 = ParseNumber<double>(k, v); }},
      {"adam_beta2", [&](auto& k, auto& v) { s.adam_beta2 = ParseNumber<double>(k, v); }},
      {"adam_epsilon", [&](auto& k, auto& v) { s.adam_epsilon = ParseNumber<double>(k, v); }},
      {"unk_replace_prob",
       [&](auto& k, auto& v) { s.unk_replace_prob = ParseNumber<double>(k, v); }},
      {"max_epochs", [&](auto& k, auto& v) { train.max_epochs = ParseNumber<int>(k, v); }},
      {"early_stopping", [&](auto& k, auto& v) { train.early_stopping = ParseBool(k, v); }},
      {"finetune_epochs",
       [&](auto& k, auto& v) { train.finetune_epochs = ParseNumber<int>(k, v); }},
      {"threads", [&](auto& k, auto& v) { train.threads = ParseNumber<int>(k, v); }},
  };
  ConfigMap rest;
  for (const auto& [key, value] : config) {
    auto it = setters.find(key);
    if (it == setters.end()) {
      rest.emplace(key, value);
    } else {
      it->second(key, value);
    }
  }
  return rest;
}

int DefaultThreadCount() {
  const char* env = std::getenv(kThreadsEnvVar);
  if (env == nullptr) return 1;
  const std::string_view s(env);
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || value < 1) return 1;
  return value;
}

}  // namespace semtag
