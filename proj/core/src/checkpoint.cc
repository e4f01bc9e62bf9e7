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

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "semtag/error.h"
#include "semtag/model.h"

namespace semtag {
namespace {

constexpr char kMagic[8] = {'S', 'E', 'M', 'T', 'A', 'G', 'P', '1'};
constexpr std::string_view kFormat = "semtag-checkpoint";

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

Vocabulary VocabFromJson(const nlohmann::json& j) {
  return Vocabulary(j.get<std::vector<std::string>>());
}

}  // namespace

ModelSizes ModelVocabularies::Sizes() const {
  return {words.size(), concepts.size(), inventory.num_sites(), inventory.num_roots(),
          labels.size()};
}

std::vector<int> ModelVocabularies::WordIds(std::span<const std::string> ws) const {
  std::vector<int> ids;
  ids.reserve(ws.size());
  for (const std::string& w : ws) ids.push_back(words.Find(w).value_or(kUnknownWordId));
  return ids;
}

void SaveCheckpoint(const Model& model, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir.string());

  nlohmann::json arrays = nlohmann::json::array();
  std::uint64_t offset = 0;
  for (const NamedArray& a : model.params.arrays()) {
    arrays.push_back({{"name", a.name},
                      {"group", ParamGroupName(a.group)},
                      {"rows", a.rows},
                      {"cols", a.cols},
                      {"offset", offset}});
    offset += a.size();
  }
  const nlohmann::json manifest = {
      {"format", kFormat},
      {"version", kCheckpointVersion},
      {"config", model.params.config().ToJson()},
      {"vocab",
       {{"words", model.vocab.words.symbols()},
        {"concepts", model.vocab.concepts.symbols()},
        {"labels", model.vocab.labels.symbols()}}},
      {"inventory", model.vocab.inventory.ToJson(model.vocab.labels)},
      {"arrays", arrays}};
  {
    std::ofstream out(dir / "manifest.json");
    out << manifest.dump(1) << '\n';
    if (!out) throw Error(ErrorCode::kIoError, "cannot write manifest.json");
  }
  std::ofstream out(dir / "params.bin", std::ios::binary);
  out.write(kMagic, sizeof(kMagic));
  const std::uint64_t count = model.params.arrays().size();
  out.write(reinterpret_cast<const char*>(&count), sizeof(count));
  for (const NamedArray& a : model.params.arrays()) {
    out.write(reinterpret_cast<const char*>(a.values.data()),
              static_cast<std::streamsize>(a.size() * sizeof(double)));
  }
  if (!out) throw Error(ErrorCode::kIoError, "cannot write params.bin");
}

Model LoadCheckpoint(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + (dir / "manifest.json").string());
  nlohmann::json manifest;
  try {
    in >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCheckpointMismatch, std::string("manifest: ") + e.what());
  }

  Model model;
  try {
    if (manifest.at("format") != kFormat) {
      throw Error(ErrorCode::kCheckpointMismatch, "not a semtag checkpoint");
    }
    if (manifest.at("version").get<int>() != kCheckpointVersion) {
      throw Error(ErrorCode::kCheckpointMismatch, "unsupported checkpoint version");
    }
    const nlohmann::json& vocab = manifest.at("vocab");
    model.vocab.words = VocabFromJson(vocab.at("words"));
    model.vocab.concepts = VocabFromJson(vocab.at("concepts"));
    model.vocab.labels = VocabFromJson(vocab.at("labels"));
    const int num_labels = model.vocab.labels.size();
    model.vocab.inventory =
        SupertagInventory::FromJson(manifest.at("inventory"), model.vocab.labels);
    if (model.vocab.labels.size() != num_labels) {
      throw Error(ErrorCode::kCheckpointMismatch, "inventory uses labels outside the vocabulary");
    }
    model.params = ParameterSet(ScorerConfig::FromJson(manifest.at("config")),
                                model.vocab.Sizes());
    const nlohmann::json& arrays = manifest.at("arrays");
    if (arrays.size() != model.params.arrays().size()) {
      throw Error(ErrorCode::kCheckpointMismatch, "array count");
    }
    for (std::size_t i = 0; i < arrays.size(); ++i) {
      const NamedArray& a = model.params.array(static_cast<int>(i));
      if (arrays[i].at("name") != a.name || arrays[i].at("rows") != a.rows ||
          arrays[i].at("cols") != a.cols) {
        throw Error(ErrorCode::kCheckpointMismatch, "array layout differs at " + a.name);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCheckpointMismatch, std::string("manifest: ") + e.what());
  }

  std::ifstream bin(dir / "params.bin", std::ios::binary);
  if (!bin) throw Error(ErrorCode::kIoError, "cannot open params.bin");
  char magic[sizeof(kMagic)];
  std::uint64_t count = 0;
  bin.read(magic, sizeof(magic));
  bin.read(reinterpret_cast<char*>(&count), sizeof(count));
  if (!bin || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0 ||
      count != model.params.arrays().size()) {
    throw Error(ErrorCode::kCheckpointMismatch, "params.bin header");
  }
  for (NamedArray& a : model.params.arrays()) {
    bin.read(reinterpret_cast<char*>(a.values.data()),
             static_cast<std::streamsize>(a.size() * sizeof(double)));
  }
  if (!bin || bin.peek() != std::char_traits<char>::eof()) {
    throw Error(ErrorCode::kCheckpointMismatch, "params.bin size");
  }
  return model;
}

}  // namespace semtag
