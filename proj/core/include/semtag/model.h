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

#ifndef SEMTAG_MODEL_H_
#define SEMTAG_MODEL_H_

// A trained parser: symbol tables, supertag inventory and scorer weights,
// plus the on-disk checkpoint format.
//
// A checkpoint is a directory holding manifest.json (format tag, version,
// scorer config, vocabularies, inventory, array layout) and params.bin
// (8-byte magic, array count, then every array as little-endian float64).

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "semtag/scorer.h"
#include "semtag/supertag.h"
#include "semtag/vocabulary.h"

namespace semtag {

struct ModelVocabularies {
  Vocabulary words;     // id 0 is the unknown word
  Vocabulary concepts;  // id 0 is the empty concept
  Vocabulary labels;
  SupertagInventory inventory;

  ModelSizes Sizes() const;
  // Unknown words map to the unknown-word id.
  std::vector<int> WordIds(std::span<const std::string> words) const;
};

struct Model {
  ModelVocabularies vocab;
  ParameterSet params;
};

inline constexpr int kCheckpointVersion = 1;

// Throws Error(kIoError).
void SaveCheckpoint(const Model& model, const std::filesystem::path& dir);
// Throws Error(kIoError) or Error(kCheckpointMismatch) when the manifest and
// the weights disagree.
Model LoadCheckpoint(const std::filesystem::path& dir);

}  // namespace semtag

#endif  // SEMTAG_MODEL_H_
