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

#ifndef SEMTAG_VOCABULARY_H_
#define SEMTAG_VOCABULARY_H_

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace semtag {

// Bijective string <-> dense id interning table.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> symbols);

  // Returns the id of `symbol`, adding it if absent.
  int Intern(std::string_view symbol);

  std::optional<int> Find(std::string_view symbol) const;
  // Throws Error(kUnknownSymbol) when absent.
  int IdOf(std::string_view symbol) const;
  const std::string& Symbol(int id) const { return symbols_.at(id); }

  int size() const { return static_cast<int>(symbols_.size()); }
  const std::vector<std::string>& symbols() const { return symbols_; }

  bool operator==(const Vocabulary& other) const {
    return symbols_ == other.symbols_;
  }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> ids_;
};

// Reserved symbols. The concept vocabulary always holds kEmptyConcept at id 0
// and the word vocabulary always holds kUnknownWord at id 0.
inline constexpr std::string_view kEmptyConcept = "<none>";
inline constexpr std::string_view kUnknownWord = "<unk>";
inline constexpr int kEmptyConceptId = 0;
inline constexpr int kUnknownWordId = 0;

}  // namespace semtag

#endif  // SEMTAG_VOCABULARY_H_
