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

#include "semtag/vocabulary.h"

#include "semtag/error.h"

namespace semtag {

Vocabulary::Vocabulary(std::vector<std::string> symbols) {
  for (const std::string& s : symbols) Intern(s);
}

int Vocabulary::Intern(std::string_view symbol) {
  auto it = ids_.find(std::string(symbol));
  if (it != ids_.end()) return it->second;
  const int id = size();
  symbols_.emplace_back(symbol);
  ids_.emplace(symbols_.back(), id);
  return id;
}

std::optional<int> Vocabulary::Find(std::string_view symbol) const {
  auto it = ids_.find(std::string(symbol));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

int Vocabulary::IdOf(std::string_view symbol) const {
  if (auto id = Find(symbol)) return *id;
  throw Error(ErrorCode::kUnknownSymbol, std::string(symbol));
}

}  // namespace semtag
