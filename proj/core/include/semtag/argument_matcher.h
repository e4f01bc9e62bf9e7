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

#ifndef SEMTAG_ARGUMENT_MATCHER_H_
#define SEMTAG_ARGUMENT_MATCHER_H_

#include <utility>
#include <vector>

#include "semtag/supertag.h"
#include "semtag/supertag_decoder.h"
#include "semtag/tensor.h"

namespace semtag {

// Arc between word positions, labeled by an arc-label id.
struct LabeledArc {
  int head = 0;
  int dep = 0;
  int label = 0;

  auto operator<=>(const LabeledArc&) const = default;
};

// Sorted by (head, dep, label).
using ArcSet = std::vector<LabeledArc>;

struct LabelSlotGroup {
  int label = 0;
  std::vector<int> site_positions;  // repeated per multiplicity
  std::vector<int> root_positions;
};

// Weight given to pairing a site with a root on the same word.
inline constexpr double kSelfPairPenalty = -1e9;

// Maximum-weight perfect matching of sites to roots under mu(i, j, label).
// Among optimal matchings the lexicographically smallest (site, root)
// sequence is returned. Throws Error(kSizeMismatch) if the sides differ.
std::vector<std::pair<int, int>> MatchLabel(const LabelSlotGroup& group,
                                            const Tensor3& mu);

// One arc per matched (site, root) pair over all labels.
ArcSet IdentifyArguments(const SupertagAssignment& assignment,
                         const SupertagInventory& inventory, const Tensor3& mu);

// Per ordered active pair, argmax over labels and a zero-scored null label.
ArcSet DecodeArcsBaseline(const Tensor3& mu, const std::vector<bool>& active);

}  // namespace semtag

#endif  // SEMTAG_ARGUMENT_MATCHER_H_
