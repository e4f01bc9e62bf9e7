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

#ifndef SEMTAG_SUPERTAG_H_
#define SEMTAG_SUPERTAG_H_

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "semtag/corpus.h"
#include "semtag/vocabulary.h"

namespace semtag {

// Canonical multiset of arc-label ids (kept sorted). The tag parameter keeps
// substitution sites and roots from being mixed up.
template <typename Tag>
class LabelBag {
 public:
  LabelBag() = default;
  explicit LabelBag(std::vector<int> labels) : labels_(std::move(labels)) {
    std::sort(labels_.begin(), labels_.end());
  }

  void Add(int label) {
    labels_.insert(std::upper_bound(labels_.begin(), labels_.end(), label), label);
  }
  int Count(int label) const {
    auto [lo, hi] = std::equal_range(labels_.begin(), labels_.end(), label);
    return static_cast<int>(hi - lo);
  }
  bool empty() const { return labels_.empty(); }
  int size() const { return static_cast<int>(labels_.size()); }
  const std::vector<int>& labels() const { return labels_; }

  auto operator<=>(const LabelBag&) const = default;
  bool operator==(const LabelBag&) const = default;

 private:
  std::vector<int> labels_;
};

struct SiteTag {};
struct RootTag {};
using SiteSet = LabelBag<SiteTag>;  // expected arguments (l, -)
using RootSet = LabelBag<RootTag>;  // expected usages (l, +)

struct Supertag {
  SiteSet sites;
  RootSet roots;

  bool empty() const { return sites.empty() && roots.empty(); }
  bool operator==(const Supertag&) const = default;
};

// Collects every arc label of the given graphs into `labels`.
void InternLabels(std::span<const SemanticGraph> graphs, Vocabulary& labels);

// One supertag per vertex, in graph().vertices() order.
std::vector<Supertag> ExtractSupertags(const SemanticGraph& graph,
                                       const Vocabulary& labels);

struct CompanionshipReport {
  bool satisfied = true;
  // label id -> (#roots - #sites); only nonzero entries.
  std::map<int, int> deficit;
};

CompanionshipReport VerifyCompanionship(std::span<const Supertag> assignment);

// S- and S+ stored separately; index 0 of each is the empty multiset.
class SupertagInventory {
 public:
  SupertagInventory() = default;
  SupertagInventory(std::vector<SiteSet> sites, std::vector<RootSet> roots);

  static SupertagInventory Build(std::span<const SemanticGraph> graphs,
                                 const Vocabulary& labels);

  const std::vector<SiteSet>& sites() const { return sites_; }
  const std::vector<RootSet>& roots() const { return roots_; }
  int num_sites() const { return static_cast<int>(sites_.size()); }
  int num_roots() const { return static_cast<int>(roots_.size()); }
  // Number of supertags licensed by the cross product (empty pair excluded).
  long long NumLicensed() const {
    return static_cast<long long>(num_sites()) * num_roots() - 1;
  }

  std::optional<int> FindSites(const SiteSet& s) const;
  std::optional<int> FindRoots(const RootSet& r) const;

  // v-_{s,l} / v+_{s,l}.
  int SiteCount(int site_index, int label) const {
    return sites_[site_index].Count(label);
  }
  int RootCount(int root_index, int label) const {
    return roots_[root_index].Count(label);
  }

  nlohmann::json ToJson(const Vocabulary& labels) const;
  static SupertagInventory FromJson(const nlohmann::json& j, Vocabulary& labels);

  bool operator==(const SupertagInventory&) const = default;

 private:
  std::vector<SiteSet> sites_;
  std::vector<RootSet> roots_;
  std::map<SiteSet, int> site_index_;
  std::map<RootSet, int> root_index_;
};

}  // namespace semtag

#endif  // SEMTAG_SUPERTAG_H_
