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

#include "semtag/supertag.h"

#include <set>

#include "semtag/error.h"

namespace semtag {
namespace {

// Canonical order: by size, then lexicographic. Makes Build() independent of
// the order of the training graphs.
template <typename Bag>
bool CanonicalLess(const Bag& a, const Bag& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a.labels() < b.labels();
}

template <typename Bag>
nlohmann::json BagToJson(const Bag& bag, const Vocabulary& labels) {
  nlohmann::json j = nlohmann::json::array();
  for (int l : bag.labels()) j.push_back(labels.Symbol(l));
  return j;
}

template <typename Bag>
Bag BagFromJson(const nlohmann::json& j, Vocabulary& labels) {
  std::vector<int> ids;
  for (const auto& s : j) ids.push_back(labels.Intern(s.get<std::string>()));
  return Bag(std::move(ids));
}

}  // namespace

void InternLabels(std::span<const SemanticGraph> graphs, Vocabulary& labels) {
  for (const SemanticGraph& g : graphs) {
    for (const Arc& a : g.arcs()) labels.Intern(a.label);
  }
}

std::vector<Supertag> ExtractSupertags(const SemanticGraph& graph,
                                       const Vocabulary& labels) {
  std::vector<Supertag> tags(graph.vertices().size());
  for (const Arc& a : graph.arcs()) {
    const int l = labels.IdOf(a.label);
    tags[graph.IndexOf(a.head)].sites.Add(l);
    tags[graph.IndexOf(a.dep)].roots.Add(l);
  }
  return tags;
}

CompanionshipReport VerifyCompanionship(std::span<const Supertag> assignment) {
  std::map<int, int> balance;
  for (const Supertag& t : assignment) {
    for (int l : t.sites.labels()) --balance[l];
    for (int l : t.roots.labels()) ++balance[l];
  }
  CompanionshipReport report;
  for (const auto& [label, d] : balance) {
    if (d != 0) report.deficit.emplace(label, d);
  }
  report.satisfied = report.deficit.empty();
  return report;
}

SupertagInventory::SupertagInventory(std::vector<SiteSet> sites,
                                     std::vector<RootSet> roots)
    : sites_(std::move(sites)), roots_(std::move(roots)) {
  if (sites_.empty() || !sites_[0].empty() || roots_.empty() || !roots_[0].empty()) {
    throw Error(ErrorCode::kInvalidConfig,
                "inventory must start with the empty site set and root set");
  }
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    if (!site_index_.emplace(sites_[i], static_cast<int>(i)).second) {
      throw Error(ErrorCode::kInvalidConfig, "duplicate site set in inventory");
    }
  }
  for (std::size_t i = 0; i < roots_.size(); ++i) {
    if (!root_index_.emplace(roots_[i], static_cast<int>(i)).second) {
      throw Error(ErrorCode::kInvalidConfig, "duplicate root set in inventory");
    }
  }
}

SupertagInventory SupertagInventory::Build(std::span<const SemanticGraph> graphs,
                                           const Vocabulary& labels) {
  if (graphs.empty()) throw Error(ErrorCode::kEmptyTrainingSet, "no graphs");
  std::set<SiteSet> sites{SiteSet()};
  std::set<RootSet> roots{RootSet()};
  for (const SemanticGraph& g : graphs) {
    for (const Supertag& t : ExtractSupertags(g, labels)) {
      sites.insert(t.sites);
      roots.insert(t.roots);
    }
  }
  std::vector<SiteSet> s(sites.begin(), sites.end());
  std::vector<RootSet> r(roots.begin(), roots.end());
  std::sort(s.begin(), s.end(), CanonicalLess<SiteSet>);
  std::sort(r.begin(), r.end(), CanonicalLess<RootSet>);
  return SupertagInventory(std::move(s), std::move(r));
}

std::optional<int> SupertagInventory::FindSites(const SiteSet& s) const {
  auto it = site_index_.find(s);
  if (it == site_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> SupertagInventory::FindRoots(const RootSet& r) const {
  auto it = root_index_.find(r);
  if (it == root_index_.end()) return std::nullopt;
  return it->second;
}

nlohmann::json SupertagInventory::ToJson(const Vocabulary& labels) const {
  nlohmann::json js = nlohmann::json::array();
  for (const SiteSet& s : sites_) js.push_back(BagToJson(s, labels));
  nlohmann::json jr = nlohmann::json::array();
  for (const RootSet& r : roots_) jr.push_back(BagToJson(r, labels));
  return {{"sites", std::move(js)}, {"roots", std::move(jr)}};
}

SupertagInventory SupertagInventory::FromJson(const nlohmann::json& j,
                                              Vocabulary& labels) {
  std::vector<SiteSet> sites;
  for (const auto& s : j.at("sites")) sites.push_back(BagFromJson<SiteSet>(s, labels));
  std::vector<RootSet> roots;
  for (const auto& r : j.at("roots")) roots.push_back(BagFromJson<RootSet>(r, labels));
  return SupertagInventory(std::move(sites), std::move(roots));
}

}  // namespace semtag
