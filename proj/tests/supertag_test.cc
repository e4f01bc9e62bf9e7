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

#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "semtag/corpus.h"
#include "semtag/error.h"
#include "semtag/vocabulary.h"

namespace semtag {
namespace {

SemanticGraph Build(const std::string& sentence, const std::string& lf) {
  const std::vector<Token> tokens = Tokenize(sentence);
  return GraphFromLogicalForm(ParseLogicalForm(lf, static_cast<int>(tokens.size())), tokens);
}

const char kCatSentence[] = "A cat ate the cake .";
const char kCatForm[] =
    "* cake ( x _ 4 ) ; cat ( x _ 1 ) AND eat . agent ( x _ 2 , x _ 1 ) AND "
    "eat . theme ( x _ 2 , x _ 4 )";

TEST(LabelBagTest, IsACanonicalMultiset) {
  SiteSet a({2, 1, 2});
  SiteSet b;
  b.Add(2);
  b.Add(2);
  b.Add(1);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.Count(2), 2);
  EXPECT_EQ(a.Count(5), 0);
  EXPECT_EQ(a.size(), 3);
}

TEST(ExtractTest, SitesOnHeadsRootsOnDependents) {
  const SemanticGraph g = Build(kCatSentence, kCatForm);
  Vocabulary labels;
  InternLabels(std::span(&g, 1), labels);
  const std::vector<Supertag> tags = ExtractSupertags(g, labels);
  const int agent = labels.IdOf("agent");
  const int theme = labels.IdOf("theme");
  const int det = labels.IdOf("det");
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const std::string& c = g.vertices()[i].concept_name;
    if (c == "cat") {
      EXPECT_EQ(tags[i].sites, SiteSet());
      EXPECT_EQ(tags[i].roots, RootSet({agent}));
    } else if (c == "eat") {
      EXPECT_EQ(tags[i].sites, SiteSet({agent, theme}));
      EXPECT_EQ(tags[i].roots, RootSet());
    } else if (c == "definite") {
      EXPECT_EQ(tags[i].sites, SiteSet({det}));
      EXPECT_TRUE(tags[i].roots.empty());
    } else {
      EXPECT_EQ(c, "cake");
      EXPECT_EQ(tags[i].roots, RootSet({det, theme}));
    }
  }
  EXPECT_TRUE(VerifyCompanionship(tags).satisfied);
}

TEST(CompanionshipTest, ReportsDeficitPerLabel) {
  std::vector<Supertag> tags(2);
  tags[0].sites = SiteSet({0, 0});
  tags[1].roots = RootSet({0, 1});
  const CompanionshipReport r = VerifyCompanionship(tags);
  EXPECT_FALSE(r.satisfied);
  EXPECT_EQ(r.deficit, (std::map<int, int>{{0, -1}, {1, 1}}));
}

TEST(InventoryTest, CrossProductLicensesUnseenCombinations) {
  // Observed: {(ccomp,+),(agent,-)} and {(agent,-),(theme,-)}.
  Vocabulary labels(std::vector<std::string>{"agent", "ccomp", "theme"});
  SemanticGraph g;
  const int prefer = g.AddVertex("prefer", 0);
  const int x = g.AddVertex("x", 1);
  const int like = g.AddVertex("like", 2);
  const int y = g.AddVertex("y", 3);
  const int z = g.AddVertex("z", 4);
  g.AddArc(prefer, like, "ccomp");
  g.AddArc(like, x, "agent");
  g.AddArc(like, y, "theme");
  g.AddArc(prefer, z, "agent");
  const SupertagInventory inv = SupertagInventory::Build(std::span(&g, 1), labels);
  const int agent = labels.IdOf("agent");
  const int theme = labels.IdOf("theme");
  const int ccomp = labels.IdOf("ccomp");
  EXPECT_TRUE(inv.FindSites(SiteSet({agent, theme})).has_value());
  EXPECT_TRUE(inv.FindSites(SiteSet({agent, ccomp})).has_value());
  EXPECT_TRUE(inv.FindRoots(RootSet({ccomp})).has_value());
  EXPECT_TRUE(inv.FindRoots(RootSet({agent})).has_value());
  // Only observed multisets enter, never their parts.
  EXPECT_FALSE(inv.FindSites(SiteSet({agent})).has_value());
  EXPECT_FALSE(inv.FindSites(SiteSet({ccomp})).has_value());
  EXPECT_EQ(inv.num_sites(), 3);
  EXPECT_EQ(inv.num_roots(), 4);
  // Index 0 of each side is the empty multiset.
  EXPECT_TRUE(inv.sites()[0].empty());
  EXPECT_TRUE(inv.roots()[0].empty());
  EXPECT_EQ(inv.NumLicensed(),
            static_cast<long long>(inv.num_sites()) * inv.num_roots() - 1);
  const int s = *inv.FindSites(SiteSet({agent, theme}));
  EXPECT_EQ(inv.SiteCount(s, agent), 1);
  EXPECT_EQ(inv.SiteCount(s, ccomp), 0);
}

TEST(InventoryTest, IsolatedVertexLicensesNothing) {
  SemanticGraph g;
  g.AddVertex("shark", 0);
  Vocabulary labels;
  const SupertagInventory inv = SupertagInventory::Build(std::span(&g, 1), labels);
  EXPECT_EQ(inv.num_sites(), 1);
  EXPECT_EQ(inv.num_roots(), 1);
  EXPECT_EQ(inv.NumLicensed(), 0);
}

TEST(InventoryTest, JsonRoundTrip) {
  const SemanticGraph g = Build(kCatSentence, kCatForm);
  Vocabulary labels;
  InternLabels(std::span(&g, 1), labels);
  const SupertagInventory inv = SupertagInventory::Build(std::span(&g, 1), labels);
  Vocabulary labels2 = labels;
  EXPECT_EQ(SupertagInventory::FromJson(inv.ToJson(labels), labels2), inv);
}

TEST(InventoryTest, RejectsMissingEmptyEntryAndDuplicates) {
  EXPECT_THROW(SupertagInventory({SiteSet({0})}, {RootSet()}), Error);
  EXPECT_THROW(SupertagInventory({SiteSet(), SiteSet({0}), SiteSet({0})}, {RootSet()}), Error);
  EXPECT_THROW(SupertagInventory::Build({}, Vocabulary()), Error);
}

}  // namespace
}  // namespace semtag
