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

#include "semtag/corpus.h"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <gtest/gtest.h>

#include "semtag/error.h"

namespace semtag {
namespace {

using Edge = std::tuple<int, int, std::string>;

SemanticGraph Build(const std::string& sentence, const std::string& lf) {
  const std::vector<Token> tokens = Tokenize(sentence);
  return GraphFromLogicalForm(ParseLogicalForm(lf, static_cast<int>(tokens.size())), tokens);
}

std::set<std::pair<int, std::string>> AnchoredVertices(const SemanticGraph& g) {
  std::set<std::pair<int, std::string>> out;
  for (const Vertex& v : g.vertices()) out.emplace(*v.anchor, v.concept_name);
  return out;
}

std::set<Edge> AnchoredArcs(const SemanticGraph& g) {
  std::set<Edge> out;
  for (const Arc& a : g.arcs()) {
    out.emplace(*g.vertices()[g.IndexOf(a.head)].anchor, *g.vertices()[g.IndexOf(a.dep)].anchor,
                a.label);
  }
  return out;
}

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIoError;
}

TEST(TokenizeTest, SplitsOnSpacesWithOneBasedIndices) {
  const std::vector<Token> t = Tokenize("A cat ate the cake .");
  ASSERT_EQ(t.size(), 6u);
  EXPECT_EQ(t[0].surface, "A");
  EXPECT_EQ(t[0].index, 1);
  EXPECT_EQ(t[5].surface, ".");
  EXPECT_EQ(t[5].index, 6);
}

TEST(LogicalFormTest, CompactAndSpacedNotationsAgree) {
  const LogicalForm a = ParseLogicalForm("*cake(x_4) ; cat(x_1) AND eat.agent(x_2,x_1)", 6);
  const LogicalForm b =
      ParseLogicalForm("* cake ( x _ 4 ) ; cat ( x _ 1 ) AND eat . agent ( x _ 2 , x _ 1 )", 6);
  EXPECT_EQ(a.atoms, b.atoms);
  EXPECT_EQ(a.CountRoleAtoms(), 1);
}

TEST(LogicalFormTest, DottedRolesStayWhole) {
  const LogicalForm lf = ParseLogicalForm("cake . nmod . on ( x _ 1 , x _ 4 )", 6);
  ASSERT_EQ(lf.atoms.size(), 1u);
  const auto& r = std::get<RoleAtom>(lf.atoms[0]);
  EXPECT_EQ(r.concept_name, "cake");
  EXPECT_EQ(r.role, "nmod.on");
}

TEST(LogicalFormTest, LambdaPrimitive) {
  const LogicalForm lf =
      ParseLogicalForm("LAMBDA a . LAMBDA b . touch . agent ( a , b ) AND touch . theme ( a , b )", 1);
  EXPECT_EQ(lf.lambda_variables, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(lf.CountRoleAtoms(), 2);
}

TEST(LogicalFormTest, Errors) {
  EXPECT_EQ(CodeOf([] { ParseLogicalForm("cat ( x _ 9 )", 3); }), ErrorCode::kVariableOutOfRange);
  EXPECT_EQ(CodeOf([] { ParseLogicalForm("cat ( x _ 1", 3); }), ErrorCode::kMalformedAtom);
  EXPECT_EQ(CodeOf([] { ParseLogicalForm("", 3); }), ErrorCode::kMalformedAtom);
}

TEST(GraphTest, DefiniteObjectGetsDeterminerVertex) {
  const SemanticGraph g = Build("A cat ate the cake .",
                                "* cake ( x _ 4 ) ; cat ( x _ 1 ) AND eat . agent ( x _ 2 , x _ 1 ) "
                                "AND eat . theme ( x _ 2 , x _ 4 )");
  EXPECT_EQ(AnchoredVertices(g),
            (std::set<std::pair<int, std::string>>{
                {1, "cat"}, {2, "eat"}, {3, "definite"}, {4, "cake"}}));
  EXPECT_EQ(AnchoredArcs(g),
            (std::set<Edge>{{2, 1, "agent"}, {2, 4, "theme"}, {3, 4, "det"}}));
  EXPECT_TRUE(g.FullyAnchored());
}

TEST(GraphTest, ProperNamesAnchorAtTheirWord) {
  const SemanticGraph g =
      Build("Emma rolled a teacher .",
            "roll . agent ( x _ 1 , Emma ) AND roll . theme ( x _ 1 , x _ 3 ) AND teacher ( x _ 3 )");
  EXPECT_EQ(AnchoredVertices(g), (std::set<std::pair<int, std::string>>{
                                     {0, "Emma"}, {1, "roll"}, {3, "teacher"}}));
  EXPECT_EQ(AnchoredArcs(g), (std::set<Edge>{{1, 0, "agent"}, {1, 3, "theme"}}));
}

TEST(GraphTest, LambdaArgumentsProduceNoArcs) {
  const SemanticGraph g =
      Build("touch", "LAMBDA a . LAMBDA b . touch . agent ( a , b ) AND touch . theme ( a , b )");
  ASSERT_EQ(g.num_vertices(), 1);
  EXPECT_EQ(g.vertices()[0].concept_name, "touch");
  EXPECT_TRUE(g.arcs().empty());
}

TEST(GraphTest, UnanchorableNameAndDanglingArgument) {
  EXPECT_EQ(CodeOf([] { Build("A cat slept .", "sleep . agent ( x _ 2 , Emma )"); }),
            ErrorCode::kUnanchorableProperName);
  EXPECT_EQ(CodeOf([] { Build("A cat slept .", "sleep . agent ( x _ 2 , x _ 1 )"); }),
            ErrorCode::kDanglingArgument);
}

TEST(GraphTest, ArcContract) {
  SemanticGraph g;
  const int a = g.AddVertex("a", 0);
  const int b = g.AddVertex("b", 1);
  g.AddArc(a, b, "x");
  EXPECT_EQ(CodeOf([&] { g.AddArc(a, a, "x"); }), ErrorCode::kMalformedAtom);
  EXPECT_EQ(CodeOf([&] { g.AddArc(a, b, "y"); }), ErrorCode::kMalformedAtom);
  EXPECT_EQ(CodeOf([&] { g.AddArc(a, 42, "y"); }), ErrorCode::kMalformedAtom);
}

TEST(GraphTest, EqualityIgnoresVertexIds) {
  const SemanticGraph g = Build("A cat ate the cake .",
                                "* cake ( x _ 4 ) ; cat ( x _ 1 ) AND eat . agent ( x _ 2 , x _ 1 ) "
                                "AND eat . theme ( x _ 2 , x _ 4 )");
  std::vector<int> perm(g.num_vertices());
  for (int i = 0; i < g.num_vertices(); ++i) perm[i] = 10 * (g.num_vertices() - i);
  EXPECT_TRUE(GraphsEqual(g, g.Renumbered(perm)));
  EXPECT_TRUE(GraphsEqual(g, GraphFromJson(GraphToJson(g))));
  SemanticGraph h = g;
  h.AddVertex("extra", 5);
  EXPECT_FALSE(GraphsEqual(g, h));
  EXPECT_EQ(CodeOf([&] { GraphsEqual(g.WithoutAnchors(), g); }), ErrorCode::kUnanchoredVertex);
}

TEST(CorpusTest, LoadsBundledSample) {
  const std::vector<CogsExample> c =
      LoadCorpusFile(std::string(SEMTAG_DATA_DIR) + "/cogs_sample/train.tsv", "train");
  ASSERT_FALSE(c.empty());
  for (const CogsExample& ex : c) {
    EXPECT_TRUE(ex.graph.FullyAnchored()) << ex.logical_form;
    EXPECT_FALSE(ex.category.empty());
  }
}

TEST(CorpusTest, MalformedLinesAreReportedTogether) {
  std::istringstream in("A cat slept .\tcat ( x _ 1 ) AND sleep . agent ( x _ 2 , x _ 1 )\tin_distribution\n"
                        "bad line without tabs\n"
                        "A dog slept .\tdog ( x _ 9 )\tin_distribution\n");
  try {
    LoadCorpus(in, "train");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCorpusParse);
    const std::string what = e.what();
    EXPECT_NE(what.find("2"), std::string::npos);
    EXPECT_NE(what.find("3"), std::string::npos);
  }
}

TEST(CorpusTest, MissingFileIsIoError) {
  EXPECT_EQ(CodeOf([] { LoadCorpusFile("/nonexistent/train.tsv", "train"); }),
            ErrorCode::kIoError);
}

TEST(CorpusTest, CategoryGroups) {
  EXPECT_EQ(ClassifyCategory("obj_pp_to_subj_pp"), CategoryGroup::kObjToSubjPP);
  EXPECT_EQ(ClassifyCategory("pp_recursion"), CategoryGroup::kPPRecursion);
  EXPECT_EQ(ClassifyCategory("cp_recursion"), CategoryGroup::kCPRecursion);
  EXPECT_EQ(ClassifyCategory("in_distribution"), CategoryGroup::kInDistribution);
  EXPECT_EQ(ClassifyCategory("subj_to_obj_common"), CategoryGroup::kLexical);
}

std::vector<CogsExample> Numbered(int n) {
  std::vector<CogsExample> out(n);
  for (int i = 0; i < n; ++i) out[i].category = std::to_string(i);
  return out;
}

TEST(DevSampleTest, PartitionsAndIsDeterministic) {
  const std::vector<CogsExample> gen = Numbered(50);
  const DevSample a = SampleGenDev(gen, 12, 99);
  const DevSample b = SampleGenDev(gen, 12, 99);
  ASSERT_EQ(a.dev.size(), 12u);
  ASSERT_EQ(a.rest.size(), 38u);
  std::set<std::string> seen;
  for (const auto* half : {&a.dev, &a.rest}) {
    for (const CogsExample& ex : *half) EXPECT_TRUE(seen.insert(ex.category).second);
  }
  EXPECT_EQ(seen.size(), 50u);
  for (std::size_t i = 0; i < a.dev.size(); ++i) EXPECT_EQ(a.dev[i].category, b.dev[i].category);
  const auto in_order = [](const std::vector<CogsExample>& v) {
    return std::is_sorted(v.begin(), v.end(), [](const auto& x, const auto& y) {
      return std::stoi(x.category) < std::stoi(y.category);
    });
  };
  EXPECT_TRUE(in_order(a.dev));
  EXPECT_TRUE(in_order(a.rest));
}

TEST(DevSampleTest, EdgeCases) {
  const std::vector<CogsExample> gen = Numbered(5);
  const DevSample empty = SampleGenDev(gen, 0, 1);
  EXPECT_TRUE(empty.dev.empty());
  EXPECT_EQ(empty.rest.size(), 5u);
  EXPECT_EQ(CodeOf([&] { SampleGenDev(gen, 6, 1); }), ErrorCode::kKTooLarge);
}

}  // namespace
}  // namespace semtag
