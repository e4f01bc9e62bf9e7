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

#ifndef SEMTAG_CORPUS_H_
#define SEMTAG_CORPUS_H_

// COGS ingestion: logical forms, anchored semantic graphs, corpus files.
//
// Word positions inside graphs are 0-based (they coincide with the k of a
// COGS variable x_k). Token::index is 1-based.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace semtag {

struct Token {
  std::string surface;
  int index = 0;  // 1-based

  bool operator==(const Token&) const = default;
};

std::vector<Token> Tokenize(std::string_view sentence);

// A term in argument position of a logical-form atom.
struct Term {
  enum class Kind { kVariable, kConstant, kLambda };
  Kind kind = Kind::kVariable;
  int position = -1;  // kVariable: the k of x_k
  std::string name;   // kConstant / kLambda

  bool operator==(const Term&) const = default;
};

struct UnaryAtom {
  std::string concept_name;
  Term variable;
  bool definite = false;

  bool operator==(const UnaryAtom&) const = default;
};

struct RoleAtom {
  std::string concept_name;
  std::string role;  // may itself be dotted, e.g. "nmod.on"
  Term predicate;
  Term argument;

  bool operator==(const RoleAtom&) const = default;
};

struct PrimitiveAtom {
  std::string name;

  bool operator==(const PrimitiveAtom&) const = default;
};

using Atom = std::variant<UnaryAtom, RoleAtom, PrimitiveAtom>;

struct LogicalForm {
  std::vector<std::string> lambda_variables;  // LAMBDA-bound names, in order
  std::vector<Atom> atoms;

  int CountRoleAtoms() const;
};

// Accepts both the compact notation ("*cat(x_1) AND like.agent(x_2,x_1)")
// and the whitespace-separated COGS release notation
// ("* cat ( x _ 1 ) ; like . agent ( x _ 2 , x _ 1 )"), including
// "LAMBDA a . ..." primitive entries.
LogicalForm ParseLogicalForm(std::string_view text, int sentence_length);

struct Vertex {
  int id = 0;
  std::string concept_name;
  std::optional<int> anchor;  // 0-based word position

  bool operator==(const Vertex&) const = default;
};

struct Arc {
  int head = 0;  // vertex id
  int dep = 0;   // vertex id
  std::string label;

  bool operator==(const Arc&) const = default;
};

class SemanticGraph {
 public:
  SemanticGraph() = default;

  // Returns the id of the new vertex.
  int AddVertex(std::string concept_name, std::optional<int> anchor);
  // Throws Error(kMalformedAtom) on self-loops, duplicate ordered pairs or
  // unknown endpoints.
  void AddArc(int head, int dep, std::string label);

  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  int num_vertices() const { return static_cast<int>(vertices_.size()); }

  // Index into vertices() of the vertex with the given id.
  int IndexOf(int vertex_id) const;
  bool FullyAnchored() const;
  // Copy with all anchors removed (input to weakly supervised training).
  SemanticGraph WithoutAnchors() const;
  // Copy with vertex ids renumbered through `perm` (perm[old_index] = new id).
  SemanticGraph Renumbered(std::span<const int> perm) const;

 private:
  std::vector<Vertex> vertices_;
  std::vector<Arc> arcs_;
};

SemanticGraph GraphFromLogicalForm(const LogicalForm& lf,
                                   std::span<const Token> sentence);

inline constexpr std::string_view kDefiniteConcept = "definite";
inline constexpr std::string_view kDeterminerLabel = "det";

// Coarse grouping of COGS categories used by the report tables.
enum class CategoryGroup {
  kInDistribution,
  kLexical,
  kObjToSubjPP,
  kPPRecursion,
  kCPRecursion,
};

CategoryGroup ClassifyCategory(std::string_view category);
std::string_view CategoryGroupName(CategoryGroup group);

struct CogsExample {
  std::vector<Token> sentence;
  SemanticGraph graph;
  std::string category;
  std::string logical_form;

  std::vector<std::string> Words() const;
};

// Reads 3-column TSV (sentence, logical form, category). All malformed lines
// are collected and reported together in a single kCorpusParse error.
std::vector<CogsExample> LoadCorpus(std::istream& in, std::string_view split);
std::vector<CogsExample> LoadCorpusFile(const std::filesystem::path& path,
                                        std::string_view split);

struct DevSample {
  std::vector<CogsExample> dev;
  std::vector<CogsExample> rest;
};

// Uniform sample of k examples without replacement. Both halves keep the
// original relative order.
DevSample SampleGenDev(std::span<const CogsExample> gen, std::size_t k,
                       std::uint64_t seed);

// Anchor-level equality; vertex ids are irrelevant.
bool GraphsEqual(const SemanticGraph& a, const SemanticGraph& b);

nlohmann::json GraphToJson(const SemanticGraph& graph);
SemanticGraph GraphFromJson(const nlohmann::json& j);

}  // namespace semtag

#endif  // SEMTAG_CORPUS_H_
