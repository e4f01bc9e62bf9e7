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
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <random>
#include <set>
#include <limits>
#include <cctype>
#include <sstream>
#include <tuple>

#include "semtag/error.h"

namespace semtag {
namespace {

// ---------------------------------------------------------------------------
// Logical-form lexer and parser.

struct LfToken {
  enum class Kind { kIdent, kPunct };
  Kind kind;
  std::string text;
};

bool IsIdentChar(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c == '-' || c == '\'';
}

std::vector<LfToken> LexLogicalForm(std::string_view text) {
  std::vector<LfToken> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
    } else if (IsIdentChar(c)) {
      std::size_t j = i;
      while (j < text.size() && IsIdentChar(text[j])) ++j;
      out.push_back({LfToken::Kind::kIdent, std::string(text.substr(i, j - i))});
      i = j;
    } else if (std::string_view("*(),._;").find(c) != std::string_view::npos) {
      out.push_back({LfToken::Kind::kPunct, std::string(1, c)});
      ++i;
    } else {
      throw Error(ErrorCode::kMalformedAtom,
                  "unexpected character '" + std::string(1, c) + "'");
    }
  }
  return out;
}

class LfParser {
 public:
  LfParser(std::vector<LfToken> tokens, int sentence_length)
      : tokens_(std::move(tokens)), n_(sentence_length) {}

  LogicalForm Parse() {
    LogicalForm lf;
    if (tokens_.empty()) {
      throw Error(ErrorCode::kMalformedAtom, "empty logical form");
    }
    while (PeekIdent("LAMBDA")) {
      ++pos_;
      lf.lambda_variables.push_back(ExpectIdent());
      ExpectPunct(".");
    }
    lambdas_ = lf.lambda_variables;
    if (lf.lambda_variables.empty() && tokens_.size() == 1 &&
        tokens_[0].kind == LfToken::Kind::kIdent) {
      lf.atoms.emplace_back(PrimitiveAtom{tokens_[0].text});
      return lf;
    }
    while (true) {
      lf.atoms.push_back(ParseAtom());
      if (AtEnd()) break;
      if (PeekIdent("AND") || PeekPunct(";")) {
        ++pos_;
        continue;
      }
      Fail("expected AND or ';'");
    }
    return lf;
  }

 private:
  bool AtEnd() const { return pos_ >= tokens_.size(); }

  bool PeekIdent(std::string_view text) const {
    return !AtEnd() && tokens_[pos_].kind == LfToken::Kind::kIdent &&
           tokens_[pos_].text == text;
  }
  bool PeekPunct(std::string_view text) const {
    return !AtEnd() && tokens_[pos_].kind == LfToken::Kind::kPunct &&
           tokens_[pos_].text == text;
  }

  [[noreturn]] void Fail(const std::string& what) const {
    std::string near = AtEnd() ? "<end>" : tokens_[pos_].text;
    throw Error(ErrorCode::kMalformedAtom, what + " near '" + near + "'");
  }

  std::string ExpectIdent() {
    if (AtEnd() || tokens_[pos_].kind != LfToken::Kind::kIdent) {
      Fail("expected identifier");
    }
    return tokens_[pos_++].text;
  }

  void ExpectPunct(std::string_view p) {
    if (!PeekPunct(p)) Fail("expected '" + std::string(p) + "'");
    ++pos_;
  }

  Term ParseTerm() {
    std::string name = ExpectIdent();
    if (name == "x" && PeekPunct("_")) {
      ++pos_;
      const std::string digits = ExpectIdent();
      int k = -1;
      auto [ptr, ec] =
          std::from_chars(digits.data(), digits.data() + digits.size(), k);
      if (ec != std::errc() || ptr != digits.data() + digits.size() || k < 0) {
        Fail("bad variable index");
      }
      if (k >= n_) {
        throw Error(ErrorCode::kVariableOutOfRange,
                    "x_" + digits + " with sentence length " +
                        std::to_string(n_));
      }
      return Term{Term::Kind::kVariable, k, {}};
    }
    if (std::find(lambdas_.begin(), lambdas_.end(), name) != lambdas_.end()) {
      return Term{Term::Kind::kLambda, -1, std::move(name)};
    }
    return Term{Term::Kind::kConstant, -1, std::move(name)};
  }

  Atom ParseAtom() {
    bool definite = false;
    if (PeekPunct("*")) {
      definite = true;
      ++pos_;
    }
    std::vector<std::string> parts{ExpectIdent()};
    while (PeekPunct(".")) {
      ++pos_;
      parts.push_back(ExpectIdent());
    }
    ExpectPunct("(");
    std::vector<Term> args{ParseTerm()};
    while (PeekPunct(",")) {
      ++pos_;
      args.push_back(ParseTerm());
    }
    ExpectPunct(")");

    if (args.size() == 1 && parts.size() == 1) {
      return UnaryAtom{parts[0], args[0], definite};
    }
    if (args.size() == 2 && parts.size() >= 2 && !definite) {
      std::string role = parts[1];
      for (std::size_t i = 2; i < parts.size(); ++i) role += "." + parts[i];
      return RoleAtom{parts[0], role, args[0], args[1]};
    }
    Fail("atom arity does not match its name");
  }

  std::vector<LfToken> tokens_;
  std::vector<std::string> lambdas_;
  std::size_t pos_ = 0;
  int n_;
};

// ---------------------------------------------------------------------------
// Graph construction.

class GraphBuilder {
 public:
  explicit GraphBuilder(std::span<const Token> sentence) : sentence_(sentence) {}

  SemanticGraph Build(const LogicalForm& lf) {
    // Pass 1: entities introduced by unary atoms and bare primitives.
    for (const Atom& atom : lf.atoms) {
      if (const auto* u = std::get_if<UnaryAtom>(&atom)) {
        const int v = InstanceFor(u->variable, u->concept_name);
        if (u->definite) definites_.emplace_back(v, u->variable);
      } else if (const auto* p = std::get_if<PrimitiveAtom>(&atom)) {
        ConstantVertex(p->name);
      }
    }
    // Pass 2: predicate instances (first argument of role atoms).
    for (const Atom& atom : lf.atoms) {
      if (const auto* r = std::get_if<RoleAtom>(&atom)) {
        InstanceFor(r->predicate, r->concept_name);
      }
    }
    // Pass 3: arcs.
    for (const Atom& atom : lf.atoms) {
      const auto* r = std::get_if<RoleAtom>(&atom);
      if (r == nullptr) continue;
      const int head = InstanceFor(r->predicate, r->concept_name);
      std::optional<int> dep;
      switch (r->argument.kind) {
        case Term::Kind::kVariable: {
          auto it = by_position_.find(r->argument.position);
          if (it == by_position_.end()) {
            throw Error(ErrorCode::kDanglingArgument,
                        r->concept_name + "." + r->role + " argument x_" +
                            std::to_string(r->argument.position));
          }
          dep = it->second;
          break;
        }
        case Term::Kind::kConstant:
          dep = ConstantVertex(r->argument.name);
          break;
        case Term::Kind::kLambda: {
          // Open argument of a lexical entry: no vertex, no arc.
          auto it = by_lambda_.find(r->argument.name);
          if (it != by_lambda_.end()) dep = it->second;
          break;
        }
      }
      if (dep) graph_.AddArc(head, *dep, r->role);
    }
    // Definiteness: an extra vertex on the closest preceding determiner.
    for (const auto& [noun, term] : definites_) {
      const int noun_pos = *graph_.vertices()[graph_.IndexOf(noun)].anchor;
      int det_pos = -1;
      for (int i = noun_pos - 1; i >= 0; --i) {
        if (sentence_[i].surface == "the" || sentence_[i].surface == "The") {
          det_pos = i;
          break;
        }
      }
      if (det_pos < 0) {
        throw Error(ErrorCode::kMalformedAtom,
                    "definite noun at position " + std::to_string(noun_pos) +
                        " has no preceding determiner");
      }
      const int def = AddAnchored(std::string(kDefiniteConcept), det_pos);
      graph_.AddArc(def, noun, std::string(kDeterminerLabel));
    }
    return std::move(graph_);
  }

 private:
  int AddAnchored(std::string concept_name, int anchor) {
    if (anchor < 0 || anchor >= static_cast<int>(sentence_.size())) {
      throw Error(ErrorCode::kVariableOutOfRange,
                  "anchor " + std::to_string(anchor));
    }
    if (!claimed_.insert(anchor).second) {
      throw Error(ErrorCode::kMalformedAtom,
                  "two concept instances anchored at word " +
                      std::to_string(anchor));
    }
    return graph_.AddVertex(std::move(concept_name), anchor);
  }

  int CheckConcept(int vertex, const std::string& concept_name) {
    const Vertex& v = graph_.vertices()[graph_.IndexOf(vertex)];
    if (v.concept_name != concept_name) {
      throw Error(ErrorCode::kMalformedAtom,
                  "instance carries both '" + v.concept_name + "' and '" +
                      concept_name + "'");
    }
    return vertex;
  }

  int InstanceFor(const Term& term, const std::string& concept_name) {
    switch (term.kind) {
      case Term::Kind::kVariable: {
        auto it = by_position_.find(term.position);
        if (it != by_position_.end()) return CheckConcept(it->second, concept_name);
        const int v = AddAnchored(concept_name, term.position);
        by_position_.emplace(term.position, v);
        return v;
      }
      case Term::Kind::kLambda: {
        auto it = by_lambda_.find(term.name);
        if (it != by_lambda_.end()) return CheckConcept(it->second, concept_name);
        // Lexical entries are single-word sentences.
        if (sentence_.size() != 1) {
          throw Error(ErrorCode::kMalformedAtom,
                      "LAMBDA instance in a multi-word sentence");
        }
        const int v = AddAnchored(concept_name, 0);
        by_lambda_.emplace(term.name, v);
        return v;
      }
      case Term::Kind::kConstant:
        return CheckConcept(ConstantVertex(term.name), concept_name);
    }
    return -1;
  }

  // Proper names anchor at the leftmost matching word not yet claimed.
  int ConstantVertex(const std::string& name) {
    auto it = by_constant_.find(name);
    if (it != by_constant_.end()) return it->second;
    for (std::size_t i = 0; i < sentence_.size(); ++i) {
      if (sentence_[i].surface == name && !claimed_.contains(static_cast<int>(i))) {
        const int v = AddAnchored(name, static_cast<int>(i));
        by_constant_.emplace(name, v);
        return v;
      }
    }
    throw Error(ErrorCode::kUnanchorableProperName, name);
  }

  std::span<const Token> sentence_;
  SemanticGraph graph_;
  std::map<int, int> by_position_;
  std::map<std::string, int> by_constant_;
  std::map<std::string, int> by_lambda_;
  std::set<int> claimed_;
  std::vector<std::pair<int, Term>> definites_;
};

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

// Unbiased bounded draw; avoids implementation-defined distributions so that
// samples are reproducible across standard libraries.
std::uint64_t Bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return r % bound;
}

}  // namespace

std::vector<Token> Tokenize(std::string_view sentence) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < sentence.size()) {
    while (i < sentence.size() && std::isspace(static_cast<unsigned char>(sentence[i]))) ++i;
    std::size_t j = i;
    while (j < sentence.size() && !std::isspace(static_cast<unsigned char>(sentence[j]))) ++j;
    if (j > i) {
      tokens.push_back({std::string(sentence.substr(i, j - i)),
                        static_cast<int>(tokens.size()) + 1});
    }
    i = j;
  }
  return tokens;
}

int LogicalForm::CountRoleAtoms() const {
  return static_cast<int>(std::count_if(atoms.begin(), atoms.end(), [](const Atom& a) {
    return std::holds_alternative<RoleAtom>(a);
  }));
}

LogicalForm ParseLogicalForm(std::string_view text, int sentence_length) {
  return LfParser(LexLogicalForm(text), sentence_length).Parse();
}

int SemanticGraph::AddVertex(std::string concept_name, std::optional<int> anchor) {
  int id = 0;
  for (const Vertex& v : vertices_) id = std::max(id, v.id + 1);
  vertices_.push_back({id, std::move(concept_name), anchor});
  return id;
}

void SemanticGraph::AddArc(int head, int dep, std::string label) {
  IndexOf(head);
  IndexOf(dep);
  if (head == dep) {
    throw Error(ErrorCode::kMalformedAtom, "self-loop on vertex " + std::to_string(head));
  }
  for (const Arc& a : arcs_) {
    if (a.head == head && a.dep == dep) {
      throw Error(ErrorCode::kMalformedAtom, "two arcs between the same ordered pair");
    }
  }
  arcs_.push_back({head, dep, std::move(label)});
}

int SemanticGraph::IndexOf(int vertex_id) const {
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (vertices_[i].id == vertex_id) return static_cast<int>(i);
  }
  throw Error(ErrorCode::kMalformedAtom, "unknown vertex " + std::to_string(vertex_id));
}

bool SemanticGraph::FullyAnchored() const {
  return std::all_of(vertices_.begin(), vertices_.end(),
                     [](const Vertex& v) { return v.anchor.has_value(); });
}

SemanticGraph SemanticGraph::WithoutAnchors() const {
  SemanticGraph g = *this;
  for (Vertex& v : g.vertices_) v.anchor.reset();
  return g;
}

SemanticGraph SemanticGraph::Renumbered(std::span<const int> perm) const {
  SemanticGraph g = *this;
  std::map<int, int> remap;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    remap[vertices_[i].id] = perm[i];
    g.vertices_[i].id = perm[i];
  }
  for (Arc& a : g.arcs_) {
    a.head = remap.at(a.head);
    a.dep = remap.at(a.dep);
  }
  return g;
}

SemanticGraph GraphFromLogicalForm(const LogicalForm& lf,
                                   std::span<const Token> sentence) {
  return GraphBuilder(sentence).Build(lf);
}

CategoryGroup ClassifyCategory(std::string_view category) {
  if (category == "obj_to_subj_pp" || category == "obj_pp_to_subj_pp") {
    return CategoryGroup::kObjToSubjPP;
  }
  if (category == "pp_recursion") return CategoryGroup::kPPRecursion;
  if (category == "cp_recursion") return CategoryGroup::kCPRecursion;
  if (category == "in_distribution" || category == "primitive" ||
      category.empty()) {
    return CategoryGroup::kInDistribution;
  }
  return CategoryGroup::kLexical;
}

std::string_view CategoryGroupName(CategoryGroup group) {
  switch (group) {
    case CategoryGroup::kInDistribution: return "in_distribution";
    case CategoryGroup::kLexical: return "lexical";
    case CategoryGroup::kObjToSubjPP: return "obj_to_subj_pp";
    case CategoryGroup::kPPRecursion: return "pp_recursion";
    case CategoryGroup::kCPRecursion: return "cp_recursion";
  }
  return "unknown";
}

std::vector<std::string> CogsExample::Words() const {
  std::vector<std::string> words;
  words.reserve(sentence.size());
  for (const Token& t : sentence) words.push_back(t.surface);
  return words;
}

std::vector<CogsExample> LoadCorpus(std::istream& in, std::string_view split) {
  std::vector<CogsExample> examples;
  std::vector<std::string> problems;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = SplitTabs(line);
    if (fields.size() != 3) {
      problems.push_back("line " + std::to_string(line_no) + ": expected 3 fields, got " +
                         std::to_string(fields.size()));
      continue;
    }
    try {
      CogsExample ex;
      ex.sentence = Tokenize(fields[0]);
      if (ex.sentence.empty()) {
        throw Error(ErrorCode::kEmptySentence, "empty sentence");
      }
      const LogicalForm lf =
          ParseLogicalForm(fields[1], static_cast<int>(ex.sentence.size()));
      ex.graph = GraphFromLogicalForm(lf, ex.sentence);
      ex.category = fields[2];
      if (ex.category.empty()) {
        throw Error(ErrorCode::kCorpusParse, "empty category");
      }
      ex.logical_form = fields[1];
      examples.push_back(std::move(ex));
    } catch (const Error& e) {
      problems.push_back("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (in.bad()) throw Error(ErrorCode::kIoError, "read failure");
  if (!problems.empty()) {
    std::string msg = std::string(split) + ": " + std::to_string(problems.size()) +
                      " malformed line(s)";
    for (const std::string& p : problems) msg += "\n  " + p;
    throw Error(ErrorCode::kCorpusParse, msg);
  }
  return examples;
}

std::vector<CogsExample> LoadCorpusFile(const std::filesystem::path& path,
                                        std::string_view split) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return LoadCorpus(in, split);
}

DevSample SampleGenDev(std::span<const CogsExample> gen, std::size_t k,
                       std::uint64_t seed) {
  if (k > gen.size()) {
    throw Error(ErrorCode::kKTooLarge, std::to_string(k) + " > " +
                                           std::to_string(gen.size()));
  }
  std::vector<std::size_t> order(gen.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates: the first k slots are the sample.
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + Bounded(rng, order.size() - i);
    std::swap(order[i], order[j]);
  }
  std::vector<bool> chosen(gen.size(), false);
  for (std::size_t i = 0; i < k; ++i) chosen[order[i]] = true;
  DevSample out;
  out.dev.reserve(k);
  out.rest.reserve(gen.size() - k);
  for (std::size_t i = 0; i < gen.size(); ++i) {
    (chosen[i] ? out.dev : out.rest).push_back(gen[i]);
  }
  return out;
}

bool GraphsEqual(const SemanticGraph& a, const SemanticGraph& b) {
  auto canonical = [](const SemanticGraph& g) {
    std::vector<std::pair<int, std::string>> vs;
    std::map<int, int> anchor_of;
    for (const Vertex& v : g.vertices()) {
      if (!v.anchor) {
        throw Error(ErrorCode::kUnanchoredVertex, "vertex " + std::to_string(v.id));
      }
      vs.emplace_back(*v.anchor, v.concept_name);
      anchor_of[v.id] = *v.anchor;
    }
    std::vector<std::tuple<int, int, std::string>> as;
    for (const Arc& arc : g.arcs()) {
      as.emplace_back(anchor_of.at(arc.head), anchor_of.at(arc.dep), arc.label);
    }
    std::sort(vs.begin(), vs.end());
    std::sort(as.begin(), as.end());
    return std::make_pair(vs, as);
  };
  return canonical(a) == canonical(b);
}

nlohmann::json GraphToJson(const SemanticGraph& graph) {
  nlohmann::json vertices = nlohmann::json::array();
  for (const Vertex& v : graph.vertices()) {
    nlohmann::json jv;
    jv["concept"] = v.concept_name;
    jv["anchor"] = v.anchor ? nlohmann::json(*v.anchor) : nlohmann::json(nullptr);
    vertices.push_back(std::move(jv));
  }
  nlohmann::json arcs = nlohmann::json::array();
  for (const Arc& a : graph.arcs()) {
    arcs.push_back({{"head", graph.IndexOf(a.head)},
                    {"dep", graph.IndexOf(a.dep)},
                    {"label", a.label}});
  }
  return {{"vertices", std::move(vertices)}, {"arcs", std::move(arcs)}};
}

SemanticGraph GraphFromJson(const nlohmann::json& j) {
  SemanticGraph g;
  for (const auto& jv : j.at("vertices")) {
    std::optional<int> anchor;
    if (!jv.at("anchor").is_null()) anchor = jv.at("anchor").get<int>();
    g.AddVertex(jv.at("concept").get<std::string>(), anchor);
  }
  for (const auto& ja : j.at("arcs")) {
    g.AddArc(ja.at("head").get<int>(), ja.at("dep").get<int>(),
             ja.at("label").get<std::string>());
  }
  return g;
}

}  // namespace semtag
