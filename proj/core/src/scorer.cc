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

#include "semtag/scorer.h"

#include <cmath>

#include <Eigen/Dense>

#include "semtag/error.h"

namespace semtag {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using MatMap = Eigen::Map<MatrixXd>;
using ConstMatMap = Eigen::Map<const MatrixXd>;

// Fixed array layout of a ParameterSet.
enum ArrayIndex {
  kEmbed,
  kFwdW, kFwdB, kBwdW, kBwdB,
  kTagW1, kTagB1, kTagW2, kTagB2,
  kSiteW1, kSiteB1, kSiteW2, kSiteB2,
  kRootW1, kRootB1, kRootW2, kRootB2,
  kArcHeadW, kArcHeadB, kArcDepW, kArcDepB, kArcU,
  kNumArrays
};

struct HeadSpec {
  ArrayIndex w1, b1, w2, b2;
  ParamGroup group;
};

constexpr HeadSpec kTagHead{kTagW1, kTagB1, kTagW2, kTagB2, ParamGroup::kTagHead};
constexpr HeadSpec kSiteHead{kSiteW1, kSiteB1, kSiteW2, kSiteB2, ParamGroup::kSiteHead};
constexpr HeadSpec kRootHead{kRootW1, kRootB1, kRootW2, kRootB2, ParamGroup::kRootHead};

ConstMatMap View(const ParameterSet& p, ArrayIndex i) {
  const NamedArray& a = p.array(i);
  return ConstMatMap(a.values.data(), a.rows, a.cols);
}

MatMap View(ParameterSet& p, ArrayIndex i) {
  NamedArray& a = p.array(i);
  return MatMap(a.values.data(), a.rows, a.cols);
}

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

MatrixXd DropoutMask(int rows, int cols, double rate, std::mt19937_64& rng) {
  MatrixXd mask(rows, cols);
  const double keep = 1.0 / (1.0 - rate);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) mask(r, c) = UniformUnit(rng) < rate ? 0.0 : keep;
  }
  return mask;
}

struct LstmCache {
  MatrixXd inputs;  // [x_t; h_prev] per column, (E+H) x n
  MatrixXd gates;   // activated [i; f; g; o], 4H x n
  MatrixXd cells;   // H x n
  MatrixXd hidden;  // H x n
};

struct HeadCache {
  MatrixXd pre;     // hidden pre-activation
  MatrixXd hidden;  // after ReLU and dropout
  MatrixXd mask;    // empty when no dropout
};

}  // namespace

struct ForwardCache {
  std::vector<int> words;
  MatrixXd embedded;  // after dropout, E x n
  MatrixXd embed_mask;
  LstmCache fwd;
  LstmCache bwd;
  MatrixXd encoded;  // after dropout, 2H x n
  MatrixXd encoded_mask;
  HeadCache tag, site, root, arc_head, arc_dep;
  MatrixXd arc_head_aug;  // (A+1) x n
  MatrixXd arc_dep_aug;
};

namespace {

MatrixXd ApplyMask(const MatrixXd& x, const MatrixXd& mask) {
  return mask.size() == 0 ? x : MatrixXd(x.cwiseProduct(mask));
}

void RunLstm(const ConstMatMap& w, const ConstMatMap& b, const MatrixXd& x,
             bool reverse, LstmCache& cache) {
  const int n = static_cast<int>(x.cols());
  const int e = static_cast<int>(x.rows());
  const int h = static_cast<int>(w.rows()) / 4;
  cache.inputs.resize(e + h, n);
  cache.gates.resize(4 * h, n);
  cache.cells.resize(h, n);
  cache.hidden.resize(h, n);
  // Input contribution for all steps at once.
  const MatrixXd wx = w.leftCols(e) * x;
  VectorXd h_prev = VectorXd::Zero(h);
  VectorXd c_prev = VectorXd::Zero(h);
  for (int s = 0; s < n; ++s) {
    const int t = reverse ? n - 1 - s : s;
    cache.inputs.col(t).head(e) = x.col(t);
    cache.inputs.col(t).tail(h) = h_prev;
    VectorXd z = wx.col(t) + w.rightCols(h) * h_prev + b.col(0);
    for (int k = 0; k < h; ++k) {
      z(k) = Sigmoid(z(k));
      z(h + k) = Sigmoid(z(h + k));
      z(2 * h + k) = std::tanh(z(2 * h + k));
      z(3 * h + k) = Sigmoid(z(3 * h + k));
    }
    VectorXd c = z.segment(h, h).cwiseProduct(c_prev) +
                 z.segment(0, h).cwiseProduct(z.segment(2 * h, h));
    VectorXd hh = z.segment(3 * h, h).cwiseProduct(c.array().tanh().matrix());
    cache.gates.col(t) = z;
    cache.cells.col(t) = c;
    cache.hidden.col(t) = hh;
    h_prev = hh;
    c_prev = c;
  }
}

// Backprop through one LSTM direction; returns d(x) (E x n) and accumulates
// into dw / db.
MatrixXd BackpropLstm(const ConstMatMap& w, const LstmCache& cache, const MatrixXd& d_hidden,
                      bool reverse, MatMap dw, MatMap db) {
  const int n = static_cast<int>(d_hidden.cols());
  const int h = static_cast<int>(w.rows()) / 4;
  const int e = static_cast<int>(cache.inputs.rows()) - h;
  MatrixXd dz(4 * h, n);
  VectorXd dh_next = VectorXd::Zero(h);
  VectorXd dc_next = VectorXd::Zero(h);
  MatrixXd dx(e, n);
  for (int s = n - 1; s >= 0; --s) {
    const int t = reverse ? n - 1 - s : s;
    const int prev = reverse ? t + 1 : t - 1;
    const bool has_prev = reverse ? t + 1 < n : t > 0;
    const auto z = cache.gates.col(t);
    const VectorXd tanh_c = cache.cells.col(t).array().tanh().matrix();
    const VectorXd dh = d_hidden.col(t) + dh_next;
    VectorXd dc = dc_next;
    for (int k = 0; k < h; ++k) {
      const double i = z(k), f = z(h + k), g = z(2 * h + k), o = z(3 * h + k);
      const double c_prev = has_prev ? cache.cells(k, prev) : 0.0;
      dc(k) += dh(k) * o * (1.0 - tanh_c(k) * tanh_c(k));
      dz(k, t) = dc(k) * g * i * (1.0 - i);
      dz(h + k, t) = dc(k) * c_prev * f * (1.0 - f);
      dz(2 * h + k, t) = dc(k) * i * (1.0 - g * g);
      dz(3 * h + k, t) = dh(k) * tanh_c(k) * o * (1.0 - o);
      dc(k) *= f;
    }
    const VectorXd d_in = w.transpose() * dz.col(t);
    dx.col(t) = d_in.head(e);
    dh_next = d_in.tail(h);
    dc_next = dc;
  }
  dw.noalias() += dz * cache.inputs.transpose();
  db.col(0) += dz.rowwise().sum();
  return dx;
}

MatrixXd RunHead(const ParameterSet& p, const HeadSpec& spec, const MatrixXd& encoded,
                 double rate, std::mt19937_64* rng, HeadCache& cache) {
  cache.pre = (View(p, spec.w1) * encoded).colwise() + View(p, spec.b1).col(0);
  MatrixXd act = cache.pre.cwiseMax(0.0);
  if (rng != nullptr && rate > 0.0) {
    cache.mask = DropoutMask(static_cast<int>(act.rows()), static_cast<int>(act.cols()), rate, *rng);
  }
  cache.hidden = ApplyMask(act, cache.mask);
  return (View(p, spec.w2) * cache.hidden).colwise() + View(p, spec.b2).col(0);
}

// Given d(output) of a head, accumulates head gradients and returns d(encoded).
MatrixXd BackpropHead(const ParameterSet& p, ParameterSet& g, const HeadSpec& spec,
                      const HeadCache& cache, const MatrixXd& encoded, const MatrixXd& d_out,
                      bool need_input_grad) {
  const bool frozen = p.frozen(spec.group);
  if (frozen && !need_input_grad) return {};
  MatrixXd d_hidden = View(p, spec.w2).transpose() * d_out;
  d_hidden = ApplyMask(d_hidden, cache.mask);
  d_hidden = d_hidden.cwiseProduct((cache.pre.array() > 0.0).cast<double>().matrix());
  if (!frozen) {
    View(g, spec.w2).noalias() += d_out * cache.hidden.transpose();
    View(g, spec.b2).col(0) += d_out.rowwise().sum();
    View(g, spec.w1).noalias() += d_hidden * encoded.transpose();
    View(g, spec.b1).col(0) += d_hidden.rowwise().sum();
  }
  if (!need_input_grad) return {};
  return View(p, spec.w1).transpose() * d_hidden;
}

void InitUniform(NamedArray& a, double bound, std::mt19937_64& rng) {
  for (double& v : a.values) v = (2.0 * UniformUnit(rng) - 1.0) * bound;
}

void InitXavier(NamedArray& a, int fan_in, int fan_out, std::mt19937_64& rng) {
  InitUniform(a, std::sqrt(6.0 / std::max(1, fan_in + fan_out)), rng);
}

}  // namespace

// ---------------------------------------------------------------------------
// Config.

void ScorerConfig::Validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidConfig, what); };
  if (embed_dim < 1) fail("embed_dim must be >= 1");
  if (lstm_hidden < 1) fail("lstm_hidden must be >= 1");
  if (tag_mlp_dim < 1) fail("tag_mlp_dim must be >= 1");
  if (supertag_mlp_dim < 1) fail("supertag_mlp_dim must be >= 1");
  if (arc_mlp_dim < 1) fail("arc_mlp_dim must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout must be in [0, 1)");
  if (!(learning_rate > 0.0)) fail("learning_rate must be > 0");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (!(unk_replace_prob >= 0.0 && unk_replace_prob <= 1.0)) {
    fail("unk_replace_prob must be in [0, 1]");
  }
}

nlohmann::json ScorerConfig::ToJson() const {
  return {{"embed_dim", embed_dim},
          {"lstm_hidden", lstm_hidden},
          {"tag_mlp_dim", tag_mlp_dim},
          {"supertag_mlp_dim", supertag_mlp_dim},
          {"arc_mlp_dim", arc_mlp_dim},
          {"dropout", dropout},
          {"learning_rate", learning_rate},
          {"batch_size", batch_size},
          {"seed", seed},
          {"adam_beta1", adam_beta1},
          {"adam_beta2", adam_beta2},
          {"adam_epsilon", adam_epsilon},
          {"unk_replace_prob", unk_replace_prob}};
}

ScorerConfig ScorerConfig::FromJson(const nlohmann::json& j) {
  ScorerConfig c;
  c.embed_dim = j.value("embed_dim", c.embed_dim);
  c.lstm_hidden = j.value("lstm_hidden", c.lstm_hidden);
  c.tag_mlp_dim = j.value("tag_mlp_dim", c.tag_mlp_dim);
  c.supertag_mlp_dim = j.value("supertag_mlp_dim", c.supertag_mlp_dim);
  c.arc_mlp_dim = j.value("arc_mlp_dim", c.arc_mlp_dim);
  c.dropout = j.value("dropout", c.dropout);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.seed = j.value("seed", c.seed);
  c.adam_beta1 = j.value("adam_beta1", c.adam_beta1);
  c.adam_beta2 = j.value("adam_beta2", c.adam_beta2);
  c.adam_epsilon = j.value("adam_epsilon", c.adam_epsilon);
  c.unk_replace_prob = j.value("unk_replace_prob", c.unk_replace_prob);
  return c;
}

std::string_view ParamGroupName(ParamGroup group) {
  switch (group) {
    case ParamGroup::kEncoder: return "encoder";
    case ParamGroup::kTagHead: return "tag";
    case ParamGroup::kSiteHead: return "site";
    case ParamGroup::kRootHead: return "root";
    case ParamGroup::kArcHead: return "arc";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// ParameterSet.

ParameterSet::ParameterSet(ScorerConfig config, ModelSizes sizes)
    : config_(config), sizes_(sizes) {
  const int e = config.embed_dim, h = config.lstm_hidden, enc = 2 * h;
  const int mt = config.tag_mlp_dim, ms = config.supertag_mlp_dim, ma = config.arc_mlp_dim;
  auto add = [&](const char* name, ParamGroup g, int rows, int cols) {
    arrays_.push_back({name, g, rows, cols,
                       std::vector<double>(static_cast<std::size_t>(rows) * cols, 0.0)});
  };
  using G = ParamGroup;
  add("embedding", G::kEncoder, e, sizes.vocab);
  add("lstm_fwd_w", G::kEncoder, 4 * h, e + h);
  add("lstm_fwd_b", G::kEncoder, 4 * h, 1);
  add("lstm_bwd_w", G::kEncoder, 4 * h, e + h);
  add("lstm_bwd_b", G::kEncoder, 4 * h, 1);
  add("tag_w1", G::kTagHead, mt, enc);
  add("tag_b1", G::kTagHead, mt, 1);
  add("tag_w2", G::kTagHead, sizes.concepts - 1, mt);
  add("tag_b2", G::kTagHead, sizes.concepts - 1, 1);
  add("site_w1", G::kSiteHead, ms, enc);
  add("site_b1", G::kSiteHead, ms, 1);
  add("site_w2", G::kSiteHead, sizes.sites, ms);
  add("site_b2", G::kSiteHead, sizes.sites, 1);
  add("root_w1", G::kRootHead, ms, enc);
  add("root_b1", G::kRootHead, ms, 1);
  add("root_w2", G::kRootHead, sizes.roots, ms);
  add("root_b2", G::kRootHead, sizes.roots, 1);
  add("arc_head_w", G::kArcHead, ma, enc);
  add("arc_head_b", G::kArcHead, ma, 1);
  add("arc_dep_w", G::kArcHead, ma, enc);
  add("arc_dep_b", G::kArcHead, ma, 1);
  add("arc_biaffine", G::kArcHead, ma + 1, (ma + 1) * sizes.labels);
}

const NamedArray& ParameterSet::Find(std::string_view name) const {
  for (const NamedArray& a : arrays_) {
    if (a.name == name) return a;
  }
  throw Error(ErrorCode::kUnknownSymbol, "parameter array " + std::string(name));
}

std::size_t ParameterSet::TotalSize() const {
  std::size_t total = 0;
  for (const NamedArray& a : arrays_) total += a.size();
  return total;
}

double& ParameterSet::Scalar(std::size_t flat_index) {
  for (NamedArray& a : arrays_) {
    if (flat_index < a.size()) return a.values[flat_index];
    flat_index -= a.size();
  }
  throw Error(ErrorCode::kShapeMismatch, "flat parameter index out of range");
}

double ParameterSet::Scalar(std::size_t flat_index) const {
  return const_cast<ParameterSet*>(this)->Scalar(flat_index);
}

std::vector<std::string> ParameterSet::FrozenNames() const {
  std::vector<std::string> out;
  for (int g = 0; g < kNumParamGroups; ++g) {
    if (frozen_[g]) out.emplace_back(ParamGroupName(static_cast<ParamGroup>(g)));
  }
  return out;
}

ParameterSet ParameterSet::ZerosLike() const {
  ParameterSet z = *this;
  z.SetZero();
  return z;
}

void ParameterSet::SetZero() {
  for (NamedArray& a : arrays_) std::fill(a.values.begin(), a.values.end(), 0.0);
}

void ParameterSet::Add(const ParameterSet& other, double scale) {
  for (std::size_t i = 0; i < arrays_.size(); ++i) {
    auto& dst = arrays_[i].values;
    const auto& src = other.arrays_[i].values;
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += scale * src[k];
  }
}

bool ParameterSet::AllFinite() const {
  for (const NamedArray& a : arrays_) {
    for (double v : a.values) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

bool ParameterSet::operator==(const ParameterSet& other) const {
  if (!(sizes_ == other.sizes_) || arrays_.size() != other.arrays_.size()) return false;
  for (std::size_t i = 0; i < arrays_.size(); ++i) {
    if (arrays_[i].values != other.arrays_[i].values) return false;
  }
  return true;
}

std::size_t ExpectedParameterCount(const ScorerConfig& c, const ModelSizes& s) {
  const std::size_t e = c.embed_dim, h = c.lstm_hidden, enc = 2 * h;
  const std::size_t mt = c.tag_mlp_dim, ms = c.supertag_mlp_dim, ma = c.arc_mlp_dim;
  const std::size_t t1 = s.concepts - 1;
  return s.vocab * e                                     // embedding
         + 2 * (4 * h * (e + h) + 4 * h)                 // BiLSTM
         + (mt * enc + mt) + (t1 * mt + t1)              // tag head
         + (ms * enc + ms) + (s.sites * ms + s.sites)    // site head
         + (ms * enc + ms) + (s.roots * ms + s.roots)    // root head
         + 2 * (ma * enc + ma)                           // arc projections
         + s.labels * (ma + 1) * (ma + 1);               // biaffine
}

ParameterSet ScorerInit(const ScorerConfig& config, const ModelSizes& sizes) {
  config.Validate();
  if (sizes.vocab < 1 || sizes.concepts < 1 || sizes.sites < 1 || sizes.roots < 1 ||
      sizes.labels < 0) {
    throw Error(ErrorCode::kInvalidConfig, "vocabulary sizes must be positive");
  }
  ParameterSet p(config, sizes);
  std::mt19937_64 rng(config.seed);
  const int h = config.lstm_hidden;
  for (int i = 0; i < kNumArrays; ++i) {
    NamedArray& a = p.array(i);
    switch (i) {
      case kEmbed:
        InitUniform(a, std::sqrt(3.0 / config.embed_dim), rng);
        break;
      case kFwdW:
      case kBwdW:
        InitXavier(a, a.cols, h, rng);
        break;
      case kFwdB:
      case kBwdB:
        // Forget-gate bias starts at 1.
        for (int k = h; k < 2 * h; ++k) a.values[k] = 1.0;
        break;
      case kArcU:
        InitXavier(a, a.rows, a.rows, rng);
        break;
      default:
        if (a.cols > 1) InitXavier(a, a.cols, a.rows, rng);
        break;
    }
  }
  return p;
}

ScoreTables ScoreTables::Zeros(int n, const ModelSizes& sizes) {
  return {Matrix(n, sizes.concepts), Matrix(n, sizes.sites), Matrix(n, sizes.roots),
          Tensor3(n, n, sizes.labels)};
}

// ---------------------------------------------------------------------------
// Forward.

ForwardPass ScorerForward(const ParameterSet& p, std::span<const int> word_ids,
                          ForwardMode mode, std::mt19937_64* rng) {
  const int n = static_cast<int>(word_ids.size());
  if (n == 0) throw Error(ErrorCode::kEmptySentence, "cannot score an empty sentence");
  const ScorerConfig& cfg = p.config();
  const ModelSizes& sizes = p.sizes();
  const double rate = mode == ForwardMode::kTrain ? cfg.dropout : 0.0;
  if (rate > 0.0 && rng == nullptr) {
    throw Error(ErrorCode::kInvalidConfig, "training-mode forward needs a random generator");
  }
  std::mt19937_64* drop_rng = rate > 0.0 ? rng : nullptr;

  auto cache = std::make_shared<ForwardCache>();
  cache->words.assign(word_ids.begin(), word_ids.end());

  const ConstMatMap embed = View(p, kEmbed);
  MatrixXd x(cfg.embed_dim, n);
  for (int t = 0; t < n; ++t) {
    const int w = word_ids[t];
    if (w < 0 || w >= sizes.vocab) throw Error(ErrorCode::kShapeMismatch, "word id out of range");
    x.col(t) = embed.col(w);
  }
  if (drop_rng) cache->embed_mask = DropoutMask(cfg.embed_dim, n, rate, *drop_rng);
  cache->embedded = ApplyMask(x, cache->embed_mask);

  RunLstm(View(p, kFwdW), View(p, kFwdB), cache->embedded, false, cache->fwd);
  RunLstm(View(p, kBwdW), View(p, kBwdB), cache->embedded, true, cache->bwd);
  MatrixXd enc(2 * cfg.lstm_hidden, n);
  enc.topRows(cfg.lstm_hidden) = cache->fwd.hidden;
  enc.bottomRows(cfg.lstm_hidden) = cache->bwd.hidden;
  if (drop_rng) cache->encoded_mask = DropoutMask(2 * cfg.lstm_hidden, n, rate, *drop_rng);
  cache->encoded = ApplyMask(enc, cache->encoded_mask);

  ScoreTables tables = ScoreTables::Zeros(n, sizes);
  const MatrixXd tag = RunHead(p, kTagHead, cache->encoded, rate, drop_rng, cache->tag);
  const MatrixXd site = RunHead(p, kSiteHead, cache->encoded, rate, drop_rng, cache->site);
  const MatrixXd root = RunHead(p, kRootHead, cache->encoded, rate, drop_rng, cache->root);
  for (int i = 0; i < n; ++i) {
    for (int t = 1; t < sizes.concepts; ++t) tables.lambda(i, t) = tag(t - 1, i);
    for (int s = 0; s < sizes.sites; ++s) tables.phi_minus(i, s) = site(s, i);
    for (int r = 0; r < sizes.roots; ++r) tables.phi_plus(i, r) = root(r, i);
  }

  // Arc projections and the biaffine form.
  const int ma = cfg.arc_mlp_dim;
  auto project = [&](ArrayIndex w, ArrayIndex b, HeadCache& hc) {
    hc.pre = (View(p, w) * cache->encoded).colwise() + View(p, b).col(0);
    MatrixXd act = hc.pre.cwiseMax(0.0);
    if (drop_rng) hc.mask = DropoutMask(ma, n, rate, *drop_rng);
    hc.hidden = ApplyMask(act, hc.mask);
    MatrixXd aug(ma + 1, n);
    aug.topRows(ma) = hc.hidden;
    aug.row(ma).setOnes();
    return aug;
  };
  cache->arc_head_aug = project(kArcHeadW, kArcHeadB, cache->arc_head);
  cache->arc_dep_aug = project(kArcDepW, kArcDepB, cache->arc_dep);
  const ConstMatMap u = View(p, kArcU);
  for (int l = 0; l < sizes.labels; ++l) {
    const MatrixXd scores =
        cache->arc_head_aug.transpose() * u.middleCols(l * (ma + 1), ma + 1) * cache->arc_dep_aug;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i != j) tables.mu(i, j, l) = scores(i, j);
      }
    }
  }

  return {std::move(tables), std::move(cache)};
}

// ---------------------------------------------------------------------------
// Backward.

ParameterSet ScorerBackward(const ParameterSet& p, const ForwardPass& pass,
                            const ScoreTables& upstream) {
  const ForwardCache& cache = *pass.cache;
  const ModelSizes& sizes = p.sizes();
  const ScorerConfig& cfg = p.config();
  const int n = static_cast<int>(cache.words.size());
  if (upstream.lambda.rows() != n || upstream.lambda.cols() != sizes.concepts ||
      upstream.phi_minus.rows() != n || upstream.phi_minus.cols() != sizes.sites ||
      upstream.phi_plus.rows() != n || upstream.phi_plus.cols() != sizes.roots ||
      upstream.mu.dim0() != n || upstream.mu.dim1() != n || upstream.mu.dim2() != sizes.labels) {
    throw Error(ErrorCode::kShapeMismatch, "upstream gradient shapes");
  }
  ParameterSet g = p.ZerosLike();
  const bool train_encoder = !p.frozen(ParamGroup::kEncoder);
  MatrixXd d_enc = MatrixXd::Zero(2 * cfg.lstm_hidden, n);

  // Dense heads.
  MatrixXd d_tag(sizes.concepts - 1, n), d_site(sizes.sites, n), d_root(sizes.roots, n);
  for (int i = 0; i < n; ++i) {
    for (int t = 1; t < sizes.concepts; ++t) d_tag(t - 1, i) = upstream.lambda(i, t);
    for (int s = 0; s < sizes.sites; ++s) d_site(s, i) = upstream.phi_minus(i, s);
    for (int r = 0; r < sizes.roots; ++r) d_root(r, i) = upstream.phi_plus(i, r);
  }
  const HeadSpec* specs[] = {&kTagHead, &kSiteHead, &kRootHead};
  const HeadCache* caches[] = {&cache.tag, &cache.site, &cache.root};
  const MatrixXd* grads[] = {&d_tag, &d_site, &d_root};
  for (int k = 0; k < 3; ++k) {
    MatrixXd de = BackpropHead(p, g, *specs[k], *caches[k], cache.encoded, *grads[k],
                               train_encoder);
    if (train_encoder) d_enc += de;
  }

  // Biaffine arcs.
  const bool arc_frozen = p.frozen(ParamGroup::kArcHead);
  if (!arc_frozen || train_encoder) {
    const int ma = cfg.arc_mlp_dim;
    const ConstMatMap u = View(p, kArcU);
    MatMap du = View(g, kArcU);
    MatrixXd d_head_aug = MatrixXd::Zero(ma + 1, n);
    MatrixXd d_dep_aug = MatrixXd::Zero(ma + 1, n);
    MatrixXd gl(n, n);
    for (int l = 0; l < sizes.labels; ++l) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) gl(i, j) = i == j ? 0.0 : upstream.mu(i, j, l);
      }
      const auto ul = u.middleCols(l * (ma + 1), ma + 1);
      if (!arc_frozen) {
        du.middleCols(l * (ma + 1), ma + 1).noalias() +=
            cache.arc_head_aug * gl * cache.arc_dep_aug.transpose();
      }
      d_head_aug.noalias() += ul * cache.arc_dep_aug * gl.transpose();
      d_dep_aug.noalias() += ul.transpose() * cache.arc_head_aug * gl;
    }
    auto back_projection = [&](const HeadCache& hc, const MatrixXd& d_aug, ArrayIndex w,
                               ArrayIndex b) {
      MatrixXd dh = ApplyMask(MatrixXd(d_aug.topRows(ma)), hc.mask);
      dh = dh.cwiseProduct((hc.pre.array() > 0.0).cast<double>().matrix());
      if (!arc_frozen) {
        View(g, w).noalias() += dh * cache.encoded.transpose();
        View(g, b).col(0) += dh.rowwise().sum();
      }
      if (train_encoder) d_enc.noalias() += View(p, w).transpose() * dh;
    };
    back_projection(cache.arc_head, d_head_aug, kArcHeadW, kArcHeadB);
    back_projection(cache.arc_dep, d_dep_aug, kArcDepW, kArcDepB);
  }

  if (!train_encoder) return g;

  // Encoder.
  d_enc = ApplyMask(d_enc, cache.encoded_mask);
  const int h = cfg.lstm_hidden;
  MatrixXd dx = BackpropLstm(View(p, kFwdW), cache.fwd, d_enc.topRows(h), false,
                             View(g, kFwdW), View(g, kFwdB));
  dx += BackpropLstm(View(p, kBwdW), cache.bwd, d_enc.bottomRows(h), true,
                     View(g, kBwdW), View(g, kBwdB));
  dx = ApplyMask(dx, cache.embed_mask);
  MatMap de = View(g, kEmbed);
  for (int t = 0; t < n; ++t) de.col(cache.words[t]) += dx.col(t);
  return g;
}

// ---------------------------------------------------------------------------
// Adam.

AdamOptimizer::AdamOptimizer(const ParameterSet& params) {
  for (const NamedArray& a : params.arrays()) {
    m_.emplace_back(a.size(), 0.0);
    v_.emplace_back(a.size(), 0.0);
  }
}

void AdamOptimizer::Step(ParameterSet& params, const ParameterSet& grads) {
  const ScorerConfig& c = params.config();
  ++step_;
  const double b1 = c.adam_beta1, b2 = c.adam_beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  for (std::size_t i = 0; i < params.arrays().size(); ++i) {
    NamedArray& a = params.array(static_cast<int>(i));
    if (params.frozen(a.group)) continue;
    const auto& gv = grads.array(static_cast<int>(i)).values;
    auto& m = m_[i];
    auto& v = v_[i];
    for (std::size_t k = 0; k < a.size(); ++k) {
      m[k] = b1 * m[k] + (1.0 - b1) * gv[k];
      v[k] = b2 * v[k] + (1.0 - b2) * gv[k] * gv[k];
      const double mhat = m[k] / correction1;
      const double vhat = v[k] / correction2;
      a.values[k] -= c.learning_rate * mhat / (std::sqrt(vhat) + c.adam_epsilon);
    }
  }
}

}  // namespace semtag
