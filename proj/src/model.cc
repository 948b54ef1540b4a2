// Copyright 2026 The xlet Authors.
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

#include "xlet/model.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "xlet/random.h"

namespace xlet {
namespace {

constexpr double kLayerNormEpsilon = 1e-5;
constexpr char kCheckpointMagic[] = "XLETCKPT";
constexpr uint32_t kCheckpointVersion = 1;

// Layer normalization over the rows of x.
Matrix LayerNorm(const Matrix &x, const ConstVectorMap &gain,
                 const ConstVectorMap &bias, Matrix *xhat, Vector *rstd) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  xhat->resize(n, d);
  rstd->resize(n);
  Matrix y(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    double mean = x.row(i).mean();
    double var = (x.row(i).array() - mean).square().mean();
    double r = 1.0 / std::sqrt(var + kLayerNormEpsilon);
    (*rstd)(i) = r;
    xhat->row(i) = (x.row(i).array() - mean) * r;
    y.row(i) = xhat->row(i).array() * gain.transpose().array() +
               bias.transpose().array();
  }
  return y;
}

// Adds the input gradient into *dx and the parameter gradients into dgain and
// dbias.
void LayerNormBackward(const Matrix &dy, const Matrix &xhat, const Vector &rstd,
                       const ConstVectorMap &gain, VectorMap dgain,
                       VectorMap dbias, Matrix *dx) {
  const Eigen::Index n = dy.rows();
  const double d = static_cast<double>(dy.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    dgain += (dy.row(i).array() * xhat.row(i).array()).matrix().transpose();
    dbias += dy.row(i).transpose();
    Eigen::RowVectorXd dxhat =
        (dy.row(i).array() * gain.transpose().array()).matrix();
    double mean_dxhat = dxhat.sum() / d;
    double mean_dxhat_xhat = dxhat.dot(xhat.row(i)) / d;
    dx->row(i).array() +=
        rstd(i) * (dxhat.array() - mean_dxhat -
                   xhat.row(i).array() * mean_dxhat_xhat);
  }
}

double Gelu(double x) { return 0.5 * x * (1.0 + std::erf(x * M_SQRT1_2)); }

double GeluDerivative(double x) {
  static const double kInvSqrt2Pi = 0.5 * M_2_SQRTPI * M_SQRT1_2;
  return 0.5 * (1.0 + std::erf(x * M_SQRT1_2)) +
         x * std::exp(-0.5 * x * x) * kInvSqrt2Pi;
}

struct LayerCache {
  Matrix xhat1;
  Vector rstd1;
  Matrix a;  // ln1 output
  Matrix q, k, v;
  std::vector<Matrix> probs;  // per head, n x n
  Matrix o;                   // concatenated head outputs
  Matrix xhat2;
  Vector rstd2;
  Matrix b;  // ln2 output
  Matrix pre;  // b w1 + b1
  Matrix act;  // gelu(pre)
};

struct ForwardCache {
  std::vector<LayerCache> layers;
  Matrix xhat_final;
  Vector rstd_final;
  Vector h;
};

void CheckInput(const InputSequence &x, const ModelConfig &config) {
  if (x.ids.empty() || x.ids.size() != x.segments.size()) {
    throw ValidationError("malformed input sequence");
  }
  if (static_cast<int64_t>(x.ids.size()) > config.cap) {
    throw OversizeError("input of length " + std::to_string(x.ids.size()) +
                        " exceeds cap " + std::to_string(config.cap));
  }
  for (size_t i = 0; i < x.ids.size(); ++i) {
    if (x.ids[i] < 0 || x.ids[i] >= config.vocab_size || x.segments[i] > 1) {
      throw ValidationError("input id outside the vocabulary");
    }
  }
}

Vector Forward(const InputSequence &x, const ModelParams &params,
               ForwardCache *cache) {
  const ModelConfig &cfg = params.config();
  const ParamLayout &layout = params.layout();
  CheckInput(x, cfg);
  const auto n = static_cast<Eigen::Index>(x.ids.size());
  const Eigen::Index d = cfg.dim;
  const Eigen::Index head_dim = d / cfg.heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));

  ConstMatrixMap tok = params.Mat(*layout.token_embedding);
  ConstMatrixMap pos = params.Mat(*layout.position_embedding);
  ConstMatrixMap seg = params.Mat(*layout.segment_embedding);
  Matrix hidden(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    hidden.row(i) = tok.row(x.ids[i]) + pos.row(i) + seg.row(x.segments[i]);
  }

  if (cache != nullptr) cache->layers.resize(cfg.layers);
  LayerCache scratch;
  for (int32_t l = 0; l < cfg.layers; ++l) {
    const ParamLayout::LayerBlocks &lb = layout.Layer(l);
    LayerCache &c = cache != nullptr ? cache->layers[l] : scratch;

    c.a = LayerNorm(hidden, params.Vec(*lb.ln1_gain), params.Vec(*lb.ln1_bias),
                    &c.xhat1, &c.rstd1);
    c.q.noalias() = c.a * params.Mat(*lb.wq);
    c.q.rowwise() += params.Vec(*lb.bq).transpose();
    c.k.noalias() = c.a * params.Mat(*lb.wk);
    c.k.rowwise() += params.Vec(*lb.bk).transpose();
    c.v.noalias() = c.a * params.Mat(*lb.wv);
    c.v.rowwise() += params.Vec(*lb.bv).transpose();

    c.probs.resize(cfg.heads);
    c.o.resize(n, d);
    for (int32_t h = 0; h < cfg.heads; ++h) {
      const Eigen::Index col = h * head_dim;
      Matrix &p = c.probs[h];
      p.noalias() = c.q.middleCols(col, head_dim) *
                    c.k.middleCols(col, head_dim).transpose();
      p *= scale;
      for (Eigen::Index i = 0; i < n; ++i) {
        double max = p.row(i).maxCoeff();
        p.row(i) = (p.row(i).array() - max).exp();
        p.row(i) /= p.row(i).sum();
      }
      c.o.middleCols(col, head_dim).noalias() =
          p * c.v.middleCols(col, head_dim);
    }
    hidden.noalias() += c.o * params.Mat(*lb.wo);
    hidden.rowwise() += params.Vec(*lb.bo).transpose();

    c.b = LayerNorm(hidden, params.Vec(*lb.ln2_gain), params.Vec(*lb.ln2_bias),
                    &c.xhat2, &c.rstd2);
    c.pre.noalias() = c.b * params.Mat(*lb.w1);
    c.pre.rowwise() += params.Vec(*lb.b1).transpose();
    c.act = c.pre.unaryExpr([](double v) { return Gelu(v); });
    hidden.noalias() += c.act * params.Mat(*lb.w2);
    hidden.rowwise() += params.Vec(*lb.b2).transpose();
  }

  Matrix xhat;
  Vector rstd;
  Matrix out = LayerNorm(hidden, params.Vec(*layout.final_gain),
                         params.Vec(*layout.final_bias), &xhat, &rstd);
  Vector h = out.row(0).transpose();
  if (cache != nullptr) {
    cache->xhat_final = std::move(xhat);
    cache->rstd_final = std::move(rstd);
    cache->h = h;
  }
  return h;
}

void Backward(const InputSequence &x, const ModelParams &params,
              const ForwardCache &cache, const Vector &dscores,
              std::vector<double> *grad_values) {
  const ModelConfig &cfg = params.config();
  const ParamLayout &layout = params.layout();
  const auto n = static_cast<Eigen::Index>(x.ids.size());
  const Eigen::Index d = cfg.dim;
  const Eigen::Index head_dim = d / cfg.heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));

  double *g = grad_values->data();
  auto gmat = [&](const ParamBlock *b) {
    return MatrixMap(g + b->offset, b->rows, b->cols);
  };
  auto gvec = [&](const ParamBlock *b) {
    return VectorMap(g + b->offset, b->size());
  };

  // Scores = T^T h.
  ConstMatrixMap types = params.Mat(*layout.type_matrix);
  gmat(layout.type_matrix).noalias() += cache.h * dscores.transpose();
  Vector dh = types * dscores;

  // Only the CLS row of the final layer feeds the scores.
  Matrix dout = Matrix::Zero(n, d);
  dout.row(0) = dh.transpose();
  Matrix dhidden = Matrix::Zero(n, d);
  LayerNormBackward(dout, cache.xhat_final, cache.rstd_final,
                    params.Vec(*layout.final_gain), gvec(layout.final_gain),
                    gvec(layout.final_bias), &dhidden);

  for (int32_t l = cfg.layers - 1; l >= 0; --l) {
    const ParamLayout::LayerBlocks &lb = layout.Layer(l);
    const LayerCache &c = cache.layers[l];

    // Feed-forward block; dhidden flows through the residual unchanged.
    gmat(lb.w2).noalias() += c.act.transpose() * dhidden;
    gvec(lb.b2) += dhidden.colwise().sum().transpose();
    Matrix dact = dhidden * params.Mat(*lb.w2).transpose();
    Matrix dpre = dact.cwiseProduct(
        c.pre.unaryExpr([](double v) { return GeluDerivative(v); }));
    gmat(lb.w1).noalias() += c.b.transpose() * dpre;
    gvec(lb.b1) += dpre.colwise().sum().transpose();
    Matrix db = dpre * params.Mat(*lb.w1).transpose();
    LayerNormBackward(db, c.xhat2, c.rstd2, params.Vec(*lb.ln2_gain),
                      gvec(lb.ln2_gain), gvec(lb.ln2_bias), &dhidden);

    // Attention block.
    gmat(lb.wo).noalias() += c.o.transpose() * dhidden;
    gvec(lb.bo) += dhidden.colwise().sum().transpose();
    Matrix dO = dhidden * params.Mat(*lb.wo).transpose();
    Matrix dq(n, d), dk(n, d), dv(n, d);
    for (int32_t h = 0; h < cfg.heads; ++h) {
      const Eigen::Index col = h * head_dim;
      const Matrix &p = c.probs[h];
      auto dO_h = dO.middleCols(col, head_dim);
      Matrix dp = dO_h * c.v.middleCols(col, head_dim).transpose();
      dv.middleCols(col, head_dim).noalias() = p.transpose() * dO_h;
      // Softmax backward, row by row.
      Matrix ds(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        double dot = dp.row(i).dot(p.row(i));
        ds.row(i) = p.row(i).array() * (dp.row(i).array() - dot);
      }
      ds *= scale;
      dq.middleCols(col, head_dim).noalias() =
          ds * c.k.middleCols(col, head_dim);
      dk.middleCols(col, head_dim).noalias() =
          ds.transpose() * c.q.middleCols(col, head_dim);
    }
    gmat(lb.wq).noalias() += c.a.transpose() * dq;
    gvec(lb.bq) += dq.colwise().sum().transpose();
    gmat(lb.wk).noalias() += c.a.transpose() * dk;
    gvec(lb.bk) += dk.colwise().sum().transpose();
    gmat(lb.wv).noalias() += c.a.transpose() * dv;
    gvec(lb.bv) += dv.colwise().sum().transpose();
    Matrix da = dq * params.Mat(*lb.wq).transpose();
    da.noalias() += dk * params.Mat(*lb.wk).transpose();
    da.noalias() += dv * params.Mat(*lb.wv).transpose();
    LayerNormBackward(da, c.xhat1, c.rstd1, params.Vec(*lb.ln1_gain),
                      gvec(lb.ln1_gain), gvec(lb.ln1_bias), &dhidden);
  }

  MatrixMap dtok = gmat(layout.token_embedding);
  MatrixMap dpos = gmat(layout.position_embedding);
  MatrixMap dseg = gmat(layout.segment_embedding);
  for (Eigen::Index i = 0; i < n; ++i) {
    dtok.row(x.ids[i]) += dhidden.row(i);
    dpos.row(i) += dhidden.row(i);
    dseg.row(x.segments[i]) += dhidden.row(i);
  }
}

template <typename T>
void PutLe(std::string *out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes, bytes + sizeof(T));
  }
  out->append(reinterpret_cast<const char *>(bytes), sizeof(T));
}

template <typename T>
T GetLe(const std::string &in, size_t *pos) {
  if (*pos + sizeof(T) > in.size()) {
    throw ParseError("checkpoint truncated");
  }
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, in.data() + *pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes, bytes + sizeof(T));
  }
  *pos += sizeof(T);
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

void ModelConfig::Validate() const {
  if (dim < 1 || layers < 0 || heads < 1 || ffn_dim < 1 || cap < 3 ||
      num_types < 0) {
    throw ConfigError("model dimensions must be positive");
  }
  if (dim % heads != 0) {
    throw ConfigError("dim " + std::to_string(dim) +
                      " is not divisible by heads " + std::to_string(heads));
  }
  if (vocab_size < SubwordVocab::kFirstMerge) {
    throw ConfigError("vocab_size below the byte-fallback minimum");
  }
}

ParamLayout::ParamLayout(const ModelConfig &config) {
  config.Validate();
  const int32_t d = config.dim;
  Add("token_embedding", config.vocab_size, d, ParamGroup::kEncoder, true);
  Add("position_embedding", config.cap, d, ParamGroup::kEncoder, true);
  Add("segment_embedding", 2, d, ParamGroup::kEncoder, true);
  for (int32_t l = 0; l < config.layers; ++l) {
    std::string p = "layer" + std::to_string(l) + ".";
    Add(p + "ln1.gain", d, 1, ParamGroup::kEncoder, false);
    Add(p + "ln1.bias", d, 1, ParamGroup::kEncoder, false);
    for (const char *name : {"q", "k", "v", "o"}) {
      Add(p + "w" + name, d, d, ParamGroup::kEncoder, true);
      Add(p + "b" + name, d, 1, ParamGroup::kEncoder, false);
    }
    Add(p + "ln2.gain", d, 1, ParamGroup::kEncoder, false);
    Add(p + "ln2.bias", d, 1, ParamGroup::kEncoder, false);
    Add(p + "w1", d, config.ffn_dim, ParamGroup::kEncoder, true);
    Add(p + "b1", config.ffn_dim, 1, ParamGroup::kEncoder, false);
    Add(p + "w2", config.ffn_dim, d, ParamGroup::kEncoder, true);
    Add(p + "b2", d, 1, ParamGroup::kEncoder, false);
  }
  Add("final_ln.gain", d, 1, ParamGroup::kEncoder, false);
  Add("final_ln.bias", d, 1, ParamGroup::kEncoder, false);
  Add("type_matrix", d, config.num_types, ParamGroup::kTypeMatrix, true);

  token_embedding = &Block("token_embedding");
  position_embedding = &Block("position_embedding");
  segment_embedding = &Block("segment_embedding");
  final_gain = &Block("final_ln.gain");
  final_bias = &Block("final_ln.bias");
  type_matrix = &Block("type_matrix");
  for (int32_t l = 0; l < config.layers; ++l) {
    std::string p = "layer" + std::to_string(l) + ".";
    LayerBlocks lb;
    lb.ln1_gain = &Block(p + "ln1.gain");
    lb.ln1_bias = &Block(p + "ln1.bias");
    lb.wq = &Block(p + "wq");
    lb.bq = &Block(p + "bq");
    lb.wk = &Block(p + "wk");
    lb.bk = &Block(p + "bk");
    lb.wv = &Block(p + "wv");
    lb.bv = &Block(p + "bv");
    lb.wo = &Block(p + "wo");
    lb.bo = &Block(p + "bo");
    lb.ln2_gain = &Block(p + "ln2.gain");
    lb.ln2_bias = &Block(p + "ln2.bias");
    lb.w1 = &Block(p + "w1");
    lb.b1 = &Block(p + "b1");
    lb.w2 = &Block(p + "w2");
    lb.b2 = &Block(p + "b2");
    layers_.push_back(lb);
  }
}

void ParamLayout::Add(const std::string &name, int32_t rows, int32_t cols,
                      ParamGroup group, bool decay) {
  ParamBlock block;
  block.name = name;
  block.offset = total_;
  block.rows = rows;
  block.cols = cols;
  block.group = group;
  block.decay = decay;
  total_ += block.size();
  blocks_.push_back(std::move(block));
}

const ParamBlock &ParamLayout::Block(const std::string &name) const {
  for (const ParamBlock &block : blocks_) {
    if (block.name == name) return block;
  }
  throw LookupError("no parameter block named " + name);
}

ModelParams::ModelParams(const ModelConfig &config)
    : config_(config), layout_(config), values_(layout_.total(), 0.0) {}

ModelParams ModelParams::Init(const ModelConfig &config, uint64_t seed,
                              double init_scale) {
  ModelParams params(config);
  Rng rng(seed);
  for (const ParamBlock &block : params.layout_.blocks()) {
    double *v = params.values_.data() + block.offset;
    bool is_gain = block.name.size() > 5 &&
                   block.name.compare(block.name.size() - 5, 5, ".gain") == 0;
    for (int64_t i = 0; i < block.size(); ++i) {
      if (is_gain) {
        v[i] = 1.0;
      } else if (block.decay) {
        v[i] = init_scale * rng.Normal();
      } else {
        v[i] = 0.0;
      }
    }
  }
  // The padding row never appears in an input.
  params.Mat(*params.layout_.token_embedding).row(SubwordVocab::kPad).setZero();
  return params;
}

MatrixMap ModelParams::Mat(const ParamBlock &block) {
  return MatrixMap(values_.data() + block.offset, block.rows, block.cols);
}

ConstMatrixMap ModelParams::Mat(const ParamBlock &block) const {
  return ConstMatrixMap(values_.data() + block.offset, block.rows, block.cols);
}

VectorMap ModelParams::Vec(const ParamBlock &block) {
  return VectorMap(values_.data() + block.offset, block.size());
}

ConstVectorMap ModelParams::Vec(const ParamBlock &block) const {
  return ConstVectorMap(values_.data() + block.offset, block.size());
}

bool ModelParams::AllFinite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::string ModelParams::Serialize(const std::string &vocab_hash) const {
  std::string out(kCheckpointMagic, 8);
  PutLe<uint32_t>(&out, kCheckpointVersion);
  for (int32_t v : {config_.dim, config_.layers, config_.heads,
                    config_.ffn_dim, config_.num_types, config_.cap,
                    config_.vocab_size}) {
    PutLe<uint32_t>(&out, static_cast<uint32_t>(v));
  }
  PutLe<uint32_t>(&out, static_cast<uint32_t>(vocab_hash.size()));
  out += vocab_hash;
  PutLe<uint64_t>(&out, static_cast<uint64_t>(values_.size()));
  for (double v : values_) PutLe<double>(&out, v);
  return out;
}

void ModelParams::Save(const std::string &path,
                       const std::string &vocab_hash) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << Serialize(vocab_hash);
}

ModelParams ModelParams::Deserialize(const std::string &bytes,
                                     const std::string &expected_vocab_hash) {
  if (bytes.size() < 12 || bytes.compare(0, 8, kCheckpointMagic) != 0) {
    throw ValidationError("not an xlet checkpoint");
  }
  size_t pos = 8;
  auto version = GetLe<uint32_t>(bytes, &pos);
  if (version != kCheckpointVersion) {
    throw ValidationError("checkpoint version mismatch: expected " +
                          std::to_string(kCheckpointVersion) + ", found " +
                          std::to_string(version));
  }
  ModelConfig config;
  for (int32_t *field : {&config.dim, &config.layers, &config.heads,
                         &config.ffn_dim, &config.num_types, &config.cap,
                         &config.vocab_size}) {
    *field = static_cast<int32_t>(GetLe<uint32_t>(bytes, &pos));
  }
  auto hash_size = GetLe<uint32_t>(bytes, &pos);
  if (pos + hash_size > bytes.size()) throw ParseError("checkpoint truncated");
  std::string hash = bytes.substr(pos, hash_size);
  pos += hash_size;
  if (!expected_vocab_hash.empty() && hash != expected_vocab_hash) {
    throw ValidationError("checkpoint vocabulary hash mismatch: expected " +
                          expected_vocab_hash + ", found " + hash);
  }
  ModelParams params(config);
  auto count = GetLe<uint64_t>(bytes, &pos);
  if (count != params.values_.size()) {
    throw ValidationError("checkpoint parameter count does not match config");
  }
  for (double &v : params.values_) v = GetLe<double>(bytes, &pos);
  if (pos != bytes.size()) throw ParseError("trailing bytes in checkpoint");
  return params;
}

ModelParams ModelParams::Load(const std::string &path,
                              const std::string &expected_vocab_hash) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return Deserialize(ss.str(), expected_vocab_hash);
}

Vector Encode(const InputSequence &x, const ModelParams &params) {
  return Forward(x, params, nullptr);
}

Vector ScoreTypes(const Vector &h, const ModelParams &params) {
  ConstMatrixMap types = params.Mat(*params.layout().type_matrix);
  if (h.size() != types.rows()) {
    throw ValidationError("hidden vector has the wrong dimension");
  }
  return types.transpose() * h;
}

Vector ScoreTypes(const Vector &h, const Matrix &type_matrix) {
  if (h.size() != type_matrix.rows()) {
    throw ValidationError("hidden vector has the wrong dimension");
  }
  return type_matrix.transpose() * h;
}

Vector ToProbabilities(const Vector &scores) {
  Vector t(scores.size());
  for (Eigen::Index k = 0; k < scores.size(); ++k) {
    double s = scores(k);
    // Evaluate on the side that cannot overflow.
    if (s >= 0) {
      t(k) = 1.0 / (1.0 + std::exp(-s));
    } else {
      double e = std::exp(s);
      t(k) = e / (1.0 + e);
    }
  }
  return t;
}

TypeSet PredictTypes(const Vector &probabilities, double threshold) {
  TypeSet types;
  for (Eigen::Index k = 0; k < probabilities.size(); ++k) {
    if (probabilities(k) > threshold) types.insert(static_cast<TypeId>(k));
  }
  return types;
}

double BceLoss(const Vector &probabilities, const Vector &indicator) {
  if (probabilities.size() != indicator.size()) {
    throw ValidationError("bce_loss shape mismatch: " +
                          std::to_string(probabilities.size()) + " vs " +
                          std::to_string(indicator.size()));
  }
  double loss = 0.0;
  for (Eigen::Index k = 0; k < probabilities.size(); ++k) {
    double t = std::clamp(probabilities(k), kProbabilityEpsilon,
                          1.0 - kProbabilityEpsilon);
    double y = indicator(k);
    loss -= y * std::log(t) + (1.0 - y) * std::log(1.0 - t);
  }
  return loss;
}

Vector BceScoreGradient(const Vector &probabilities, const Vector &indicator) {
  if (probabilities.size() != indicator.size()) {
    throw ValidationError("bce gradient shape mismatch");
  }
  // Exact derivative wherever the clamp is inactive; kept unclamped so that
  // saturated wrong scores still receive a gradient.
  return probabilities - indicator;
}

Vector GoldIndicator(const TypeSet &gold, int32_t num_types) {
  Vector y = Vector::Zero(num_types);
  for (TypeId id : gold) {
    if (id < 0 || id >= num_types) {
      throw ValidationError("gold type id " + std::to_string(id) +
                            " outside 0.." + std::to_string(num_types - 1));
    }
    y(id) = 1.0;
  }
  return y;
}

double LossAndGradient(const ModelParams &params, const InputSequence &x,
                       const Vector &indicator, std::vector<double> *grad) {
  if (indicator.size() != params.config().num_types) {
    throw ValidationError("indicator width does not match num_types");
  }
  ForwardCache cache;
  Vector h = Forward(x, params, grad != nullptr ? &cache : nullptr);
  Vector t = ToProbabilities(ScoreTypes(h, params));
  double loss = BceLoss(t, indicator);
  if (grad != nullptr) {
    if (grad->size() != params.values().size()) {
      throw ValidationError("gradient buffer has the wrong size");
    }
    Backward(x, params, cache, BceScoreGradient(t, indicator), grad);
  }
  return loss;
}

Prediction Predict(const InputSequence &x, const ModelParams &params,
                   double threshold) {
  Prediction p;
  p.probabilities = ToProbabilities(ScoreTypes(Encode(x, params), params));
  p.types = PredictTypes(p.probabilities, threshold);
  return p;
}

}  // namespace xlet
