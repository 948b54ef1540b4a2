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

// Mention-and-context typing model.
//
// A small pre-norm transformer encodes CLS m SEP s SEP; the final-layer state
// at the CLS position is scored against every column of the type embedding
// matrix, and the sigmoid of each score is the probability of that type.
// All arithmetic is double precision so the analytic gradient can be checked
// against finite differences.

#ifndef XLET_MODEL_H_
#define XLET_MODEL_H_

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "xlet/common.h"
#include "xlet/tokenizer.h"

namespace xlet {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                             Eigen::RowMajor>;
using MatrixMap = Eigen::Map<Matrix>;
using ConstMatrixMap = Eigen::Map<const Matrix>;
using VectorMap = Eigen::Map<Eigen::VectorXd>;
using ConstVectorMap = Eigen::Map<const Eigen::VectorXd>;

struct ModelConfig {
  int32_t dim = 64;
  int32_t layers = 2;
  int32_t heads = 4;
  int32_t ffn_dim = 256;
  int32_t cap = 128;
  int32_t vocab_size = SubwordVocab::kFirstMerge;
  int32_t num_types = 0;

  // Throws ConfigError for inconsistent shapes.
  void Validate() const;
  bool operator==(const ModelConfig &other) const = default;
};

// Parameters are trained in two optimizer groups.
enum class ParamGroup { kEncoder, kTypeMatrix };

// A named tensor inside the flat parameter buffer.
struct ParamBlock {
  std::string name;
  int64_t offset = 0;
  int32_t rows = 0;
  int32_t cols = 0;
  ParamGroup group = ParamGroup::kEncoder;
  bool decay = false;  // decoupled weight decay applies

  int64_t size() const { return static_cast<int64_t>(rows) * cols; }
};

// Fixed parameter order. Matrices are row-major.
//   token_embedding     vocab x dim
//   position_embedding  cap x dim
//   segment_embedding   2 x dim
//   per layer l:
//     l.ln1.gain, l.ln1.bias            dim
//     l.wq, l.wk, l.wv, l.wo            dim x dim   (each followed by a
//     l.bq, l.bk, l.bv, l.bo            dim          bias of size dim)
//     l.ln2.gain, l.ln2.bias            dim
//     l.w1 dim x ffn, l.b1 ffn, l.w2 ffn x dim, l.b2 dim
//   final_ln.gain, final_ln.bias        dim
//   type_matrix                         dim x num_types
class ParamLayout {
 public:
  explicit ParamLayout(const ModelConfig &config);

  const std::vector<ParamBlock> &blocks() const { return blocks_; }
  const ParamBlock &Block(const std::string &name) const;
  int64_t total() const { return total_; }

  // Layout-aligned views for one transformer layer.
  struct LayerBlocks {
    const ParamBlock *ln1_gain, *ln1_bias;
    const ParamBlock *wq, *bq, *wk, *bk, *wv, *bv, *wo, *bo;
    const ParamBlock *ln2_gain, *ln2_bias;
    const ParamBlock *w1, *b1, *w2, *b2;
  };
  const LayerBlocks &Layer(int32_t l) const { return layers_[l]; }

  const ParamBlock *token_embedding = nullptr;
  const ParamBlock *position_embedding = nullptr;
  const ParamBlock *segment_embedding = nullptr;
  const ParamBlock *final_gain = nullptr;
  const ParamBlock *final_bias = nullptr;
  const ParamBlock *type_matrix = nullptr;

 private:
  void Add(const std::string &name, int32_t rows, int32_t cols,
           ParamGroup group, bool decay);

  std::vector<ParamBlock> blocks_;
  std::vector<LayerBlocks> layers_;
  int64_t total_ = 0;
};

class ModelParams {
 public:
  explicit ModelParams(const ModelConfig &config);

  // Matrices ~ N(0, init_scale^2), layer-norm gains 1, biases 0.
  static ModelParams Init(const ModelConfig &config, uint64_t seed,
                          double init_scale = 0.02);

  const ModelConfig &config() const { return config_; }
  const ParamLayout &layout() const { return layout_; }

  std::vector<double> &values() { return values_; }
  const std::vector<double> &values() const { return values_; }

  MatrixMap Mat(const ParamBlock &block);
  ConstMatrixMap Mat(const ParamBlock &block) const;
  VectorMap Vec(const ParamBlock &block);
  ConstVectorMap Vec(const ParamBlock &block) const;

  bool AllFinite() const;

  // Binary checkpoint, little-endian:
  //   "XLETCKPT" | u32 version=1
  //   u32 dim, layers, heads, ffn_dim, num_types, cap, vocab_size
  //   u32 hash length | vocab hash bytes (hex SHA-256)
  //   u64 parameter count | f64 parameters in ParamLayout order
  void Save(const std::string &path, const std::string &vocab_hash) const;
  std::string Serialize(const std::string &vocab_hash) const;

  // Throws ValidationError when the stored vocabulary hash differs from
  // expected_vocab_hash (unless the latter is empty).
  static ModelParams Load(const std::string &path,
                          const std::string &expected_vocab_hash);
  static ModelParams Deserialize(const std::string &bytes,
                                 const std::string &expected_vocab_hash);

 private:
  ModelConfig config_;
  ParamLayout layout_;
  std::vector<double> values_;
};

// Produces a fixed-size representation of an input sequence. Implemented by
// the built-in transformer; other encoders can be plugged into the baselines.
class MentionEncoder {
 public:
  virtual ~MentionEncoder() = default;
  virtual int32_t dim() const = 0;
  virtual int32_t cap() const = 0;
  virtual Vector Encode(const InputSequence &x) const = 0;
};

// Final-layer CLS state of the transformer.
Vector Encode(const InputSequence &x, const ModelParams &params);

class TransformerEncoder : public MentionEncoder {
 public:
  explicit TransformerEncoder(const ModelParams &params) : params_(params) {}
  int32_t dim() const override { return params_.config().dim; }
  int32_t cap() const override { return params_.config().cap; }
  Vector Encode(const InputSequence &x) const override {
    return xlet::Encode(x, params_);
  }

 private:
  const ModelParams &params_;
};

// scores_k = h . T[:, k]
Vector ScoreTypes(const Vector &h, const ModelParams &params);
Vector ScoreTypes(const Vector &h, const Matrix &type_matrix);

// Element-wise logistic sigmoid.
Vector ToProbabilities(const Vector &scores);

// {k : t_k > threshold}; a probability of exactly the threshold is excluded.
TypeSet PredictTypes(const Vector &probabilities, double threshold = 0.5);

constexpr double kProbabilityEpsilon = 1e-7;

// -sum_k [y_k log t_k + (1 - y_k) log(1 - t_k)] with t clamped into
// [eps, 1 - eps]. Throws ValidationError on a shape mismatch.
double BceLoss(const Vector &probabilities, const Vector &indicator);

// Gradient of the loss with respect to the scores, t - y.
Vector BceScoreGradient(const Vector &probabilities, const Vector &indicator);

// 0/1 indicator of width num_types.
Vector GoldIndicator(const TypeSet &gold, int32_t num_types);

// Loss of one example. When grad is non-null, the gradient with respect to
// every parameter is added into it (grad must have params.values().size()).
double LossAndGradient(const ModelParams &params, const InputSequence &x,
                       const Vector &indicator, std::vector<double> *grad);

struct Prediction {
  Vector probabilities;
  TypeSet types;
};

Prediction Predict(const InputSequence &x, const ModelParams &params,
                   double threshold = 0.5);

}  // namespace xlet

#endif  // XLET_MODEL_H_
