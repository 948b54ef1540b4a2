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

#ifndef XLET_TRAIN_H_
#define XLET_TRAIN_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "xlet/model.h"

namespace xlet {

struct TrainConfig {
  int32_t batch = 16;
  double lr_encoder = 2e-5;
  double lr_type_matrix = 1e-3;
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  int32_t epochs = 3;
  uint64_t seed = 0;
  double init_scale = 0.02;
  // Worker threads per batch. Results do not depend on this value.
  int32_t threads = 1;

  void Validate() const;
};

struct TrainingExample {
  InputSequence x;
  TypeSet gold;
};

struct OptimizerGroup {
  std::string name;
  ParamGroup group;
  double learning_rate;
};

// AdamW with one learning rate per parameter group. Weight decay is decoupled
// from the adaptive update and only applies to blocks marked for decay
// (matrices and embeddings, not biases or layer-norm parameters).
class AdamW {
 public:
  AdamW(const ParamLayout &layout, const TrainConfig &config);

  const std::vector<OptimizerGroup> &groups() const { return groups_; }
  int64_t steps() const { return step_; }

  void Step(const std::vector<double> &grad, ModelParams *params);

 private:
  struct Span {
    int64_t offset;
    int64_t size;
    double lr;
    bool decay;
  };

  std::vector<OptimizerGroup> groups_;
  std::vector<Span> spans_;
  TrainConfig config_;
  std::vector<double> m_, v_;
  int64_t step_ = 0;
};

// Raised when a batch produces a non-finite loss or parameter.
class TrainingDivergedError : public ValidationError {
 public:
  TrainingDivergedError(int32_t epoch, int64_t batch, const std::string &what)
      : ValidationError("training diverged at epoch " + std::to_string(epoch) +
                        ", batch " + std::to_string(batch) + ": " + what),
        epoch_(epoch),
        batch_(batch) {}
  int32_t epoch() const { return epoch_; }
  int64_t batch() const { return batch_; }

 private:
  int32_t epoch_;
  int64_t batch_;
};

struct TrainResult {
  ModelParams params;
  std::vector<double> epoch_mean_loss;
  std::vector<OptimizerGroup> groups;
};

using EpochLogger = std::function<void(int32_t epoch, double mean_loss)>;

// Minimizes the summed binary cross-entropy with mini-batches drawn from a
// seeded shuffle. Batch gradients are reduced in example order, so the result
// is identical for any thread count.
TrainResult Train(const std::vector<TrainingExample> &data,
                  const ModelConfig &model_config, const TrainConfig &config,
                  const EpochLogger &logger = {});
TrainResult Train(const std::vector<TrainingExample> &data, ModelParams init,
                  const TrainConfig &config, const EpochLogger &logger = {});

// Mean per-example loss without updating anything.
double MeanLoss(const std::vector<TrainingExample> &data,
                const ModelParams &params);

struct GradCheckResult {
  double max_relative_error = 0.0;
  int64_t coordinates = 0;
  std::string worst_block;
  int64_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

// Compares the analytic gradient with central differences
// (L(theta + eps) - L(theta - eps)) / 2 eps on sampled coordinates. Every
// parameter block contributes at least one coordinate that lies on a path to
// the output; the rest are drawn uniformly from such coordinates. The
// relative error of a coordinate is |a - n| / max(|a|, |n|, floor).
GradCheckResult GradCheck(const ModelParams &params, const InputSequence &x,
                          const TypeSet &gold, double epsilon = 1e-3,
                          int32_t coordinates = 100, uint64_t seed = 0,
                          double floor = 1e-6);

}  // namespace xlet

#endif  // XLET_TRAIN_H_
