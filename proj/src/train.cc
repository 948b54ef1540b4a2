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

#include "xlet/train.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <thread>

#include "xlet/random.h"

namespace xlet {

void TrainConfig::Validate() const {
  if (batch < 1) throw ConfigError("batch must be >= 1");
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (!(lr_encoder >= 0) || !(lr_type_matrix >= 0)) {
    throw ConfigError("learning rates must be non-negative");
  }
  if (!(weight_decay >= 0)) throw ConfigError("weight_decay must be >= 0");
  if (!(beta1 >= 0 && beta1 < 1 && beta2 >= 0 && beta2 < 1)) {
    throw ConfigError("adam betas must lie in [0, 1)");
  }
  if (threads < 1) throw ConfigError("threads must be >= 1");
}

AdamW::AdamW(const ParamLayout &layout, const TrainConfig &config)
    : config_(config),
      m_(layout.total(), 0.0),
      v_(layout.total(), 0.0) {
  groups_ = {{"encoder", ParamGroup::kEncoder, config.lr_encoder},
             {"type_matrix", ParamGroup::kTypeMatrix, config.lr_type_matrix}};
  for (const ParamBlock &block : layout.blocks()) {
    double lr = block.group == ParamGroup::kEncoder ? config.lr_encoder
                                                    : config.lr_type_matrix;
    spans_.push_back({block.offset, block.size(), lr, block.decay});
  }
}

void AdamW::Step(const std::vector<double> &grad, ModelParams *params) {
  ++step_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  std::vector<double> &theta = params->values();
  for (const Span &span : spans_) {
    const double decay = span.decay ? span.lr * config_.weight_decay : 0.0;
    for (int64_t i = span.offset; i < span.offset + span.size; ++i) {
      double g = grad[i];
      m_[i] = b1 * m_[i] + (1.0 - b1) * g;
      v_[i] = b2 * v_[i] + (1.0 - b2) * g * g;
      double m_hat = m_[i] / correction1;
      double v_hat = v_[i] / correction2;
      theta[i] -= decay * theta[i];
      theta[i] -= span.lr * m_hat / (std::sqrt(v_hat) + config_.adam_epsilon);
    }
  }
}

namespace {

// Computes per-example losses and gradients for examples [begin, end) of the
// batch into their own slots.
void RunSlice(const std::vector<TrainingExample> &data,
              const std::vector<size_t> &order, size_t batch_start,
              size_t begin, size_t end, const ModelParams &params,
              std::vector<std::vector<double>> *grads,
              std::vector<double> *losses) {
  const int32_t num_types = params.config().num_types;
  for (size_t j = begin; j < end; ++j) {
    const TrainingExample &ex = data[order[batch_start + j]];
    std::vector<double> &g = (*grads)[j];
    std::fill(g.begin(), g.end(), 0.0);
    (*losses)[j] = LossAndGradient(params, ex.x,
                                   GoldIndicator(ex.gold, num_types), &g);
  }
}

}  // namespace

TrainResult Train(const std::vector<TrainingExample> &data,
                  const ModelConfig &model_config, const TrainConfig &config,
                  const EpochLogger &logger) {
  config.Validate();
  return Train(data, ModelParams::Init(model_config, config.seed,
                                       config.init_scale),
               config, logger);
}

TrainResult Train(const std::vector<TrainingExample> &data, ModelParams init,
                  const TrainConfig &config, const EpochLogger &logger) {
  config.Validate();
  if (data.empty()) throw ConfigError("training dataset is empty");
  const int32_t num_types = init.config().num_types;
  for (const TrainingExample &ex : data) {
    for (TypeId id : ex.gold) {
      if (id < 0 || id >= num_types) {
        throw ValidationError("gold type id " + std::to_string(id) +
                              " outside the model's " +
                              std::to_string(num_types) + " types");
      }
    }
  }

  TrainResult result{std::move(init), {}, {}};
  ModelParams &params = result.params;
  AdamW optimizer(params.layout(), config);
  result.groups = optimizer.groups();

  // The shuffle stream is separate from the initialization stream.
  Rng rng(config.seed ^ 0x5DEECE66DULL);
  const size_t batch = static_cast<size_t>(config.batch);
  const size_t width = params.values().size();
  std::vector<std::vector<double>> grads(batch, std::vector<double>(width));
  std::vector<double> losses(batch);
  std::vector<double> total(width);
  std::vector<size_t> order(data.size());

  for (int32_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    rng.Shuffle(&order);
    double epoch_loss = 0.0;
    int64_t batch_index = 0;
    for (size_t start = 0; start < order.size(); start += batch, ++batch_index) {
      const size_t count = std::min(batch, order.size() - start);
      const size_t workers =
          std::min(count, static_cast<size_t>(config.threads));
      if (workers <= 1) {
        RunSlice(data, order, start, 0, count, params, &grads, &losses);
      } else {
        std::vector<std::thread> pool;
        for (size_t w = 0; w < workers; ++w) {
          size_t begin = count * w / workers;
          size_t end = count * (w + 1) / workers;
          pool.emplace_back(RunSlice, std::cref(data), std::cref(order), start,
                            begin, end, std::cref(params), &grads, &losses);
        }
        for (std::thread &t : pool) t.join();
      }

      // Fixed-order reduction into the batch-mean gradient.
      std::fill(total.begin(), total.end(), 0.0);
      double batch_loss = 0.0;
      for (size_t j = 0; j < count; ++j) {
        batch_loss += losses[j];
        const std::vector<double> &g = grads[j];
        for (size_t i = 0; i < width; ++i) total[i] += g[i];
      }
      if (!std::isfinite(batch_loss)) {
        throw TrainingDivergedError(epoch, batch_index, "non-finite loss");
      }
      const double inv = 1.0 / static_cast<double>(count);
      for (double &g : total) g *= inv;
      optimizer.Step(total, &params);
      if (!params.AllFinite()) {
        throw TrainingDivergedError(epoch, batch_index,
                                    "non-finite parameter after update");
      }
      epoch_loss += batch_loss;
    }
    double mean = epoch_loss / static_cast<double>(data.size());
    result.epoch_mean_loss.push_back(mean);
    if (logger) logger(epoch, mean);
  }
  return result;
}

double MeanLoss(const std::vector<TrainingExample> &data,
                const ModelParams &params) {
  if (data.empty()) return 0.0;
  double total = 0.0;
  for (const TrainingExample &ex : data) {
    total += LossAndGradient(
        params, ex.x, GoldIndicator(ex.gold, params.config().num_types),
        nullptr);
  }
  return total / static_cast<double>(data.size());
}

GradCheckResult GradCheck(const ModelParams &params, const InputSequence &x,
                          const TypeSet &gold, double epsilon,
                          int32_t coordinates, uint64_t seed, double floor) {
  const ModelConfig &cfg = params.config();
  const ParamLayout &layout = params.layout();
  Vector indicator = GoldIndicator(gold, cfg.num_types);

  std::vector<double> analytic(params.values().size(), 0.0);
  LossAndGradient(params, x, indicator, &analytic);

  // Coordinates with a path to the output: embedding rows that the input
  // actually reads, and every coordinate of the other blocks.
  std::set<PieceId> used_tokens(x.ids.begin(), x.ids.end());
  std::set<uint8_t> used_segments(x.segments.begin(), x.segments.end());
  std::vector<std::vector<int64_t>> live(layout.blocks().size());
  for (size_t b = 0; b < layout.blocks().size(); ++b) {
    const ParamBlock &block = layout.blocks()[b];
    for (int32_t r = 0; r < block.rows; ++r) {
      bool reachable = true;
      if (&block == layout.token_embedding) {
        reachable = used_tokens.count(r) > 0;
      } else if (&block == layout.position_embedding) {
        reachable = r < static_cast<int32_t>(x.size());
      } else if (&block == layout.segment_embedding) {
        reachable = used_segments.count(static_cast<uint8_t>(r)) > 0;
      }
      if (!reachable) continue;
      for (int32_t c = 0; c < block.cols; ++c) {
        live[b].push_back(block.offset + static_cast<int64_t>(r) * block.cols +
                          c);
      }
    }
  }

  Rng rng(seed);
  std::vector<std::pair<size_t, int64_t>> picks;  // (block, flat index)
  std::vector<int64_t> all_live;
  std::vector<size_t> owner;
  for (size_t b = 0; b < live.size(); ++b) {
    if (live[b].empty()) continue;
    picks.emplace_back(b, live[b][rng.Uniform(live[b].size())]);
    for (int64_t i : live[b]) {
      all_live.push_back(i);
      owner.push_back(b);
    }
  }
  while (static_cast<int32_t>(picks.size()) < coordinates && !all_live.empty()) {
    size_t k = rng.Uniform(all_live.size());
    picks.emplace_back(owner[k], all_live[k]);
  }

  GradCheckResult result;
  ModelParams probe = params;
  for (const auto &[b, index] : picks) {
    const double saved = probe.values()[index];
    probe.values()[index] = saved + epsilon;
    double plus = LossAndGradient(probe, x, indicator, nullptr);
    probe.values()[index] = saved - epsilon;
    double minus = LossAndGradient(probe, x, indicator, nullptr);
    probe.values()[index] = saved;
    double numeric = (plus - minus) / (2.0 * epsilon);
    double a = analytic[index];
    double denom = std::max({std::abs(a), std::abs(numeric), floor});
    double rel = std::abs(a - numeric) / denom;
    ++result.coordinates;
    if (rel > result.max_relative_error || result.worst_block.empty()) {
      result.max_relative_error = std::max(rel, result.max_relative_error);
      result.worst_block = layout.blocks()[b].name;
      result.worst_index = index - layout.blocks()[b].offset;
      result.worst_analytic = a;
      result.worst_numeric = numeric;
    }
  }
  return result;
}

}  // namespace xlet
