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


// Stage runner behind the command-line tool.
//
// Each stage reads the artifacts of earlier stages from the output directory,
// writes its own artifacts, and records a manifest with the SHA-256 of every
// input and output. Manifests carry no timestamps, so identical inputs give
// byte-identical manifests.
//
// Output layout:
//   ontology.tsv
//   data/train.tsv, data/test.<lang>.tsv, data/rejections.tsv
//   holdout/held_out.txt, holdout/train.tsv, holdout/unseen.<lang>.tsv
//   models/<split>/vocab.txt, models/<split>/model.ckpt, models/<split>/log.tsv
//   baselines/alias.<split>.tsv, baselines/index.<split>.bin
//   predictions/<method>.<split>.tsv
//   reports/<name>.txt, reports/<name>.json
//   gradcheck.tsv
//   manifests/<stage>.json

#ifndef XLET_PIPELINE_H_
#define XLET_PIPELINE_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xlet/common.h"
#include "xlet/model.h"
#include "xlet/train.h"

namespace xlet {

std::string ToolVersion();

struct RunConfig {
  // [paths]
  std::vector<std::string> train_corpus;
  std::vector<std::string> test_corpus;
  std::string kb;
  std::string normalization;  // empty: built-in rules
  std::string out;

  // [corpus]
  int32_t window = 50;
  bool first_link_only = false;

  // [ontology]
  int32_t capacity = 10000;

  // [sampling]
  int64_t sample_target = 100000;  // examples per language
  uint64_t sample_seed = 0;

  // [holdout]
  double min_fraction = 0.02;
  int64_t total_target = 5288;
  uint64_t holdout_seed = 0;

  // [tokenizer]
  int32_t vocab_size = 2000;

  // [model]
  ModelConfig model;

  // [train]
  TrainConfig train;

  // [predict]
  double threshold = 0.5;

  // [baseline]
  int32_t clusters = 0;  // 0: exact search
  int32_t probes = 1;
  uint64_t baseline_seed = 0;

  // [gradcheck]
  int32_t gc_dim = 16;
  int32_t gc_layers = 1;
  int32_t gc_heads = 4;
  int32_t gc_ffn_dim = 64;
  int32_t gc_num_types = 12;
  int32_t gc_length = 12;
  int32_t gc_coordinates = 100;
  double gc_epsilon = 1e-3;
  double gc_init_scale = 0.1;
  double gc_tolerance = 1e-4;
  uint64_t gc_seed = 0;

  // Throws ConfigError for values outside their documented ranges.
  void Validate() const;

  // Replaces every seed field.
  void OverrideSeed(uint64_t seed);

  // Key=value lines under [section] headers; '#' starts a comment. Relative
  // paths are resolved against base_dir. Unknown keys are errors.
  static RunConfig Parse(std::string_view text, const std::string &base_dir);
  static RunConfig Load(const std::string &path);

  // Canonical text form listing every field; Parse(Serialize()) round-trips.
  std::string Serialize() const;
};

// Failure of a stage. The exit code follows the tool convention: 2 for
// missing or unreadable inputs, 3 for validation failures.
class StageError : public Error {
 public:
  StageError(const std::string &stage, int exit_code, const std::string &what)
      : Error(stage + ": " + what), stage_(stage), exit_code_(exit_code) {}
  const std::string &stage() const { return stage_; }
  int exit_code() const { return exit_code_; }

 private:
  std::string stage_;
  int exit_code_;
};

// Maps an exception escaping a stage to a tool exit code: 1 for bad
// configuration, 2 for missing or unreadable inputs, 3 for validation
// failures.
int ExitCodeFor(const std::exception &e);

// Splits accepted by train, predict and baseline: "full" uses data/, and
// "unseen" uses the holdout/ artifacts.
enum class Split { kFull, kUnseen };
Split ParseSplit(std::string_view name);
const char *SplitName(Split split);

enum class BaselineKind { kStringMatch, kSimilarity };
BaselineKind ParseBaselineKind(std::string_view name);
const char *BaselineKindName(BaselineKind kind);

struct EvaluateOptions {
  std::string seen;           // predictions file
  std::string unseen;         // optional
  std::string adjudications;  // optional
  std::string name = "report";
};

// Toy model, input and gold set for the gradient check, all derived from
// the [gradcheck] section.
struct GradCheckFixture {
  ModelParams params;
  InputSequence x;
  TypeSet gold;
};
GradCheckFixture MakeGradCheckFixture(const RunConfig &config);

struct GradCheckOutcome {
  GradCheckResult result;
  bool passed = false;
};

// Runs stages against one output directory. Holds an exclusive lock on the
// directory for its lifetime; a second runner on the same directory fails
// with StageError.
class Pipeline {
 public:
  explicit Pipeline(RunConfig config);
  ~Pipeline();
  Pipeline(const Pipeline &) = delete;
  Pipeline &operator=(const Pipeline &) = delete;

  const RunConfig &config() const { return config_; }
  std::string OutPath(const std::string &relative) const;

  void BuildOntology();
  void BuildDataset();
  void Holdout();
  void TrainModel(Split split);
  void PredictSplit(Split split);
  void Baseline(BaselineKind kind, Split split);
  // Returns the report text.
  std::string Evaluate(const EvaluateOptions &options);
  GradCheckOutcome GradCheckStage();

  // Progress lines go here when set.
  void set_log(std::function<void(const std::string &)> log) {
    log_ = std::move(log);
  }

 private:
  class Stage;

  // Path relative to the output directory when it lies inside it.
  std::string Relative(const std::string &path) const;
  void Log(const std::string &line) const;

  RunConfig config_;
  int lock_fd_ = -1;
  std::function<void(const std::string &)> log_;
};

}  // namespace xlet

#endif  // XLET_PIPELINE_H_
