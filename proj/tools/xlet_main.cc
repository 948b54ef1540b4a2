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


// Command-line driver for the typing pipeline.
//
//   xlet --config run.cfg build-ontology
//   xlet --config run.cfg build-dataset
//   xlet --config run.cfg holdout
//   xlet --config run.cfg train --split full
//   xlet --config run.cfg predict --split full
//   xlet --config run.cfg baseline string-match --split unseen
//   xlet --config run.cfg evaluate --seen P1 [--unseen P2] [--adjudications A]
//   xlet --config run.cfg gradcheck
//
// Exit codes: 0 success, 1 usage, 2 input error, 3 validation failure.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "xlet/pipeline.h"

namespace {

constexpr int kUsage = 1;

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Cross-lingual fine-grained entity typing pipeline"};
  app.set_version_flag("--version", xlet::ToolVersion());
  app.require_subcommand(1);

  std::string config_path;
  std::optional<uint64_t> seed;
  std::string out;
  bool quiet = false;
  app.add_option("--config", config_path, "Run configuration file");
  app.add_option("--seed", seed, "Overrides every seed in the configuration");
  app.add_option("--out", out, "Output directory (overrides paths.out)");
  app.add_flag("-q,--quiet", quiet, "Suppress progress lines");

  std::string split = "full";
  auto add_split = [&split](CLI::App *cmd) {
    cmd->add_option("--split", split, "full or unseen")
        ->check(CLI::IsMember({"full", "unseen"}));
  };

  CLI::App *build_ontology =
      app.add_subcommand("build-ontology", "Rank normalized types");
  CLI::App *build_dataset =
      app.add_subcommand("build-dataset", "Extract and label examples");
  CLI::App *holdout =
      app.add_subcommand("holdout", "Hold out entities for the unseen split");
  CLI::App *train = app.add_subcommand("train", "Train the typing model");
  add_split(train);
  CLI::App *predict = app.add_subcommand("predict", "Type the test examples");
  add_split(predict);
  CLI::App *baseline =
      app.add_subcommand("baseline", "Run a comparison method");
  std::string which;
  baseline->add_option("which", which, "string-match or similarity")
      ->required()
      ->check(CLI::IsMember({"string-match", "similarity"}));
  add_split(baseline);
  CLI::App *evaluate = app.add_subcommand("evaluate", "Score predictions");
  xlet::EvaluateOptions eval;
  evaluate->add_option("--seen", eval.seen, "Predictions on the full split")
      ->required();
  evaluate->add_option("--unseen", eval.unseen,
                       "Predictions on the unseen-entity split");
  evaluate->add_option("--adjudications", eval.adjudications,
                       "Human labels for extra predicted types");
  evaluate->add_option("--name", eval.name, "Report file stem");
  CLI::App *gradcheck =
      app.add_subcommand("gradcheck", "Check gradients on a toy model");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  const std::string stage = app.get_subcommands().front()->get_name();
  try {
    xlet::RunConfig config;
    if (!config_path.empty()) {
      config = xlet::RunConfig::Load(config_path);
    }
    if (seed) config.OverrideSeed(*seed);
    if (!out.empty()) config.out = out;

    xlet::Pipeline pipeline(std::move(config));
    if (!quiet) {
      pipeline.set_log([](const std::string &line) {
        std::cerr << line << "\n";
      });
    }
    if (build_ontology->parsed()) {
      pipeline.BuildOntology();
    } else if (build_dataset->parsed()) {
      pipeline.BuildDataset();
    } else if (holdout->parsed()) {
      pipeline.Holdout();
    } else if (train->parsed()) {
      pipeline.TrainModel(xlet::ParseSplit(split));
    } else if (predict->parsed()) {
      pipeline.PredictSplit(xlet::ParseSplit(split));
    } else if (baseline->parsed()) {
      pipeline.Baseline(xlet::ParseBaselineKind(which),
                        xlet::ParseSplit(split));
    } else if (evaluate->parsed()) {
      std::cout << pipeline.Evaluate(eval);
    } else if (gradcheck->parsed()) {
      xlet::GradCheckOutcome outcome = pipeline.GradCheckStage();
      std::cout << (outcome.passed ? "pass" : "fail")
                << " max_relative_error=" << outcome.result.max_relative_error
                << " worst=" << outcome.result.worst_block << "\n";
      if (!outcome.passed) return 3;
    }
  } catch (const std::exception &e) {
    std::cerr << "xlet " << stage << ": " << e.what() << "\n";
    return xlet::ExitCodeFor(e);
  }
  return 0;
}
