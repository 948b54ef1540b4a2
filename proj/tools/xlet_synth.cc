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


// Writes a synthetic multilingual corpus: corpus.train.tsv with Latin-script
// training languages, corpus.test.tsv with the same languages plus one
// Cyrillic-script language that has no training documents, and kb.tsv.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "xlet/synthetic.h"

namespace {

void Write(const std::filesystem::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Synthetic corpus generator"};
  std::string out;
  uint64_t seed = 0;
  int32_t entities = 120;
  int32_t train_docs = 100;
  int32_t test_docs = 30;
  std::string zero_shot = "sr";
  app.add_option("--out", out, "Output directory")->required();
  app.add_option("--seed", seed, "Entity seed");
  app.add_option("--entities", entities, "Number of typed entities");
  app.add_option("--train-docs", train_docs, "Training documents per language");
  app.add_option("--test-docs", test_docs, "Test documents per language");
  app.add_option("--zero-shot", zero_shot, "Tag of the Cyrillic test language");
  CLI11_PARSE(app, argc, argv);

  try {
    xlet::SyntheticConfig config;
    config.seed = seed;
    config.entities = entities;
    for (const char *code : {"de", "en", "es", "fi"}) {
      config.languages.push_back({code, xlet::Script::kLatin, train_docs});
    }
    config.document_seed = seed * 2 + 1;
    xlet::SyntheticCorpus train = xlet::GenerateCorpus(config);

    for (auto &lang : config.languages) lang.documents = test_docs;
    config.languages.push_back({zero_shot, xlet::Script::kCyrillic, test_docs});
    config.document_seed = seed * 2 + 2;
    xlet::SyntheticCorpus test = xlet::GenerateCorpus(config);

    std::filesystem::create_directories(out);
    Write(std::filesystem::path(out) / "corpus.train.tsv",
          xlet::FormatCorpus(train.documents));
    Write(std::filesystem::path(out) / "corpus.test.tsv",
          xlet::FormatCorpus(test.documents));
    Write(std::filesystem::path(out) / "kb.tsv", xlet::FormatKb(train.kb));
  } catch (const std::exception &e) {
    std::cerr << "xlet-synth: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
