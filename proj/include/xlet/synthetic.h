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


// Synthetic multilingual hyperlink corpora for tests and fixtures.
//
// Entities have a kind (six types), a region (four types) and, for people and
// companies, a status type, for twelve types in all. Every mention sits in a
// short sentence that carries script-independent cue tokens for each of the
// entity's types, surrounded by filler words drawn from a per-language
// vocabulary. Latin-script languages use the entity's name as the mention;
// other scripts use a letter-by-letter transliteration, so no mention string
// is shared across scripts.

#ifndef XLET_SYNTHETIC_H_
#define XLET_SYNTHETIC_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "xlet/corpus.h"
#include "xlet/entity.h"

namespace xlet {

enum class Script { kLatin, kCyrillic, kGreek };

// Letter-by-letter transliteration of ASCII text; other bytes pass through.
std::string Transliterate(std::string_view latin, Script script);

struct SyntheticLanguage {
  std::string code;
  Script script = Script::kLatin;
  int32_t documents = 50;
};

struct SyntheticConfig {
  std::vector<SyntheticLanguage> languages;
  int32_t entities = 120;
  // Entities whose categories normalize only to rare types.
  int32_t typeless_entities = 4;
  int32_t links_per_document = 2;
  // Filler words between consecutive linked sentences.
  int32_t gap = 10;
  // Fraction of links pointing at qids absent from the knowledge base.
  double missing_rate = 0.03;
  // Fraction of links pointing at typeless entities.
  double typeless_rate = 0.03;
  // Entities and the knowledge base depend only on seed, so corpora drawn
  // with different document seeds share their entities.
  uint64_t seed = 0;
  uint64_t document_seed = 0;
};

struct SyntheticCorpus {
  std::vector<Document> documents;
  std::vector<EntityRecord> kb;
};

// Documents are ordered by language (in config order), then by index.
SyntheticCorpus GenerateCorpus(const SyntheticConfig &config);

// Type strings the generated categories normalize to, in a fixed order.
const std::vector<std::string> &SyntheticTypes();

// Writes documents as corpus lines and records as knowledge-base lines.
std::string FormatCorpus(const std::vector<Document> &documents);
std::string FormatKb(const std::vector<EntityRecord> &kb);

}  // namespace xlet

#endif  // XLET_SYNTHETIC_H_
