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

// Distantly supervised typing examples from hyperlinked documents.
//
// A document is a whitespace-tokenized word sequence whose hyperlinks point at
// knowledge-base entities. Every link yields one example: the linked words are
// the mention, and up to `window` words on either side plus the mention form
// the context. Gold types come from the linked entity's categories.

#ifndef XLET_CORPUS_H_
#define XLET_CORPUS_H_

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "xlet/common.h"
#include "xlet/entity.h"
#include "xlet/ontology.h"

namespace xlet {

struct Link {
  int32_t start = 0;  // inclusive word index
  int32_t end = 0;    // inclusive word index
  std::string qid;
};

struct Document {
  std::string doc_id;
  std::string language;
  std::vector<std::string> words;
  std::vector<Link> links;

  // Throws ParseError naming doc_id when a link is out of range, inverted,
  // overlaps another link or has an empty qid.
  void Validate() const;
};

struct Example {
  std::string language;
  std::string qid;
  std::vector<std::string> context;
  int32_t mention_offset = 0;
  int32_t mention_length = 0;
  TypeSet gold;

  std::vector<std::string> Mention() const;
  std::string MentionString() const;

  bool operator==(const Example &other) const = default;
};

using Dataset = std::vector<Example>;

// Per-language example lists, ordered by language tag.
using LanguagePools = std::map<std::string, Dataset>;

// One example per link. When first_link_only is set, only the first link to
// each qid within the document is used.
std::vector<Example> ExtractExamples(const Document &doc, int32_t window,
                                     bool first_link_only = false);

class KnowledgeBase {
 public:
  // Returns false if the qid is already present.
  bool Add(EntityRecord record);
  const EntityRecord *Find(std::string_view qid) const;
  size_t size() const { return records_.size(); }

  // Records in qid order.
  std::vector<const EntityRecord *> Records() const;

 private:
  std::map<std::string, EntityRecord, std::less<>> records_;
};

enum class Rejection { kMissingEntity, kTypeless };

const char *RejectionName(Rejection reason);

// Memoizes MapEntityTypes per qid; normalization runs regexes over every
// category, and popular entities are linked many times.
class GoldTypeMapper {
 public:
  GoldTypeMapper(const KnowledgeBase &kb, const TypeOntology &ontology,
                 const NormalizationConfig &cfg)
      : kb_(kb), ontology_(ontology), cfg_(cfg) {}

  // nullopt when the qid is missing from the knowledge base.
  std::optional<TypeSet> TypesOf(const std::string &qid);

 private:
  const KnowledgeBase &kb_;
  const TypeOntology &ontology_;
  const NormalizationConfig &cfg_;
  std::unordered_map<std::string, TypeSet> cache_;
};

using LabelResult = std::variant<Example, Rejection>;

LabelResult AttachGoldTypes(Example ex, const KnowledgeBase &kb,
                            const TypeOntology &ontology,
                            const NormalizationConfig &cfg);
LabelResult AttachGoldTypes(Example ex, GoldTypeMapper *mapper);

// Adds one occurrence of every normalized type of the example's entity.
// Examples whose entity is missing from the knowledge base are skipped and
// counted in *missing when given.
void CountTypeOccurrences(const Dataset &examples, const KnowledgeBase &kb,
                          const NormalizationConfig &cfg, TypeCounter *counter,
                          int64_t *missing = nullptr);

// Draws min(target, pool size) examples per language uniformly without
// replacement. Output is grouped by ascending language tag, each group in draw
// order.
Dataset SampleBalanced(const LanguagePools &pools, int64_t target,
                       uint64_t seed);

struct HoldoutSplit {
  std::set<std::string> held_out_qids;
  Dataset filtered_train;
  LanguagePools unseen_tests;
};

// Smallest total_target accepted by HoldoutEntities for these test sets.
int64_t MinimumHoldoutTarget(const LanguagePools &tests, double min_fraction);

// Holds out at least ceil(min_fraction * distinct entities) entities of every
// test language, then fills up to total_target with entities drawn uniformly
// from the remaining test entities. Throws ConfigError when total_target is
// infeasible.
HoldoutSplit HoldoutEntities(const Dataset &train, const LanguagePools &tests,
                             double min_fraction, int64_t total_target,
                             uint64_t seed);

// Streams documents from a corpus file: one document per line with
// tab-separated doc_id, language, space-joined words and semicolon-separated
// "start-end:qid" links. Malformed lines are recorded and skipped.
class DocumentReader {
 public:
  // Throws ParseError if the file cannot be opened.
  explicit DocumentReader(const std::string &path);

  bool Next(Document *doc);

  const std::vector<std::string> &errors() const { return errors_; }

 private:
  std::string path_;
  std::ifstream in_;
  int64_t line_no_ = 0;
  std::vector<std::string> errors_;
};

// Parses one corpus line; throws ParseError on malformed input.
Document ParseDocumentLine(std::string_view line);
std::string FormatDocumentLine(const Document &doc);

std::vector<Document> LoadDocuments(const std::string &path,
                                    std::vector<std::string> *errors = nullptr);

// Snapshot lines: qid, title, pipe-separated categories, tab-separated.
// Malformed lines and duplicate qids are recorded in *errors and skipped.
KnowledgeBase LoadKb(const std::string &path,
                     std::vector<std::string> *errors = nullptr);

// Dataset file with header "#xlet-dataset v1". Lines hold language, qid,
// mention offset, mention length, space-joined context and comma-separated
// gold type ids, tab-separated.
std::string SerializeDataset(const Dataset &examples);
void SaveDataset(const std::string &path, const Dataset &examples);
Dataset ParseDataset(std::string_view text);
Dataset LoadDataset(const std::string &path);

}  // namespace xlet

#endif  // XLET_CORPUS_H_
