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

#include "xlet/corpus.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "xlet/random.h"
#include "xlet/text.h"

namespace xlet {
namespace {

constexpr char kDatasetHeader[] = "#xlet-dataset v1";

std::string ReadFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void StripCr(std::string *line) {
  if (!line->empty() && line->back() == '\r') line->pop_back();
}

Link ParseLink(std::string_view text) {
  size_t colon = text.find(':');
  size_t dash = text.find('-');
  if (colon == std::string_view::npos || dash == std::string_view::npos ||
      dash > colon) {
    throw ParseError("malformed link '" + std::string(text) + "'");
  }
  Link link;
  link.start = static_cast<int32_t>(ParseInt(text.substr(0, dash)));
  link.end =
      static_cast<int32_t>(ParseInt(text.substr(dash + 1, colon - dash - 1)));
  link.qid = std::string(text.substr(colon + 1));
  return link;
}

}  // namespace

void Document::Validate() const {
  const auto n = static_cast<int32_t>(words.size());
  int32_t last_end = -1;
  std::vector<const Link *> sorted;
  for (const Link &link : links) sorted.push_back(&link);
  std::sort(sorted.begin(), sorted.end(),
            [](const Link *a, const Link *b) { return a->start < b->start; });
  for (const Link *link : sorted) {
    if (link->qid.empty()) {
      throw ParseError("document " + doc_id + ": link with empty qid");
    }
    if (link->start < 0 || link->start > link->end || link->end >= n) {
      throw ParseError("document " + doc_id + ": link " +
                       std::to_string(link->start) + "-" +
                       std::to_string(link->end) + " outside 0.." +
                       std::to_string(n - 1));
    }
    if (link->start <= last_end) {
      throw ParseError("document " + doc_id + ": overlapping links at word " +
                       std::to_string(link->start));
    }
    last_end = link->end;
  }
}

std::vector<std::string> Example::Mention() const {
  return std::vector<std::string>(
      context.begin() + mention_offset,
      context.begin() + mention_offset + mention_length);
}

std::string Example::MentionString() const { return Join(Mention(), " "); }

std::vector<Example> ExtractExamples(const Document &doc, int32_t window,
                                     bool first_link_only) {
  if (window < 0) throw ConfigError("context window must be >= 0");
  doc.Validate();
  const auto n = static_cast<int32_t>(doc.words.size());
  std::vector<Example> examples;
  std::set<std::string> seen;
  for (const Link &link : doc.links) {
    if (first_link_only && !seen.insert(link.qid).second) continue;
    int32_t begin = std::max(0, link.start - window);
    int32_t end = std::min(n - 1, link.end + window);
    Example ex;
    ex.language = doc.language;
    ex.qid = link.qid;
    ex.context.assign(doc.words.begin() + begin, doc.words.begin() + end + 1);
    ex.mention_offset = link.start - begin;
    ex.mention_length = link.end - link.start + 1;
    examples.push_back(std::move(ex));
  }
  return examples;
}

bool KnowledgeBase::Add(EntityRecord record) {
  std::string qid = record.qid;
  return records_.emplace(std::move(qid), std::move(record)).second;
}

const EntityRecord *KnowledgeBase::Find(std::string_view qid) const {
  auto it = records_.find(qid);
  return it == records_.end() ? nullptr : &it->second;
}

std::vector<const EntityRecord *> KnowledgeBase::Records() const {
  std::vector<const EntityRecord *> out;
  out.reserve(records_.size());
  for (const auto &[qid, record] : records_) out.push_back(&record);
  return out;
}

const char *RejectionName(Rejection reason) {
  switch (reason) {
    case Rejection::kMissingEntity:
      return "missing-entity";
    case Rejection::kTypeless:
      return "typeless";
  }
  return "unknown";
}

std::optional<TypeSet> GoldTypeMapper::TypesOf(const std::string &qid) {
  auto it = cache_.find(qid);
  if (it != cache_.end()) return it->second;
  const EntityRecord *record = kb_.Find(qid);
  if (record == nullptr) return std::nullopt;
  TypeSet types = MapEntityTypes(*record, ontology_, cfg_);
  cache_.emplace(qid, types);
  return types;
}

LabelResult AttachGoldTypes(Example ex, GoldTypeMapper *mapper) {
  std::optional<TypeSet> types = mapper->TypesOf(ex.qid);
  if (!types) return Rejection::kMissingEntity;
  if (types->empty()) return Rejection::kTypeless;
  ex.gold = std::move(*types);
  return ex;
}

LabelResult AttachGoldTypes(Example ex, const KnowledgeBase &kb,
                            const TypeOntology &ontology,
                            const NormalizationConfig &cfg) {
  GoldTypeMapper mapper(kb, ontology, cfg);
  return AttachGoldTypes(std::move(ex), &mapper);
}

void CountTypeOccurrences(const Dataset &examples, const KnowledgeBase &kb,
                          const NormalizationConfig &cfg, TypeCounter *counter,
                          int64_t *missing) {
  std::unordered_map<std::string, std::set<std::string>> cache;
  for (const Example &ex : examples) {
    auto it = cache.find(ex.qid);
    if (it == cache.end()) {
      const EntityRecord *record = kb.Find(ex.qid);
      if (record == nullptr) {
        if (missing != nullptr) ++*missing;
        continue;
      }
      std::set<std::string> types;
      for (const std::string &category : record->categories) {
        types.merge(NormalizeCategory(category, cfg));
      }
      it = cache.emplace(ex.qid, std::move(types)).first;
    }
    for (const std::string &type : it->second) counter->Add(type);
  }
}

Dataset SampleBalanced(const LanguagePools &pools, int64_t target,
                       uint64_t seed) {
  if (target < 0) throw ConfigError("sampling target must be >= 0");
  Rng rng(seed);
  Dataset out;
  for (const auto &[language, pool] : pools) {
    size_t k = std::min(static_cast<size_t>(target), pool.size());
    for (size_t index : rng.SampleWithoutReplacement(pool.size(), k)) {
      out.push_back(pool[index]);
    }
  }
  return out;
}

namespace {

std::map<std::string, std::vector<std::string>> DistinctEntities(
    const LanguagePools &tests) {
  std::map<std::string, std::vector<std::string>> entities;
  for (const auto &[language, examples] : tests) {
    std::set<std::string> qids;
    for (const Example &ex : examples) qids.insert(ex.qid);
    entities[language].assign(qids.begin(), qids.end());
  }
  return entities;
}

int64_t MinimumPerLanguage(size_t distinct, double min_fraction) {
  // Guard against 0.02 * 100 = 2.0000000000000004 rounding up to 3.
  double want = min_fraction * static_cast<double>(distinct);
  return static_cast<int64_t>(std::ceil(want - 1e-9));
}

}  // namespace

int64_t MinimumHoldoutTarget(const LanguagePools &tests, double min_fraction) {
  int64_t total = 0;
  for (const auto &[language, qids] : DistinctEntities(tests)) {
    total += MinimumPerLanguage(qids.size(), min_fraction);
  }
  return total;
}

HoldoutSplit HoldoutEntities(const Dataset &train, const LanguagePools &tests,
                             double min_fraction, int64_t total_target,
                             uint64_t seed) {
  if (min_fraction < 0.0 || min_fraction > 1.0) {
    throw ConfigError("min_fraction must lie in [0, 1]");
  }
  int64_t minimum = MinimumHoldoutTarget(tests, min_fraction);
  if (total_target < minimum) {
    throw ConfigError("holdout total_target " + std::to_string(total_target) +
                      " is infeasible; minimum feasible value is " +
                      std::to_string(minimum));
  }
  auto entities = DistinctEntities(tests);
  std::set<std::string> all;
  for (const auto &[language, qids] : entities) {
    all.insert(qids.begin(), qids.end());
  }
  if (total_target > static_cast<int64_t>(all.size())) {
    throw ConfigError("holdout total_target " + std::to_string(total_target) +
                      " exceeds the " + std::to_string(all.size()) +
                      " distinct test entities");
  }

  Rng rng(seed);
  HoldoutSplit split;
  for (const auto &[language, qids] : entities) {
    // Entities already held out for an earlier language count toward the
    // quota of this one.
    int64_t need = MinimumPerLanguage(qids.size(), min_fraction);
    std::vector<std::string> candidates;
    for (const std::string &qid : qids) {
      if (split.held_out_qids.count(qid)) {
        --need;
      } else {
        candidates.push_back(qid);
      }
    }
    if (need <= 0) continue;
    for (size_t index : rng.SampleWithoutReplacement(candidates.size(),
                                                     static_cast<size_t>(need))) {
      split.held_out_qids.insert(candidates[index]);
    }
  }

  std::vector<std::string> remaining;
  for (const std::string &qid : all) {
    if (!split.held_out_qids.count(qid)) remaining.push_back(qid);
  }
  int64_t fill = total_target - static_cast<int64_t>(split.held_out_qids.size());
  if (fill > 0) {
    for (size_t index : rng.SampleWithoutReplacement(remaining.size(),
                                                     static_cast<size_t>(fill))) {
      split.held_out_qids.insert(remaining[index]);
    }
  }

  for (const Example &ex : train) {
    if (!split.held_out_qids.count(ex.qid)) split.filtered_train.push_back(ex);
  }
  for (const auto &[language, examples] : tests) {
    Dataset &unseen = split.unseen_tests[language];
    for (const Example &ex : examples) {
      if (split.held_out_qids.count(ex.qid)) unseen.push_back(ex);
    }
  }
  return split;
}

Document ParseDocumentLine(std::string_view line) {
  std::vector<std::string> fields = SplitFields(line, '\t');
  if (fields.size() != 4) {
    throw ParseError("expected 4 tab-separated fields, found " +
                     std::to_string(fields.size()));
  }
  Document doc;
  doc.doc_id = fields[0];
  doc.language = fields[1];
  if (doc.doc_id.empty() || doc.language.empty()) {
    throw ParseError("empty doc_id or language");
  }
  doc.words = SplitFields(fields[2], ' ');
  if (fields[2].empty()) doc.words.clear();
  for (const std::string &word : doc.words) {
    if (word.empty()) {
      throw ParseError("document " + doc.doc_id + ": empty word");
    }
  }
  if (!fields[3].empty()) {
    for (const std::string &item : SplitFields(fields[3], ';')) {
      try {
        doc.links.push_back(ParseLink(item));
      } catch (const ParseError &e) {
        throw ParseError("document " + doc.doc_id + ": " + e.what());
      }
    }
  }
  doc.Validate();
  return doc;
}

std::string FormatDocumentLine(const Document &doc) {
  std::string links;
  for (const Link &link : doc.links) {
    if (!links.empty()) links.push_back(';');
    links += std::to_string(link.start) + "-" + std::to_string(link.end) +
             ":" + link.qid;
  }
  return doc.doc_id + "\t" + doc.language + "\t" + Join(doc.words, " ") +
         "\t" + links;
}

DocumentReader::DocumentReader(const std::string &path)
    : path_(path), in_(path, std::ios::binary) {
  if (!in_) throw ParseError("cannot read " + path);
}

bool DocumentReader::Next(Document *doc) {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    StripCr(&line);
    if (line.empty()) continue;
    try {
      *doc = ParseDocumentLine(line);
      return true;
    } catch (const ParseError &e) {
      errors_.push_back(path_ + ":" + std::to_string(line_no_) + ": " +
                        e.what());
    }
  }
  return false;
}

std::vector<Document> LoadDocuments(const std::string &path,
                                    std::vector<std::string> *errors) {
  DocumentReader reader(path);
  std::vector<Document> docs;
  Document doc;
  while (reader.Next(&doc)) docs.push_back(std::move(doc));
  if (errors != nullptr) {
    errors->insert(errors->end(), reader.errors().begin(),
                   reader.errors().end());
  }
  return docs;
}

KnowledgeBase LoadKb(const std::string &path,
                     std::vector<std::string> *errors) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path);
  KnowledgeBase kb;
  std::string line;
  int64_t line_no = 0;
  auto report = [&](const std::string &message) {
    if (errors != nullptr) {
      errors->push_back(path + ":" + std::to_string(line_no) + ": " + message);
    }
  };
  while (std::getline(in, line)) {
    ++line_no;
    StripCr(&line);
    if (line.empty()) continue;
    std::vector<std::string> fields = SplitFields(line, '\t');
    if (fields.size() != 3) {
      report("expected 3 tab-separated fields, found " +
             std::to_string(fields.size()));
      continue;
    }
    if (fields[0].empty()) {
      report("empty qid");
      continue;
    }
    EntityRecord record;
    record.qid = fields[0];
    record.title = fields[1];
    if (!fields[2].empty()) {
      for (std::string &category : SplitFields(fields[2], '|')) {
        if (!category.empty()) record.categories.push_back(std::move(category));
      }
    }
    if (!kb.Add(std::move(record))) report("duplicate qid " + fields[0]);
  }
  return kb;
}

std::string SerializeDataset(const Dataset &examples) {
  std::string out = kDatasetHeader;
  out.push_back('\n');
  for (const Example &ex : examples) {
    out += ex.language + "\t" + ex.qid + "\t" +
           std::to_string(ex.mention_offset) + "\t" +
           std::to_string(ex.mention_length) + "\t" + Join(ex.context, " ") +
           "\t" + FormatTypeSet(ex.gold) + "\n";
  }
  return out;
}

void SaveDataset(const std::string &path, const Dataset &examples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << SerializeDataset(examples);
}

Dataset ParseDataset(std::string_view text) {
  std::vector<std::string> lines = SplitFields(text, '\n');
  if (lines.empty() || lines[0] != kDatasetHeader) {
    throw ValidationError("dataset schema mismatch: expected '" +
                          std::string(kDatasetHeader) + "', found '" +
                          (lines.empty() ? "" : lines[0]) + "'");
  }
  Dataset examples;
  for (size_t i = 1; i < lines.size(); ++i) {
    StripCr(&lines[i]);
    if (lines[i].empty()) continue;
    std::vector<std::string> fields = SplitFields(lines[i], '\t');
    std::string where = "dataset line " + std::to_string(i + 1);
    if (fields.size() != 6) throw ParseError(where + ": expected 6 fields");
    Example ex;
    ex.language = fields[0];
    ex.qid = fields[1];
    ex.mention_offset = static_cast<int32_t>(ParseInt(fields[2]));
    ex.mention_length = static_cast<int32_t>(ParseInt(fields[3]));
    ex.context = SplitWhitespace(fields[4]);
    ex.gold = ParseTypeSet(fields[5]);
    if (ex.mention_offset < 0 || ex.mention_length < 1 ||
        ex.mention_offset + ex.mention_length >
            static_cast<int32_t>(ex.context.size())) {
      throw ParseError(where + ": mention span outside context");
    }
    examples.push_back(std::move(ex));
  }
  return examples;
}

Dataset LoadDataset(const std::string &path) {
  return ParseDataset(ReadFile(path));
}

}  // namespace xlet
