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

// Comparison methods that do not read the context: an exact-match alias
// table and nearest-neighbor search over encoded mention strings.

#ifndef XLET_BASELINES_H_
#define XLET_BASELINES_H_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "xlet/corpus.h"
#include "xlet/model.h"
#include "xlet/tokenizer.h"

namespace xlet {

class AliasTable {
 public:
  // Mention string -> its most frequent qid in the training data, ties going
  // to the smaller qid. Entity types are taken from the examples' gold sets.
  static AliasTable Build(const Dataset &train);

  // Same, with entity types recomputed from the knowledge base.
  static AliasTable Build(const Dataset &train, const KnowledgeBase &kb,
                          const TypeOntology &ontology,
                          const NormalizationConfig &cfg);

  // Exact, case- and script-sensitive lookup. nullptr when absent.
  const std::string *Lookup(std::string_view mention) const;

  // Types of the looked-up entity, or the empty set.
  TypeSet Predict(std::string_view mention) const;

  size_t size() const { return mentions_.size(); }
  const std::map<std::string, std::string, std::less<>> &mentions() const {
    return mentions_;
  }

  // Lines: mention, qid, comma-separated type ids; tab-separated.
  std::string Serialize() const;
  void Save(const std::string &path) const;
  static AliasTable Parse(std::string_view text);
  static AliasTable Load(const std::string &path);

 private:
  std::map<std::string, std::string, std::less<>> mentions_;
  std::map<std::string, TypeSet, std::less<>> entity_types_;
};

inline TypeSet StringMatchPredict(std::string_view mention,
                                  const AliasTable &table) {
  return table.Predict(mention);
}

struct IndexEntry {
  std::string qid;
  TypeSet types;
  Vector vector;  // unit norm
};

// Nearest-entity search over unit vectors by inner product (cosine).
class MentionSearcher {
 public:
  virtual ~MentionSearcher() = default;
  // Index of the most similar entry, ties going to the smaller qid. Throws
  // Error on an empty index.
  virtual size_t Nearest(const Vector &query) const = 0;
  virtual const std::vector<IndexEntry> &entries() const = 0;
};

class MentionIndex : public MentionSearcher {
 public:
  MentionIndex() = default;
  // Entries are sorted by qid; vectors are normalized here.
  explicit MentionIndex(std::vector<IndexEntry> entries);

  size_t Nearest(const Vector &query) const override;
  const std::vector<IndexEntry> &entries() const override { return entries_; }
  size_t size() const { return entries_.size(); }
  int32_t dim() const { return dim_; }

  // Entities whose representative mention could not be encoded.
  int64_t skipped() const { return skipped_; }
  void set_skipped(int64_t skipped) { skipped_ = skipped; }

  // Binary: "XLETMIDX" | u32 version=1 | u32 dim | u64 count, then per
  // entry u32 qid length, qid bytes, u32 type count, i32 type ids, dim f64.
  std::string Serialize() const;
  void Save(const std::string &path) const;
  static MentionIndex Deserialize(const std::string &bytes);
  static MentionIndex Load(const std::string &path);

 private:
  std::vector<IndexEntry> entries_;
  int32_t dim_ = 0;
  int64_t skipped_ = 0;
};

// Most frequent surface form per qid, ties going to the lexicographically
// smallest string.
std::map<std::string, std::string> RepresentativeMentions(const Dataset &train);

// Encodes each training entity's representative mention with an empty
// context.
MentionIndex BuildMentionIndex(const Dataset &train, const SubwordVocab &vocab,
                               const MentionEncoder &encoder);

// Encoding of a bare mention string, unit-normalized.
Vector EncodeMention(std::string_view mention, const SubwordVocab &vocab,
                     const MentionEncoder &encoder);

TypeSet SimilarityPredict(std::string_view mention,
                          const MentionSearcher &index,
                          const SubwordVocab &vocab,
                          const MentionEncoder &encoder);

// Cluster-then-scan index: k-means over the entry vectors, then an exact scan
// of the probe clusters whose centroids are most similar to the query.
class ClusteredMentionIndex : public MentionSearcher {
 public:
  ClusteredMentionIndex(const MentionIndex &exact, int32_t clusters,
                        int32_t probes, uint64_t seed,
                        int32_t iterations = 20);

  size_t Nearest(const Vector &query) const override;
  const std::vector<IndexEntry> &entries() const override {
    return exact_.entries();
  }

 private:
  const MentionIndex &exact_;
  std::vector<Vector> centroids_;
  std::vector<std::vector<size_t>> members_;
  int32_t probes_;
};

// Fraction of queries for which both searchers return the same entry.
double TopOneAgreement(const MentionSearcher &reference,
                       const MentionSearcher &candidate,
                       const std::vector<Vector> &queries);

}  // namespace xlet

#endif  // XLET_BASELINES_H_
