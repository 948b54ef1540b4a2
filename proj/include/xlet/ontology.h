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

// Type ontology: normalization of knowledge-base category strings into coarser
// English type strings, and the frequency-ranked typeset built from them.

#ifndef XLET_ONTOLOGY_H_
#define XLET_ONTOLOGY_H_

#include <cstdint>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "xlet/common.h"
#include "xlet/entity.h"

namespace xlet {

// A temporal pattern is a sequence of whole-token regular expressions. Most
// patterns are a single token ("1920", "1920s", "20th-century"); the spaced
// ordinal-century form spans two tokens ("20th century").
class TemporalPattern {
 public:
  explicit TemporalPattern(std::string_view source);

  // Number of tokens matched starting at tokens[pos], or 0 for no match.
  size_t Match(const std::vector<std::string> &tokens, size_t pos) const;

  const std::string &source() const { return source_; }

 private:
  std::string source_;
  std::vector<std::regex> parts_;
};

struct NormalizationConfig {
  std::vector<std::string> prepositions;
  std::vector<std::string> stopwords;
  std::vector<TemporalPattern> temporal_patterns;

  // Built-in English lists.
  static NormalizationConfig Default();

  // Reads the sectioned plain-text format:
  //
  //   [prepositions]
  //   in
  //   [stopwords]
  //   the
  //   [temporal]
  //   [0-9]{3,4}s
  //
  // Blank lines and lines starting with '#' are ignored.
  static NormalizationConfig Parse(std::string_view text);
  static NormalizationConfig Load(const std::string &path);

  // Checks that the preposition list is non-empty and duplicate-free.
  void Validate() const;

  bool IsPreposition(std::string_view token) const;
  bool IsStopword(std::string_view token) const;
};

// Maps one raw category string to its set of normalized type strings.
std::set<std::string> NormalizeCategory(std::string_view raw,
                                        const NormalizationConfig &cfg);

class TypeOntology {
 public:
  struct Entry {
    std::string type;
    TypeId id = 0;
    int64_t frequency = 0;
    int32_t rank = 0;
  };

  static constexpr int32_t kPaperCapacity = 10000;

  TypeOntology() = default;

  // Entries must satisfy the ranking invariants; throws ValidationError
  // otherwise.
  TypeOntology(std::vector<Entry> entries, int32_t capacity);

  size_t size() const { return by_rank_.size(); }
  bool empty() const { return by_rank_.empty(); }
  int32_t capacity() const { return capacity_; }

  // Entries in rank order.
  const std::vector<Entry> &entries() const { return by_rank_; }

  // Type id for a normalized type string, if present.
  std::optional<TypeId> Find(std::string_view type) const;

  // Throw LookupError for unknown ids.
  const Entry &Get(TypeId id) const;
  int32_t RankOf(TypeId id) const { return Get(id).rank; }
  const std::string &TypeString(TypeId id) const { return Get(id).type; }

  bool Contains(TypeId id) const { return by_id_.count(id) > 0; }

  // One past the largest type id; the width of score and indicator vectors.
  int32_t IdSpace() const { return id_space_; }

  void Save(const std::string &path) const;
  std::string Serialize() const;
  static TypeOntology Parse(std::string_view text);
  static TypeOntology Load(const std::string &path);

 private:
  std::vector<Entry> by_rank_;
  std::unordered_map<TypeId, size_t> by_id_;
  std::unordered_map<std::string, TypeId> by_type_;
  int32_t capacity_ = kPaperCapacity;
  int32_t id_space_ = 0;
};

// Counts type occurrences; counters from independent shards can be merged in
// any order with the same result.
class TypeCounter {
 public:
  void Add(const std::string &type, int64_t count = 1) {
    counts_[type] += count;
  }
  void Merge(const TypeCounter &other);
  const std::map<std::string, int64_t> &counts() const { return counts_; }

 private:
  std::map<std::string, int64_t> counts_;
};

// Keeps the K most frequent types, ranked by descending frequency with ties
// broken by ascending type string. Type id equals rank.
TypeOntology BuildOntology(const TypeCounter &counter, int32_t capacity);
TypeOntology BuildOntology(const std::vector<std::string> &occurrences,
                           int32_t capacity);

// Inclusive rank interval.
struct FrequencyBucket {
  int32_t lo = 0;
  int32_t hi = 0;

  bool Contains(int32_t rank) const { return rank >= lo && rank <= hi; }
  std::string Label() const;
  bool operator==(const FrequencyBucket &other) const = default;
};

// [0,99], [100,999], [1000,9999].
const std::vector<FrequencyBucket> &CanonicalBuckets();

// Canonical bucket holding the rank of type_id, or nullopt past rank 9999.
// Throws LookupError for unknown ids.
std::optional<FrequencyBucket> BucketOf(TypeId id, const TypeOntology &ontology);

// Normalizes every category of the entity and keeps the types present in the
// ontology.
TypeSet MapEntityTypes(const EntityRecord &entity,
                       const TypeOntology &ontology,
                       const NormalizationConfig &cfg);

}  // namespace xlet

#endif  // XLET_ONTOLOGY_H_
