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

#include "xlet/ontology.h"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "xlet/text.h"

namespace xlet {
namespace {

constexpr char kOntologyHeader[] = "#xlet-ontology v1";

std::string ReadFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool Contains(const std::vector<std::string> &list, std::string_view token) {
  return std::find(list.begin(), list.end(), token) != list.end();
}

}  // namespace

TemporalPattern::TemporalPattern(std::string_view source) : source_(source) {
  for (const std::string &part : SplitWhitespace(source)) {
    try {
      parts_.emplace_back(part, std::regex::ECMAScript | std::regex::optimize);
    } catch (const std::regex_error &e) {
      throw ConfigError("bad temporal pattern '" + source_ + "': " + e.what());
    }
  }
  if (parts_.empty()) throw ConfigError("empty temporal pattern");
}

size_t TemporalPattern::Match(const std::vector<std::string> &tokens,
                              size_t pos) const {
  if (pos + parts_.size() > tokens.size()) return 0;
  for (size_t i = 0; i < parts_.size(); ++i) {
    if (!std::regex_match(tokens[pos + i], parts_[i])) return 0;
  }
  return parts_.size();
}

NormalizationConfig NormalizationConfig::Default() {
  NormalizationConfig cfg;
  cfg.prepositions = {"in",  "of",   "from",  "by",     "at",    "on",
                      "for", "with", "to",    "under",  "during", "about"};
  cfg.stopwords = {"the", "a", "an", "and", "or", "its", "their"};
  for (const char *p : {
           "[0-9]{3,4}",
           "[0-9]{3,4}s",
           "[0-9]{3,4}(-|–)[0-9]{2,4}",
           "[0-9]{1,2}(st|nd|rd|th)-(century|centuries)",
           "[0-9]{1,2}(st|nd|rd|th) (century|centuries)",
       }) {
    cfg.temporal_patterns.emplace_back(p);
  }
  return cfg;
}

NormalizationConfig NormalizationConfig::Parse(std::string_view text) {
  NormalizationConfig cfg;
  std::string section;
  int line_no = 0;
  for (const std::string &raw : SplitFields(text, '\n')) {
    ++line_no;
    std::string line = raw;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
      line.pop_back();
    }
    size_t start = line.find_first_not_of(' ');
    if (start == std::string::npos || line[start] == '#') continue;
    line = line.substr(start);
    if (line.front() == '[' && line.back() == ']') {
      section = line.substr(1, line.size() - 2);
      if (section != "prepositions" && section != "stopwords" &&
          section != "temporal") {
        throw ConfigError("line " + std::to_string(line_no) +
                          ": unknown section [" + section + "]");
      }
      continue;
    }
    if (section.empty()) {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": entry outside of a section");
    }
    if (section == "prepositions") {
      cfg.prepositions.push_back(Lowercase(line));
    } else if (section == "stopwords") {
      cfg.stopwords.push_back(Lowercase(line));
    } else {
      cfg.temporal_patterns.emplace_back(line);
    }
  }
  cfg.Validate();
  return cfg;
}

NormalizationConfig NormalizationConfig::Load(const std::string &path) {
  return Parse(ReadFile(path));
}

void NormalizationConfig::Validate() const {
  if (prepositions.empty()) {
    throw ConfigError("preposition list is empty");
  }
  std::unordered_set<std::string> seen;
  for (const std::string &p : prepositions) {
    if (!seen.insert(p).second) {
      throw ConfigError("duplicate preposition: " + p);
    }
  }
}

bool NormalizationConfig::IsPreposition(std::string_view token) const {
  return Contains(prepositions, token);
}

bool NormalizationConfig::IsStopword(std::string_view token) const {
  return Contains(stopwords, token);
}

std::set<std::string> NormalizeCategory(std::string_view raw,
                                        const NormalizationConfig &cfg) {
  std::vector<std::string> tokens = SplitWhitespace(Lowercase(raw));

  // Split into a head segment and preposition-led segments. Stopwords are
  // removed from the head only.
  std::vector<std::vector<std::string>> segments(1);
  for (std::string &token : tokens) {
    if (cfg.IsPreposition(token)) {
      segments.emplace_back();
    } else if (segments.size() == 1 && cfg.IsStopword(token)) {
      continue;
    }
    segments.back().push_back(std::move(token));
  }

  // Delete temporal tokens. A deletion can join the halves of a spaced form
  // ("19th 1920s century"), so repeat until nothing matches.
  for (std::vector<std::string> &segment : segments) {
    bool changed = true;
    while (changed) {
      changed = false;
      std::vector<std::string> kept;
      for (size_t pos = 0; pos < segment.size();) {
        size_t matched = 0;
        for (const TemporalPattern &pattern : cfg.temporal_patterns) {
          matched = pattern.Match(segment, pos);
          if (matched > 0) break;
        }
        if (matched > 0) {
          pos += matched;
          changed = true;
        } else {
          kept.push_back(std::move(segment[pos++]));
        }
      }
      segment = std::move(kept);
    }
  }

  std::set<std::string> types;
  for (size_t i = 0; i < segments.size(); ++i) {
    // A preposition left without an object carries no type information.
    size_t min_size = i == 0 ? 1 : 2;
    if (segments[i].size() < min_size) continue;
    types.insert(Join(segments[i], " "));
  }
  return types;
}

TypeOntology::TypeOntology(std::vector<Entry> entries, int32_t capacity)
    : capacity_(capacity) {
  if (capacity < 1) throw ValidationError("ontology capacity must be >= 1");
  if (entries.size() > static_cast<size_t>(capacity)) {
    throw ValidationError("ontology has more entries than its capacity");
  }
  std::sort(entries.begin(), entries.end(),
            [](const Entry &a, const Entry &b) { return a.rank < b.rank; });
  for (size_t i = 0; i < entries.size(); ++i) {
    const Entry &e = entries[i];
    if (e.rank != static_cast<int32_t>(i)) {
      throw ValidationError("ontology ranks are not a permutation of 0..n-1");
    }
    if (e.id < 0) throw ValidationError("negative type id");
    if (i > 0) {
      const Entry &prev = entries[i - 1];
      if (e.frequency > prev.frequency ||
          (e.frequency == prev.frequency && e.type <= prev.type)) {
        throw ValidationError("ontology entry '" + e.type +
                              "' violates frequency/lexicographic ordering");
      }
    }
    if (!by_type_.emplace(e.type, e.id).second) {
      throw ValidationError("duplicate type string: " + e.type);
    }
    if (!by_id_.emplace(e.id, i).second) {
      throw ValidationError("duplicate type id: " + std::to_string(e.id));
    }
    id_space_ = std::max(id_space_, e.id + 1);
  }
  by_rank_ = std::move(entries);
}

std::optional<TypeId> TypeOntology::Find(std::string_view type) const {
  auto it = by_type_.find(std::string(type));
  if (it == by_type_.end()) return std::nullopt;
  return it->second;
}

const TypeOntology::Entry &TypeOntology::Get(TypeId id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) {
    throw LookupError("unknown type id " + std::to_string(id));
  }
  return by_rank_[it->second];
}

std::string TypeOntology::Serialize() const {
  std::string out = kOntologyHeader;
  out += "\n#capacity\t" + std::to_string(capacity_) + "\n";
  for (const Entry &e : by_rank_) {
    out += std::to_string(e.rank) + "\t" + std::to_string(e.id) + "\t" +
           std::to_string(e.frequency) + "\t" + e.type + "\n";
  }
  return out;
}

void TypeOntology::Save(const std::string &path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << Serialize();
}

TypeOntology TypeOntology::Parse(std::string_view text) {
  std::vector<std::string> lines = SplitFields(text, '\n');
  if (lines.empty() || lines[0] != kOntologyHeader) {
    throw ValidationError("ontology schema mismatch: expected '" +
                          std::string(kOntologyHeader) + "', found '" +
                          (lines.empty() ? "" : lines[0]) + "'");
  }
  int32_t capacity = kPaperCapacity;
  std::vector<Entry> entries;
  for (size_t i = 1; i < lines.size(); ++i) {
    const std::string &line = lines[i];
    if (line.empty()) continue;
    std::vector<std::string> fields = SplitFields(line, '\t');
    if (line[0] == '#') {
      if (fields.size() == 2 && fields[0] == "#capacity") {
        capacity = static_cast<int32_t>(ParseInt(fields[1]));
      }
      continue;
    }
    if (fields.size() != 4) {
      throw ParseError("ontology line " + std::to_string(i + 1) +
                       ": expected 4 fields");
    }
    Entry e;
    e.rank = static_cast<int32_t>(ParseInt(fields[0]));
    e.id = static_cast<TypeId>(ParseInt(fields[1]));
    e.frequency = ParseInt(fields[2]);
    e.type = fields[3];
    entries.push_back(std::move(e));
  }
  return TypeOntology(std::move(entries), capacity);
}

TypeOntology TypeOntology::Load(const std::string &path) {
  return Parse(ReadFile(path));
}

void TypeCounter::Merge(const TypeCounter &other) {
  for (const auto &[type, count] : other.counts_) counts_[type] += count;
}

TypeOntology BuildOntology(const TypeCounter &counter, int32_t capacity) {
  if (capacity < 1) throw ConfigError("ontology capacity K must be >= 1");
  std::vector<std::pair<std::string, int64_t>> ranked(
      counter.counts().begin(), counter.counts().end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto &a, const auto &b) {
                     if (a.second != b.second) return a.second > b.second;
                     return a.first < b.first;
                   });
  if (ranked.size() > static_cast<size_t>(capacity)) ranked.resize(capacity);
  std::vector<TypeOntology::Entry> entries;
  entries.reserve(ranked.size());
  for (size_t i = 0; i < ranked.size(); ++i) {
    TypeOntology::Entry e;
    e.type = ranked[i].first;
    e.id = static_cast<TypeId>(i);
    e.frequency = ranked[i].second;
    e.rank = static_cast<int32_t>(i);
    entries.push_back(std::move(e));
  }
  return TypeOntology(std::move(entries), capacity);
}

TypeOntology BuildOntology(const std::vector<std::string> &occurrences,
                           int32_t capacity) {
  TypeCounter counter;
  for (const std::string &type : occurrences) counter.Add(type);
  return BuildOntology(counter, capacity);
}

std::string FrequencyBucket::Label() const {
  return "[" + std::to_string(lo) + "," + std::to_string(hi) + "]";
}

const std::vector<FrequencyBucket> &CanonicalBuckets() {
  static const std::vector<FrequencyBucket> buckets = {
      {0, 99}, {100, 999}, {1000, 9999}};
  return buckets;
}

std::optional<FrequencyBucket> BucketOf(TypeId id,
                                        const TypeOntology &ontology) {
  int32_t rank = ontology.RankOf(id);
  for (const FrequencyBucket &bucket : CanonicalBuckets()) {
    if (bucket.Contains(rank)) return bucket;
  }
  return std::nullopt;
}

TypeSet MapEntityTypes(const EntityRecord &entity,
                       const TypeOntology &ontology,
                       const NormalizationConfig &cfg) {
  TypeSet ids;
  for (const std::string &category : entity.categories) {
    for (const std::string &type : NormalizeCategory(category, cfg)) {
      if (auto id = ontology.Find(type)) ids.insert(*id);
    }
  }
  return ids;
}

}  // namespace xlet
