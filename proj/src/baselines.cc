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

#include "xlet/baselines.h"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "xlet/random.h"
#include "xlet/text.h"

namespace xlet {
namespace {

constexpr char kIndexMagic[] = "XLETMIDX";
constexpr uint32_t kIndexVersion = 1;

std::string ReadFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string &path, const std::string &data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << data;
}

// Picks the key with the highest count, ties going to the smallest key.
std::string MostFrequent(const std::map<std::string, int64_t> &counts) {
  const std::string *best = nullptr;
  int64_t best_count = -1;
  for (const auto &[key, count] : counts) {
    if (count > best_count) {
      best = &key;
      best_count = count;
    }
  }
  return best == nullptr ? std::string() : *best;
}

template <typename T>
void PutLe(std::string *out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes, bytes + sizeof(T));
  }
  out->append(reinterpret_cast<const char *>(bytes), sizeof(T));
}

template <typename T>
T GetLe(const std::string &in, size_t *pos) {
  if (*pos + sizeof(T) > in.size()) throw ParseError("index file truncated");
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, in.data() + *pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes, bytes + sizeof(T));
  }
  *pos += sizeof(T);
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

// Index of the best-scoring candidate; candidates are visited in ascending
// index order, which is ascending qid order.
size_t ScanBest(const std::vector<IndexEntry> &entries, const Vector &query,
                const std::vector<size_t> &candidates) {
  size_t best = candidates.front();
  double best_score = entries[best].vector.dot(query);
  for (size_t c = 1; c < candidates.size(); ++c) {
    size_t i = candidates[c];
    double score = entries[i].vector.dot(query);
    if (score > best_score || (score == best_score && i < best)) {
      best = i;
      best_score = score;
    }
  }
  return best;
}

}  // namespace

AliasTable AliasTable::Build(const Dataset &train) {
  std::map<std::string, std::map<std::string, int64_t>> counts;
  AliasTable table;
  for (const Example &ex : train) {
    ++counts[ex.MentionString()][ex.qid];
    table.entity_types_.emplace(ex.qid, ex.gold);
  }
  for (const auto &[mention, qids] : counts) {
    table.mentions_.emplace(mention, MostFrequent(qids));
  }
  return table;
}

AliasTable AliasTable::Build(const Dataset &train, const KnowledgeBase &kb,
                             const TypeOntology &ontology,
                             const NormalizationConfig &cfg) {
  AliasTable table = Build(train);
  GoldTypeMapper mapper(kb, ontology, cfg);
  for (auto &[qid, types] : table.entity_types_) {
    types = mapper.TypesOf(qid).value_or(TypeSet());
  }
  return table;
}

const std::string *AliasTable::Lookup(std::string_view mention) const {
  auto it = mentions_.find(mention);
  return it == mentions_.end() ? nullptr : &it->second;
}

TypeSet AliasTable::Predict(std::string_view mention) const {
  const std::string *qid = Lookup(mention);
  if (qid == nullptr) return {};
  auto it = entity_types_.find(*qid);
  return it == entity_types_.end() ? TypeSet() : it->second;
}

std::string AliasTable::Serialize() const {
  std::string out;
  for (const auto &[mention, qid] : mentions_) {
    auto it = entity_types_.find(qid);
    out += mention + "\t" + qid + "\t" +
           (it == entity_types_.end() ? "" : FormatTypeSet(it->second)) + "\n";
  }
  return out;
}

void AliasTable::Save(const std::string &path) const {
  WriteFile(path, Serialize());
}

AliasTable AliasTable::Parse(std::string_view text) {
  AliasTable table;
  int64_t line_no = 0;
  for (const std::string &line : SplitFields(text, '\n')) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields = SplitFields(line, '\t');
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty()) {
      throw ParseError("alias table line " + std::to_string(line_no) +
                       ": expected mention, qid and types");
    }
    table.mentions_[fields[0]] = fields[1];
    table.entity_types_[fields[1]] = ParseTypeSet(fields[2]);
  }
  return table;
}

AliasTable AliasTable::Load(const std::string &path) {
  return Parse(ReadFile(path));
}

MentionIndex::MentionIndex(std::vector<IndexEntry> entries)
    : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(),
            [](const IndexEntry &a, const IndexEntry &b) {
              return a.qid < b.qid;
            });
  for (size_t i = 0; i < entries_.size(); ++i) {
    IndexEntry &e = entries_[i];
    if (i > 0 && e.qid == entries_[i - 1].qid) {
      throw ValidationError("duplicate qid in mention index: " + e.qid);
    }
    if (i == 0) dim_ = static_cast<int32_t>(e.vector.size());
    if (e.vector.size() != dim_) {
      throw ValidationError("mention index vectors differ in dimension");
    }
    double norm = e.vector.norm();
    if (!(norm > 0)) throw ValidationError("zero vector for " + e.qid);
    e.vector /= norm;
  }
}

size_t MentionIndex::Nearest(const Vector &query) const {
  if (entries_.empty()) throw Error("mention index is empty");
  std::vector<size_t> all(entries_.size());
  for (size_t i = 0; i < all.size(); ++i) all[i] = i;
  return ScanBest(entries_, query, all);
}

std::string MentionIndex::Serialize() const {
  std::string out(kIndexMagic, 8);
  PutLe<uint32_t>(&out, kIndexVersion);
  PutLe<uint32_t>(&out, static_cast<uint32_t>(dim_));
  PutLe<uint64_t>(&out, entries_.size());
  for (const IndexEntry &e : entries_) {
    PutLe<uint32_t>(&out, static_cast<uint32_t>(e.qid.size()));
    out += e.qid;
    PutLe<uint32_t>(&out, static_cast<uint32_t>(e.types.size()));
    for (TypeId id : e.types) PutLe<int32_t>(&out, id);
    for (Eigen::Index i = 0; i < e.vector.size(); ++i) {
      PutLe<double>(&out, e.vector(i));
    }
  }
  return out;
}

void MentionIndex::Save(const std::string &path) const {
  WriteFile(path, Serialize());
}

MentionIndex MentionIndex::Deserialize(const std::string &bytes) {
  if (bytes.size() < 12 || bytes.compare(0, 8, kIndexMagic) != 0) {
    throw ValidationError("not an xlet mention index");
  }
  size_t pos = 8;
  auto version = GetLe<uint32_t>(bytes, &pos);
  if (version != kIndexVersion) {
    throw ValidationError("mention index version mismatch: expected " +
                          std::to_string(kIndexVersion) + ", found " +
                          std::to_string(version));
  }
  auto dim = GetLe<uint32_t>(bytes, &pos);
  auto count = GetLe<uint64_t>(bytes, &pos);
  std::vector<IndexEntry> entries;
  for (uint64_t n = 0; n < count; ++n) {
    IndexEntry e;
    auto qid_size = GetLe<uint32_t>(bytes, &pos);
    if (pos + qid_size > bytes.size()) throw ParseError("index file truncated");
    e.qid = bytes.substr(pos, qid_size);
    pos += qid_size;
    auto types = GetLe<uint32_t>(bytes, &pos);
    for (uint32_t t = 0; t < types; ++t) e.types.insert(GetLe<int32_t>(bytes, &pos));
    e.vector.resize(dim);
    for (uint32_t i = 0; i < dim; ++i) e.vector(i) = GetLe<double>(bytes, &pos);
    entries.push_back(std::move(e));
  }
  if (pos != bytes.size()) throw ParseError("trailing bytes in index file");
  std::vector<IndexEntry> stored = entries;
  MentionIndex index(std::move(entries));
  index.dim_ = static_cast<int32_t>(dim);
  // Keep the stored bits; normalizing a unit vector again can move the last
  // place.
  for (size_t i = 0; i < stored.size(); ++i) {
    if (stored[i].qid != index.entries_[i].qid) {
      throw ValidationError("mention index entries are not sorted by qid");
    }
    index.entries_[i].vector = std::move(stored[i].vector);
  }
  return index;
}

MentionIndex MentionIndex::Load(const std::string &path) {
  return Deserialize(ReadFile(path));
}

std::map<std::string, std::string> RepresentativeMentions(
    const Dataset &train) {
  std::map<std::string, std::map<std::string, int64_t>> forms;
  for (const Example &ex : train) ++forms[ex.qid][ex.MentionString()];
  std::map<std::string, std::string> out;
  for (const auto &[qid, counts] : forms) out[qid] = MostFrequent(counts);
  return out;
}

Vector EncodeMention(std::string_view mention, const SubwordVocab &vocab,
                     const MentionEncoder &encoder) {
  InputSequence x =
      BuildInput(SplitWhitespace(mention), {}, vocab, encoder.cap());
  Vector v = encoder.Encode(x);
  double norm = v.norm();
  if (!(norm > 0)) throw ValidationError("mention encodes to a zero vector");
  return v / norm;
}

MentionIndex BuildMentionIndex(const Dataset &train, const SubwordVocab &vocab,
                               const MentionEncoder &encoder) {
  std::map<std::string, TypeSet> types;
  for (const Example &ex : train) types.emplace(ex.qid, ex.gold);
  std::vector<IndexEntry> entries;
  int64_t skipped = 0;
  for (const auto &[qid, mention] : RepresentativeMentions(train)) {
    IndexEntry e;
    e.qid = qid;
    e.types = types[qid];
    try {
      e.vector = EncodeMention(mention, vocab, encoder);
    } catch (const ValidationError &) {
      ++skipped;
      continue;
    }
    entries.push_back(std::move(e));
  }
  MentionIndex index(std::move(entries));
  index.set_skipped(skipped);
  return index;
}

TypeSet SimilarityPredict(std::string_view mention,
                          const MentionSearcher &index,
                          const SubwordVocab &vocab,
                          const MentionEncoder &encoder) {
  if (index.entries().empty()) throw Error("mention index is empty");
  Vector query = EncodeMention(mention, vocab, encoder);
  return index.entries()[index.Nearest(query)].types;
}

ClusteredMentionIndex::ClusteredMentionIndex(const MentionIndex &exact,
                                             int32_t clusters, int32_t probes,
                                             uint64_t seed, int32_t iterations)
    : exact_(exact), probes_(probes) {
  const std::vector<IndexEntry> &entries = exact.entries();
  if (entries.empty()) throw Error("mention index is empty");
  if (clusters < 1 || probes < 1) {
    throw ConfigError("clusters and probes must be >= 1");
  }
  const size_t k = std::min<size_t>(clusters, entries.size());
  Rng rng(seed);
  for (size_t i : rng.SampleWithoutReplacement(entries.size(), k)) {
    centroids_.push_back(entries[i].vector);
  }
  std::vector<size_t> assignment(entries.size(), 0);
  for (int32_t it = 0; it <= iterations; ++it) {
    for (size_t i = 0; i < entries.size(); ++i) {
      size_t best = 0;
      double best_score = -2.0;
      for (size_t c = 0; c < centroids_.size(); ++c) {
        double score = centroids_[c].dot(entries[i].vector);
        if (score > best_score) {
          best = c;
          best_score = score;
        }
      }
      assignment[i] = best;
    }
    if (it == iterations) break;
    // Spherical k-means update; empty clusters keep their centroid.
    std::vector<Vector> sums(centroids_.size(),
                             Vector::Zero(centroids_.front().size()));
    for (size_t i = 0; i < entries.size(); ++i) {
      sums[assignment[i]] += entries[i].vector;
    }
    for (size_t c = 0; c < centroids_.size(); ++c) {
      double norm = sums[c].norm();
      if (norm > 0) centroids_[c] = sums[c] / norm;
    }
  }
  members_.resize(centroids_.size());
  for (size_t i = 0; i < entries.size(); ++i) {
    members_[assignment[i]].push_back(i);
  }
}

size_t ClusteredMentionIndex::Nearest(const Vector &query) const {
  std::vector<std::pair<double, size_t>> ranked;
  for (size_t c = 0; c < centroids_.size(); ++c) {
    ranked.emplace_back(-centroids_[c].dot(query), c);
  }
  std::sort(ranked.begin(), ranked.end());
  std::vector<size_t> candidates;
  // Probe the closest clusters; keep going past the probe budget only while
  // every probed cluster was empty.
  for (size_t p = 0; p < ranked.size(); ++p) {
    if (p >= static_cast<size_t>(probes_) && !candidates.empty()) break;
    const std::vector<size_t> &m = members_[ranked[p].second];
    candidates.insert(candidates.end(), m.begin(), m.end());
  }
  std::sort(candidates.begin(), candidates.end());
  return ScanBest(exact_.entries(), query, candidates);
}

double TopOneAgreement(const MentionSearcher &reference,
                       const MentionSearcher &candidate,
                       const std::vector<Vector> &queries) {
  if (queries.empty()) return 1.0;
  int64_t agree = 0;
  for (const Vector &q : queries) {
    if (reference.Nearest(q) == candidate.Nearest(q)) ++agree;
  }
  return static_cast<double>(agree) / static_cast<double>(queries.size());
}

}  // namespace xlet
