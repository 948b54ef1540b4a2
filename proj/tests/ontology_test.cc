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

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "xlet/random.h"
#include "xlet/text.h"

namespace xlet {
namespace {

using Types = std::set<std::string>;

Types Norm(std::string_view raw) {
  return NormalizeCategory(raw, NormalizationConfig::Default());
}

TEST(NormalizeTest, TemporalPrefixIsRemoved) {
  EXPECT_EQ(Norm("20th-century atheists"), Types{"atheists"});
}

TEST(NormalizeTest, EmptyInput) { EXPECT_TRUE(Norm("").empty()); }

TEST(NormalizeTest, PrepositionStartsSegment) {
  EXPECT_EQ(Norm("Cities in Europe"), (Types{"cities", "in europe"}));
}

TEST(NormalizeTest, LowercasingOnly) {
  EXPECT_EQ(Norm("Living people"), Types{"living people"});
}

TEST(NormalizeTest, StopwordsOnlyLeaveTheHead) {
  EXPECT_EQ(Norm("The kings of the Franks"),
            (Types{"kings", "of the franks"}));
}

TEST(NormalizeTest, PurelyTemporalIsEmpty) {
  EXPECT_TRUE(Norm("1920s").empty());
  EXPECT_TRUE(Norm("19th century").empty());
  EXPECT_TRUE(Norm("1914–1918").empty());
}

TEST(NormalizeTest, TemporalTokensMatchWholeTokensOnly) {
  EXPECT_EQ(Norm("Route 1920x"), Types{"route 1920x"});
  EXPECT_EQ(Norm("Area 51"), Types{"area 51"});
}

TEST(NormalizeTest, LonePrepositionIsDropped) {
  EXPECT_EQ(Norm("Buildings completed in 1905"),
            Types{"buildings completed"});
}

TEST(NormalizeTest, MatchesHandDerivedTable) {
  std::ifstream in(std::string(XLET_TEST_DATA_DIR) +
                   "/normalization_table.tsv");
  ASSERT_TRUE(in);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') continue;
    std::vector<std::string> fields = SplitFields(line, '\t');
    ASSERT_EQ(fields.size(), 2u) << line;
    Types expected;
    for (const std::string &t : SplitFields(fields[1], '|')) {
      std::vector<std::string> words = SplitWhitespace(t);
      if (!words.empty()) expected.insert(Join(words, " "));
    }
    EXPECT_EQ(Norm(fields[0]), expected) << "category: " << fields[0];
    ++rows;
  }
  EXPECT_GE(rows, 30);
}

TEST(NormalizeTest, IdempotentOnOutputs) {
  std::ifstream in(std::string(XLET_TEST_DATA_DIR) +
                   "/normalization_table.tsv");
  std::string line;
  const NormalizationConfig cfg = NormalizationConfig::Default();
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') continue;
    for (const std::string &type :
         NormalizeCategory(SplitFields(line, '\t')[0], cfg)) {
      EXPECT_EQ(NormalizeCategory(type, cfg), Types{type});
      EXPECT_EQ(Lowercase(type), type);
      for (const std::string &token : SplitWhitespace(type)) {
        for (const TemporalPattern &p : cfg.temporal_patterns) {
          EXPECT_EQ(p.Match({token}, 0), 0u) << token;
        }
      }
    }
  }
}

TEST(NormalizeTest, RandomCategoriesSatisfyProperties) {
  const NormalizationConfig cfg = NormalizationConfig::Default();
  const std::vector<std::string> vocab = {
      "The", "Kings", "of", "in", "Europe", "1920s", "20th-century",
      "and", "People", "from", "a", "Rivers", "1850", "19th", "century",
      "Finland", "by", "Ölands", "ÉCOLES"};
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    std::vector<std::string> words;
    size_t n = rng.Uniform(7);
    for (size_t j = 0; j < n; ++j) words.push_back(vocab[rng.Uniform(vocab.size())]);
    for (const std::string &type : NormalizeCategory(Join(words, " "), cfg)) {
      EXPECT_EQ(Lowercase(type), type);
      EXPECT_EQ(NormalizeCategory(type, cfg), Types{type}) << Join(words, " ");
    }
  }
}

TEST(NormalizationConfigTest, ParsesSections) {
  NormalizationConfig cfg = NormalizationConfig::Parse(
      "# custom\n[prepositions]\nin\nOF\n[stopwords]\nthe\n[temporal]\n"
      "[0-9]{4}\n");
  EXPECT_EQ(cfg.prepositions, (std::vector<std::string>{"in", "of"}));
  EXPECT_TRUE(cfg.IsStopword("the"));
  EXPECT_EQ(NormalizeCategory("The Lakes of Finland 1999", cfg),
            (Types{"lakes", "of finland"}));
}

TEST(NormalizationConfigTest, RejectsBadConfigs) {
  EXPECT_THROW(NormalizationConfig::Parse("[stopwords]\nthe\n"), ConfigError);
  EXPECT_THROW(NormalizationConfig::Parse("[prepositions]\nin\nin\n"),
               ConfigError);
  EXPECT_THROW(NormalizationConfig::Parse("[colors]\nred\n"), ConfigError);
  EXPECT_THROW(NormalizationConfig::Parse("in\n"), ConfigError);
  EXPECT_THROW(NormalizationConfig::Parse("[prepositions]\nin\n[temporal]\n(\n"),
               ConfigError);
}

TEST(BuildOntologyTest, CapacityOne) {
  std::vector<std::string> stream(5, "people");
  stream.insert(stream.end(), 2, "atheists");
  TypeOntology o = BuildOntology(stream, 1);
  ASSERT_EQ(o.size(), 1u);
  EXPECT_EQ(o.entries()[0].type, "people");
  EXPECT_EQ(o.entries()[0].id, 0);
  EXPECT_EQ(o.entries()[0].frequency, 5);
  EXPECT_EQ(o.entries()[0].rank, 0);
}

TEST(BuildOntologyTest, LexicographicTieBreak) {
  TypeOntology o = BuildOntology({"b", "a", "b", "a"}, 2);
  EXPECT_EQ(o.TypeString(0), "a");
  EXPECT_EQ(o.TypeString(1), "b");
}

TEST(BuildOntologyTest, EmptyStream) {
  EXPECT_TRUE(BuildOntology(std::vector<std::string>{}, 10).empty());
}

// Brute-force reference: count with a map, sort by (-count, string), cut.
std::vector<std::pair<std::string, int64_t>> OracleRanking(
    const std::vector<std::string> &stream, size_t k) {
  std::map<std::string, int64_t> counts;
  for (const std::string &s : stream) counts[s]++;
  std::vector<std::pair<std::string, int64_t>> v(counts.begin(), counts.end());
  std::sort(v.begin(), v.end(), [](const auto &a, const auto &b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (v.size() > k) v.resize(k);
  return v;
}

TEST(BuildOntologyTest, MatchesBruteForceCounter) {
  Rng rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::string> stream;
    size_t n = rng.Uniform(40);
    for (size_t i = 0; i < n; ++i) {
      stream.push_back(std::string(1, static_cast<char>('a' + rng.Uniform(8))));
    }
    size_t k = 1 + rng.Uniform(10);
    TypeOntology o = BuildOntology(stream, static_cast<int32_t>(k));
    auto expected = OracleRanking(stream, k);
    ASSERT_EQ(o.size(), expected.size());
    for (size_t r = 0; r < expected.size(); ++r) {
      const TypeOntology::Entry &e = o.entries()[r];
      EXPECT_EQ(e.rank, static_cast<int32_t>(r));
      EXPECT_EQ(e.type, expected[r].first);
      EXPECT_EQ(e.frequency, expected[r].second);
    }
  }
}

TEST(BuildOntologyTest, MergedShardsMatchSingleCounter) {
  TypeCounter all, left, right;
  for (const char *t : {"x", "y", "x", "z"}) all.Add(t);
  left.Add("x");
  left.Add("z");
  right.Add("y");
  right.Add("x");
  right.Merge(left);
  EXPECT_EQ(right.counts(), all.counts());
}

TEST(TypeOntologyTest, RejectsBrokenInvariants) {
  using E = TypeOntology::Entry;
  EXPECT_THROW(TypeOntology({{"a", 0, 1, 0}, {"b", 1, 2, 1}}, 10),
               ValidationError);
  EXPECT_THROW(TypeOntology({{"b", 0, 2, 0}, {"a", 1, 2, 1}}, 10),
               ValidationError);
  EXPECT_THROW(TypeOntology({{"a", 0, 2, 0}, {"a", 1, 1, 1}}, 10),
               ValidationError);
  EXPECT_THROW(TypeOntology({{"a", 0, 2, 0}, {"b", 1, 1, 2}}, 10),
               ValidationError);
  EXPECT_THROW(TypeOntology({E{"a", 0, 2, 0}, E{"b", 1, 1, 1}}, 1),
               ValidationError);
}

TEST(TypeOntologyTest, SerializationRoundTrips) {
  TypeOntology o = BuildOntology({"in europe", "people", "people", "écoles"}, 10);
  TypeOntology back = TypeOntology::Parse(o.Serialize());
  EXPECT_EQ(back.Serialize(), o.Serialize());
  EXPECT_EQ(back.capacity(), 10);
  EXPECT_EQ(*back.Find("écoles"), *o.Find("écoles"));
  EXPECT_EQ(o.Serialize().substr(0, 18), "#xlet-ontology v1\n");
}

TEST(TypeOntologyTest, SchemaMismatchNamesVersions) {
  try {
    TypeOntology::Parse("#xlet-ontology v9\n#capacity\t1\n");
    FAIL();
  } catch (const ValidationError &e) {
    std::string what = e.what();
    EXPECT_NE(what.find("v1"), std::string::npos);
    EXPECT_NE(what.find("v9"), std::string::npos);
  }
}

TypeOntology RankedOntology(int32_t n) {
  std::vector<TypeOntology::Entry> entries;
  for (int32_t i = 0; i < n; ++i) {
    char name[16];
    std::snprintf(name, sizeof(name), "t%05d", i);
    entries.push_back({name, i, n - i, i});
  }
  return TypeOntology(std::move(entries), n);
}

TEST(BucketTest, InclusiveBoundaries) {
  TypeOntology o = RankedOntology(10001);
  EXPECT_EQ(BucketOf(99, o)->Label(), "[0,99]");
  EXPECT_EQ(BucketOf(100, o)->Label(), "[100,999]");
  EXPECT_EQ(BucketOf(999, o)->Label(), "[100,999]");
  EXPECT_EQ(BucketOf(1000, o)->Label(), "[1000,9999]");
  EXPECT_EQ(BucketOf(9999, o)->Label(), "[1000,9999]");
  EXPECT_FALSE(BucketOf(10000, o).has_value());
  EXPECT_THROW(BucketOf(20000, o), LookupError);
}

TEST(BucketTest, CanonicalBucketsPartitionRanks) {
  const auto &buckets = CanonicalBuckets();
  ASSERT_EQ(buckets.size(), 3u);
  for (int32_t r = 0; r < 10000; ++r) {
    int hits = 0;
    for (const FrequencyBucket &b : buckets) hits += b.Contains(r);
    EXPECT_EQ(hits, 1) << r;
  }
}

TEST(MapEntityTypesTest, IntersectsWithOntology) {
  TypeOntology o = BuildOntology({"people", "people", "in europe"}, 10);
  const NormalizationConfig cfg = NormalizationConfig::Default();
  EntityRecord e{"Q1", "X", {"20th-century atheists", "People"}};
  EXPECT_EQ(MapEntityTypes(e, o, cfg), TypeSet{*o.Find("people")});
  EXPECT_TRUE(MapEntityTypes({"Q2", "Y", {}}, o, cfg).empty());
  EntityRecord full{"Q3", "Z", {"People in Europe"}};
  EXPECT_EQ(MapEntityTypes(full, o, cfg),
            (TypeSet{*o.Find("people"), *o.Find("in europe")}));
}

}  // namespace
}  // namespace xlet
