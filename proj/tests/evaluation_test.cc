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


#include "xlet/evaluation.h"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "xlet/random.h"

namespace xlet {
namespace {

PredictionRecord Rec(TypeSet predicted, TypeSet gold, int64_t index = 0,
                     const std::string &language = "en") {
  return {language, "Q" + std::to_string(index), index, std::move(predicted),
          std::move(gold)};
}

// Ontology whose type i has frequency n - i, so id == rank.
TypeOntology RankedOntology(int n) {
  TypeCounter counter;
  for (int i = 0; i < n; ++i) counter.Add("type " + std::to_string(1000 + i), n - i);
  return BuildOntology(counter, n);
}

// Independent oracle: averages computed with explicit fraction lists.
struct OracleResult {
  double p, r, f;
};
OracleResult Oracle(const std::vector<PredictionRecord> &records) {
  std::vector<double> ps, rs;
  for (const auto &rec : records) {
    int hits = 0;
    for (TypeId t : rec.predicted) hits += static_cast<int>(rec.gold.count(t));
    if (!rec.predicted.empty()) ps.push_back(double(hits) / rec.predicted.size());
    if (!rec.gold.empty()) rs.push_back(double(hits) / rec.gold.size());
  }
  auto mean = [](const std::vector<double> &v) {
    if (v.empty()) return 0.0;
    double s = 0;
    for (double x : v) s += x;
    return 100.0 * s / v.size();
  };
  double p = mean(ps), r = mean(rs);
  return {p, r, p + r > 0 ? 2 * p * r / (p + r) : 0.0};
}

TypeSet RandomSet(Rng *rng, int universe, int max_size) {
  TypeSet s;
  int n = static_cast<int>(rng->Uniform(max_size + 1));
  for (int i = 0; i < n; ++i) s.insert(static_cast<TypeId>(rng->Uniform(universe)));
  return s;
}

TEST(ExamplePrTest, HandComputed) {
  ExampleScore s = ExamplePr({1, 2, 3}, {2, 3, 4, 5});
  EXPECT_DOUBLE_EQ(s.precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(s.recall, 0.5);
  EXPECT_FALSE(s.no_pred);
  EXPECT_FALSE(s.no_gold);
  ExampleScore empty_pred = ExamplePr({}, {1});
  EXPECT_TRUE(empty_pred.no_pred);
  EXPECT_EQ(empty_pred.recall, 0.0);
  ExampleScore empty_gold = ExamplePr({1}, {});
  EXPECT_TRUE(empty_gold.no_gold);
  EXPECT_EQ(empty_gold.precision, 0.0);
}

TEST(MacroPrfTest, HandComputed) {
  // P averages over 2 records, R over 2 records.
  std::vector<PredictionRecord> records = {
      Rec({1, 2}, {1}, 0), Rec({}, {3, 4}, 1), Rec({5}, {}, 2)};
  Prf prf = MacroPrf(records);
  EXPECT_DOUBLE_EQ(prf.precision, 25.0);
  EXPECT_DOUBLE_EQ(prf.recall, 50.0);
  EXPECT_NEAR(prf.f1, 100.0 / 3.0, 1e-12);
  EXPECT_EQ(prf.examples, 3);
  EXPECT_EQ(prf.precision_examples, 2);
  EXPECT_EQ(prf.recall_examples, 2);
  EXPECT_FALSE(prf.undefined);
}

TEST(MacroPrfTest, EmptyAndUndefined) {
  EXPECT_THROW(MacroPrf({}), ValidationError);
  Prf prf = MacroPrf({Rec({}, {}, 0), Rec({}, {}, 1)});
  EXPECT_TRUE(prf.undefined);
  EXPECT_EQ(prf.precision, 0.0);
  EXPECT_EQ(prf.recall, 0.0);
  EXPECT_EQ(prf.f1, 0.0);
}

TEST(MacroPrfTest, AgreesWithOracleOnRandomSets) {
  Rng rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<PredictionRecord> records;
    int n = 1 + static_cast<int>(rng.Uniform(30));
    for (int i = 0; i < n; ++i) {
      records.push_back(Rec(RandomSet(&rng, 8, 4), RandomSet(&rng, 8, 4), i));
    }
    Prf prf = MacroPrf(records);
    OracleResult o = Oracle(records);
    EXPECT_NEAR(prf.precision, o.p, 1e-9);
    EXPECT_NEAR(prf.recall, o.r, 1e-9);
    EXPECT_NEAR(prf.f1, o.f, 1e-9);
    EXPECT_GE(prf.f1, 0.0);
    EXPECT_LE(prf.f1, 100.0);
    EXPECT_LE(prf.f1, std::max(prf.precision, prf.recall) + 1e-12);
    EXPECT_GE(prf.f1, std::min(prf.precision, prf.recall) - 1e-12);
  }
}

TEST(MacroPrfTest, PerfectPredictionsScoreHundred) {
  Rng rng(2);
  std::vector<PredictionRecord> records;
  for (int i = 0; i < 20; ++i) {
    TypeSet s = RandomSet(&rng, 10, 3);
    s.insert(0);
    records.push_back(Rec(s, s, i));
  }
  Prf prf = MacroPrf(records);
  EXPECT_DOUBLE_EQ(prf.precision, 100.0);
  EXPECT_DOUBLE_EQ(prf.recall, 100.0);
  EXPECT_DOUBLE_EQ(prf.f1, 100.0);
}

TEST(BucketPrfTest, HandFixture) {
  TypeOntology onto = RankedOntology(150);
  std::vector<FrequencyBucket> buckets = {{0, 99}, {100, 999}, {1000, 9999}};
  std::vector<PredictionRecord> records = {
      Rec({1, 120}, {1, 130}, 0),   // head hit, tail miss
      Rec({2}, {3}, 1),             // head miss
      Rec({}, {140}, 2),            // only tail gold
  };
  auto scores = BucketPrf(records, onto, buckets);
  ASSERT_EQ(scores.size(), 3u);
  ASSERT_TRUE(scores[0].prf.has_value());
  // Head: records 0 ({1} vs {1}) and 1 ({2} vs {3}); record 2 is dropped.
  EXPECT_EQ(scores[0].prf->examples, 2);
  EXPECT_DOUBLE_EQ(scores[0].prf->precision, 50.0);
  EXPECT_DOUBLE_EQ(scores[0].prf->recall, 50.0);
  // Tail: record 0 ({120} vs {130}), record 2 ({} vs {140}).
  ASSERT_TRUE(scores[1].prf.has_value());
  EXPECT_EQ(scores[1].prf->examples, 2);
  EXPECT_EQ(scores[1].prf->precision_examples, 1);
  EXPECT_DOUBLE_EQ(scores[1].prf->precision, 0.0);
  EXPECT_DOUBLE_EQ(scores[1].prf->recall, 0.0);
  EXPECT_FALSE(scores[2].prf.has_value());
}

TEST(BucketPrfTest, RejectsOverlap) {
  TypeOntology onto = RankedOntology(10);
  EXPECT_THROW(BucketPrf({Rec({1}, {1})}, onto, {{0, 5}, {5, 9}}), ValidationError);
}

TEST(BucketPrfTest, SingleFullBucketMatchesMacro) {
  TypeOntology onto = RankedOntology(20);
  Rng rng(5);
  std::vector<PredictionRecord> records;
  for (int i = 0; i < 40; ++i) {
    TypeSet g = RandomSet(&rng, 20, 3);
    g.insert(static_cast<TypeId>(rng.Uniform(20)));
    records.push_back(Rec(RandomSet(&rng, 20, 3), g, i));
  }
  auto scores = BucketPrf(records, onto, {{0, 9999}});
  ASSERT_TRUE(scores[0].prf.has_value());
  EXPECT_EQ(*scores[0].prf, MacroPrf(records));
}

// Fifty records; predictions carry one gold type and up to two extra types.
struct AdjudicationFixture {
  std::vector<PredictionRecord> records;
  std::vector<Adjudication> adjudications;
};

AdjudicationFixture MakeAdjudicationFixture() {
  AdjudicationFixture f;
  for (int i = 0; i < 50; ++i) {
    TypeSet gold = {0, 1};
    TypeSet predicted = {0};
    if (i % 2 == 0) predicted.insert(2);
    if (i % 5 == 0) predicted.insert(3);
    if (i % 10 == 9) predicted.clear();
    f.records.push_back(Rec(predicted, gold, i));
    if (predicted.count(2)) {
      f.adjudications.push_back({"en", i, 2,
                                 i % 4 == 0 ? AdjudicationLabel::kCorrect
                                            : AdjudicationLabel::kMaybe});
    }
    if (predicted.count(3)) {
      f.adjudications.push_back({"en", i, 3, AdjudicationLabel::kIncorrect});
    }
  }
  return f;
}

TEST(AdjustedPrecisionTest, HandComputedFixture) {
  AdjudicationFixture f = MakeAdjudicationFixture();
  // Oracle: per record, (gold hits + accepted) / |predicted|.
  double sum = 0, sum_maybe = 0;
  int count = 0;
  for (int i = 0; i < 50; ++i) {
    const TypeSet &p = f.records[i].predicted;
    if (p.empty()) continue;
    double hits = 1, hits_maybe = 1;
    if (p.count(2)) {
      hits += (i % 4 == 0);
      hits_maybe += 1;
    }
    sum += hits / p.size();
    sum_maybe += hits_maybe / p.size();
    ++count;
  }
  EXPECT_EQ(count, 45);
  double adjusted = AdjustedPrecision(f.records, f.adjudications, false);
  double adjusted_maybe = AdjustedPrecision(f.records, f.adjudications, true);
  EXPECT_NEAR(adjusted, 100.0 * sum / count, 1e-9);
  EXPECT_NEAR(adjusted_maybe, 100.0 * sum_maybe / count, 1e-9);
  double macro = MacroPrf(f.records).precision;
  EXPECT_GE(adjusted_maybe, adjusted);
  EXPECT_GE(adjusted, macro);
  EXPECT_DOUBLE_EQ(AdjustedPrecision(f.records, {}, true), macro);
}

TEST(AdjustedPrecisionTest, MonotoneOnRandomInputs) {
  Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<PredictionRecord> records;
    std::vector<Adjudication> adj;
    for (int i = 0; i < 15; ++i) {
      PredictionRecord r = Rec(RandomSet(&rng, 6, 4), RandomSet(&rng, 6, 3), i);
      for (TypeId t : r.predicted) {
        if (r.gold.count(t) || rng.Uniform(2)) continue;
        adj.push_back({"en", i, t, static_cast<AdjudicationLabel>(rng.Uniform(3))});
      }
      records.push_back(std::move(r));
    }
    double base = MacroPrf(records).precision;
    double a = AdjustedPrecision(records, adj, false);
    double am = AdjustedPrecision(records, adj, true);
    EXPECT_GE(a, base - 1e-12);
    EXPECT_GE(am, a - 1e-12);
    EXPECT_LE(am, 100.0 + 1e-12);
  }
}

TEST(AdjustedPrecisionTest, RejectsInvalidAdjudications) {
  std::vector<PredictionRecord> records = {Rec({1, 2}, {1}, 0)};
  EXPECT_THROW(AdjustedPrecision(records, {{"en", 5, 2, AdjudicationLabel::kCorrect}}, false),
               ValidationError);
  EXPECT_THROW(AdjustedPrecision(records, {{"en", 0, 3, AdjudicationLabel::kCorrect}}, false),
               ValidationError);
  EXPECT_THROW(AdjustedPrecision(records, {{"en", 0, 1, AdjudicationLabel::kCorrect}}, false),
               ValidationError);
  EXPECT_THROW(AdjustedPrecision(records, {{"de", 0, 2, AdjudicationLabel::kCorrect}}, false),
               ValidationError);
}

TEST(PredictionsFileTest, RoundTrip) {
  std::vector<PredictionRecord> records = {Rec({1, 2}, {1}, 0, "en"),
                                           Rec({}, {3}, 1, "sr"),
                                           Rec({4}, {}, 7, "fi")};
  std::string text = SerializePredictions(records);
  EXPECT_EQ(text.rfind("#xlet-predictions v1\n", 0), 0u);
  EXPECT_EQ(ParsePredictions(text), records);
  EXPECT_THROW(ParsePredictions("#xlet-predictions v2\n"), ValidationError);
  EXPECT_THROW(ParsePredictions("#xlet-predictions v1\nen\tQ1\tx\t1\t1\n"), ParseError);
}

TEST(AdjudicationsFileTest, Parses) {
  auto adj = ParseAdjudications("# note\nen\t3\t17\tcorrect\nsr\t0\t2\tmaybe\n");
  ASSERT_EQ(adj.size(), 2u);
  EXPECT_EQ(adj[0].language, "en");
  EXPECT_EQ(adj[0].index, 3);
  EXPECT_EQ(adj[0].type, 17);
  EXPECT_EQ(adj[0].label, AdjudicationLabel::kCorrect);
  EXPECT_EQ(adj[1].label, AdjudicationLabel::kMaybe);
  EXPECT_THROW(ParseAdjudications("en\t3\t17\tperhaps\n"), ParseError);
}

RecordsByLanguage ReportFixture(uint64_t seed) {
  Rng rng(seed);
  std::vector<PredictionRecord> records;
  const char *langs[] = {"de", "en", "sr"};
  for (int i = 0; i < 60; ++i) {
    TypeSet g = RandomSet(&rng, 150, 3);
    g.insert(static_cast<TypeId>(rng.Uniform(10)));
    TypeSet p = RandomSet(&rng, 12, 3);
    records.push_back(Rec(p, g, i / 3, langs[i % 3]));
  }
  return GroupByLanguage(records);
}

TEST(ReportTest, RowsPerLanguageAndPooled) {
  TypeOntology onto = RankedOntology(150);
  RecordsByLanguage seen = ReportFixture(1);
  EvalReport report = BuildReport(seen, {}, onto);
  ASSERT_EQ(report.sections.size(), 2u);
  const ReportSection &s = report.sections[0];
  EXPECT_TRUE(s.present);
  EXPECT_FALSE(report.sections[1].present);
  ASSERT_EQ(s.rows.size(), 4u);
  EXPECT_EQ(s.rows[0].label, "de");
  EXPECT_EQ(s.rows[3].label, "all");
  EXPECT_EQ(s.rows[3].examples, 60);
  EXPECT_EQ(s.rows[3].buckets.size(), 3u);
  Prf en = MacroPrf(seen.at("en"));
  EXPECT_NEAR(s.rows[1].overall.precision, en.precision, 0.05 + 1e-9);
}

TEST(ReportTest, JsonRoundTripAndTextAgree) {
  TypeOntology onto = RankedOntology(150);
  EvalReport report = BuildReport(ReportFixture(1), ReportFixture(2), onto);
  EvalReport back = EvalReport::FromJson(report.ToJson());
  EXPECT_EQ(back, report);
  EXPECT_EQ(back.ToText(), report.ToText());
  std::ostringstream p;
  p.precision(1);
  p << std::fixed << report.sections[1].rows.back().overall.f1;
  EXPECT_NE(report.ToText().find(p.str()), std::string::npos);
}

TEST(ReportTest, MatchesGoldenText) {
  TypeOntology onto = RankedOntology(150);
  std::string text = BuildReport(ReportFixture(1), ReportFixture(2), onto).ToText();
  const std::string path = std::string(XLET_TEST_DATA_DIR) + "/golden_report.txt";
  if (std::getenv("XLET_UPDATE_GOLDEN") != nullptr) std::ofstream(path) << text;
  std::ifstream in(path);
  ASSERT_TRUE(in) << "missing " << path;
  std::stringstream golden;
  golden << in.rdbuf();
  EXPECT_EQ(text, golden.str());
}

}  // namespace
}  // namespace xlet
