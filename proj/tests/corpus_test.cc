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

#include <gtest/gtest.h>

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "xlet/random.h"
#include "xlet/synthetic.h"
#include "xlet/text.h"

namespace xlet {
namespace {

const std::string kData = XLET_TEST_DATA_DIR;

std::string TempFile(const std::string &name, const std::string &text) {
  std::filesystem::path dir = std::filesystem::temp_directory_path() /
                              ("xlet_corpus_test_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  std::string path = (dir / name).string();
  std::ofstream(path, std::ios::binary) << text;
  return path;
}

Document SevenWords() {
  Document doc;
  doc.doc_id = "d";
  doc.language = "en";
  doc.words = {"w0", "w1", "w2", "w3", "w4", "w5", "w6"};
  doc.links = {{3, 4, "Q1"}};
  return doc;
}

TEST(ExtractTest, WindowCoversWholeDocument) {
  std::vector<Example> ex = ExtractExamples(SevenWords(), 50);
  ASSERT_EQ(ex.size(), 1u);
  EXPECT_EQ(ex[0].context, SevenWords().words);
  EXPECT_EQ(ex[0].mention_offset, 3);
  EXPECT_EQ(ex[0].Mention(), (std::vector<std::string>{"w3", "w4"}));
  EXPECT_TRUE(ex[0].gold.empty());
}

TEST(ExtractTest, WindowTwo) {
  std::vector<Example> ex = ExtractExamples(SevenWords(), 2);
  EXPECT_EQ(ex[0].context,
            (std::vector<std::string>{"w1", "w2", "w3", "w4", "w5", "w6"}));
  EXPECT_EQ(ex[0].mention_offset, 2);
}

TEST(ExtractTest, WindowZeroIsMentionOnly) {
  std::vector<Example> ex = ExtractExamples(SevenWords(), 0);
  EXPECT_EQ(ex[0].context, ex[0].Mention());
}

TEST(ExtractTest, NoLinks) {
  Document doc = SevenWords();
  doc.links.clear();
  EXPECT_TRUE(ExtractExamples(doc, 5).empty());
}

TEST(ExtractTest, FirstLinkOnly) {
  Document doc = SevenWords();
  doc.links = {{0, 0, "Q1"}, {2, 2, "Q2"}, {5, 5, "Q1"}};
  EXPECT_EQ(ExtractExamples(doc, 1).size(), 3u);
  std::vector<Example> first = ExtractExamples(doc, 1, true);
  ASSERT_EQ(first.size(), 2u);
  EXPECT_EQ(first[0].mention_offset, 0);
}

TEST(ExtractTest, MalformedLinksNameTheDocument) {
  Document doc = SevenWords();
  doc.links = {{5, 9, "Q1"}};
  try {
    ExtractExamples(doc, 1);
    FAIL();
  } catch (const ParseError &e) {
    EXPECT_NE(std::string(e.what()).find("d"), std::string::npos);
  }
  doc.links = {{4, 3, "Q1"}};
  EXPECT_THROW(ExtractExamples(doc, 1), ParseError);
  doc.links = {{1, 3, "Q1"}, {3, 4, "Q2"}};
  EXPECT_THROW(ExtractExamples(doc, 1), ParseError);
  doc.links = {{1, 1, ""}};
  EXPECT_THROW(ExtractExamples(doc, 1), ParseError);
  EXPECT_THROW(ExtractExamples(SevenWords(), -1), ConfigError);
}

TEST(ExtractTest, ContextInvariantsOnSyntheticCorpus) {
  SyntheticConfig cfg;
  cfg.languages = {{"en", Script::kLatin, 40}, {"ru", Script::kCyrillic, 40}};
  cfg.links_per_document = 3;
  SyntheticCorpus corpus = GenerateCorpus(cfg);
  for (int32_t window : {0, 1, 4, 50}) {
    for (const Document &doc : corpus.documents) {
      for (const Example &ex : ExtractExamples(doc, window)) {
        std::vector<std::string> m = ex.Mention();
        ASSERT_EQ(static_cast<int32_t>(m.size()), ex.mention_length);
        for (int32_t i = 0; i < ex.mention_length; ++i) {
          EXPECT_EQ(ex.context[ex.mention_offset + i], m[i]);
        }
        EXPECT_LE(ex.context.size(), m.size() + 2 * window);
      }
    }
  }
}

class LabelTest : public ::testing::Test {
 protected:
  void SetUp() override {
    kb_.Add({"Q1", "Ada", {"19th-century people", "Atheists"}});
    kb_.Add({"Q2", "Stub", {"Stub articles"}});
    ontology_ = BuildOntology({"people", "people"}, 10);
  }
  Example Ex(const std::string &qid) {
    Example ex;
    ex.language = "en";
    ex.qid = qid;
    ex.context = {"x"};
    ex.mention_length = 1;
    return ex;
  }
  KnowledgeBase kb_;
  TypeOntology ontology_;
  NormalizationConfig cfg_ = NormalizationConfig::Default();
};

TEST_F(LabelTest, AttachesOntologyTypes) {
  LabelResult r = AttachGoldTypes(Ex("Q1"), kb_, ontology_, cfg_);
  ASSERT_TRUE(std::holds_alternative<Example>(r));
  EXPECT_EQ(std::get<Example>(r).gold, TypeSet{*ontology_.Find("people")});
}

TEST_F(LabelTest, MissingEntity) {
  LabelResult r = AttachGoldTypes(Ex("Q404"), kb_, ontology_, cfg_);
  ASSERT_TRUE(std::holds_alternative<Rejection>(r));
  EXPECT_EQ(std::get<Rejection>(r), Rejection::kMissingEntity);
  EXPECT_STREQ(RejectionName(Rejection::kMissingEntity), "missing-entity");
}

TEST_F(LabelTest, Typeless) {
  LabelResult r = AttachGoldTypes(Ex("Q2"), kb_, ontology_, cfg_);
  ASSERT_TRUE(std::holds_alternative<Rejection>(r));
  EXPECT_EQ(std::get<Rejection>(r), Rejection::kTypeless);
  EXPECT_STREQ(RejectionName(Rejection::kTypeless), "typeless");
}

TEST_F(LabelTest, CountsOccurrencesPerExample) {
  TypeCounter counter;
  int64_t missing = 0;
  CountTypeOccurrences({Ex("Q1"), Ex("Q1"), Ex("Q404")}, kb_, cfg_, &counter,
                       &missing);
  EXPECT_EQ(counter.counts().at("people"), 2);
  EXPECT_EQ(counter.counts().at("atheists"), 2);
  EXPECT_EQ(missing, 1);
}

Dataset Pool(const std::string &lang, int n, const std::string &prefix = "Q") {
  Dataset d;
  for (int i = 0; i < n; ++i) {
    Example ex;
    ex.language = lang;
    ex.qid = prefix + std::to_string(i);
    ex.context = {"w" + std::to_string(i)};
    ex.mention_length = 1;
    d.push_back(ex);
  }
  return d;
}

TEST(SampleBalancedTest, CapsAtPoolSize) {
  LanguagePools pools{{"A", Pool("A", 100)}, {"B", Pool("B", 10)}};
  Dataset d = SampleBalanced(pools, 10, 1);
  ASSERT_EQ(d.size(), 20u);
  for (size_t i = 0; i < 10; ++i) EXPECT_EQ(d[i].language, "A");
  for (size_t i = 10; i < 20; ++i) EXPECT_EQ(d[i].language, "B");
}

TEST(SampleBalancedTest, TargetZeroAndDeterminism) {
  LanguagePools pools{{"A", Pool("A", 50)}, {"B", Pool("B", 7)}};
  EXPECT_TRUE(SampleBalanced(pools, 0, 1).empty());
  EXPECT_EQ(SampleBalanced(pools, 5, 9), SampleBalanced(pools, 5, 9));
  EXPECT_THROW(SampleBalanced(pools, -1, 9), ConfigError);
}

TEST(SampleBalancedTest, SizesAndDistinctness) {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    LanguagePools pools;
    for (const char *lang : {"a", "b", "c"}) {
      pools[lang] = Pool(lang, static_cast<int>(rng.Uniform(30)));
    }
    int64_t target = static_cast<int64_t>(rng.Uniform(25));
    Dataset d = SampleBalanced(pools, target, trial);
    std::map<std::string, std::set<std::string>> got;
    for (const Example &ex : d) {
      EXPECT_TRUE(got[ex.language].insert(ex.qid).second);
    }
    for (const auto &[lang, pool] : pools) {
      EXPECT_EQ(got[lang].size(),
                std::min<size_t>(static_cast<size_t>(target), pool.size()));
    }
  }
}

TEST(HoldoutTest, RespectsPerLanguageMinimum) {
  Dataset train = Pool("x", 100);
  LanguagePools tests{{"en", Pool("en", 100)}};
  HoldoutSplit split = HoldoutEntities(train, tests, 0.02, 2, 3);
  EXPECT_EQ(split.held_out_qids.size(), 2u);
  EXPECT_EQ(MinimumHoldoutTarget(tests, 0.02), 2);
}

TEST(HoldoutTest, InfeasibleTargetListsMinimum) {
  LanguagePools tests{{"en", Pool("en", 100)}, {"de", Pool("de", 60, "P")}};
  EXPECT_EQ(MinimumHoldoutTarget(tests, 0.02), 4);
  try {
    HoldoutEntities({}, tests, 0.02, 3, 0);
    FAIL();
  } catch (const ConfigError &e) {
    EXPECT_NE(std::string(e.what()).find("4"), std::string::npos);
  }
  EXPECT_THROW(HoldoutEntities({}, tests, 0.02, 1000, 0), ConfigError);
  EXPECT_THROW(HoldoutEntities({}, tests, 1.5, 10, 0), ConfigError);
}

TEST(HoldoutTest, ExhaustiveInvariantsOnRandomSplits) {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    Dataset train;
    LanguagePools tests;
    for (const char *lang : {"en", "de", "sr"}) {
      Dataset &t = tests[lang];
      int n = 1 + static_cast<int>(rng.Uniform(40));
      for (int i = 0; i < n; ++i) {
        Example ex;
        ex.language = lang;
        ex.qid = "Q" + std::to_string(rng.Uniform(60));
        ex.context = {"w"};
        ex.mention_length = 1;
        t.push_back(ex);
        ex.language = "train";
        train.push_back(ex);
      }
    }
    double fraction = rng.UniformDouble() * 0.3;
    int64_t minimum = MinimumHoldoutTarget(tests, fraction);
    HoldoutSplit split =
        HoldoutEntities(train, tests, fraction, minimum + 2, trial);
    EXPECT_EQ(static_cast<int64_t>(split.held_out_qids.size()), minimum + 2);
    for (const Example &ex : split.filtered_train) {
      EXPECT_EQ(split.held_out_qids.count(ex.qid), 0u);
    }
    for (const auto &[lang, unseen] : split.unseen_tests) {
      for (const Example &ex : unseen) {
        EXPECT_EQ(split.held_out_qids.count(ex.qid), 1u);
      }
      std::set<std::string> distinct, held;
      for (const Example &ex : tests[lang]) {
        distinct.insert(ex.qid);
        if (split.held_out_qids.count(ex.qid)) held.insert(ex.qid);
      }
      EXPECT_GE(static_cast<double>(held.size()) + 1e-9,
                fraction * static_cast<double>(distinct.size()));
    }
  }
}

TEST(LoadTest, FixtureCorpusInFileOrder) {
  std::vector<std::string> errors;
  std::vector<Document> docs = LoadDocuments(kData + "/mini_corpus.tsv", &errors);
  ASSERT_EQ(docs.size(), 3u);
  EXPECT_TRUE(errors.empty());
  EXPECT_EQ(docs[0].doc_id, "d1");
  EXPECT_EQ(docs[1].doc_id, "d2");
  EXPECT_EQ(docs[2].doc_id, "d3");
  EXPECT_EQ(docs[0].links.size(), 2u);
  EXPECT_EQ(docs[0].links[0].qid, "Q7259");
}

TEST(LoadTest, EmptyFile) {
  EXPECT_TRUE(LoadDocuments(TempFile("empty.tsv", "")).empty());
}

TEST(LoadTest, MalformedLineIsReportedWithLineNumber) {
  std::string path = TempFile(
      "one_bad.tsv", "ok\ten\ta b c\t0-0:Q1\nbad\ten\ta b\t0-7:Q1\n");
  std::vector<std::string> errors;
  std::vector<Document> docs = LoadDocuments(path, &errors);
  EXPECT_EQ(docs.size(), 1u);
  ASSERT_EQ(errors.size(), 1u);
  EXPECT_NE(errors[0].find(":2:"), std::string::npos) << errors[0];
}

TEST(LoadTest, UnreadableFileIsFatal) {
  EXPECT_THROW(DocumentReader("/nonexistent/corpus.tsv"), ParseError);
  EXPECT_THROW(LoadKb("/nonexistent/kb.tsv"), ParseError);
}

TEST(LoadTest, DocumentLineRoundTrip) {
  for (const Document &doc : LoadDocuments(kData + "/mini_corpus.tsv")) {
    Document back = ParseDocumentLine(FormatDocumentLine(doc));
    EXPECT_EQ(back.words, doc.words);
    EXPECT_EQ(back.links.size(), doc.links.size());
  }
}

TEST(LoadTest, KnowledgeBaseWithDuplicates) {
  std::string path = TempFile(
      "kb.tsv", "Q1\tA\tX|Y\nQ1\tB\tZ\nbroken line\nQ2\tC\t\n");
  std::vector<std::string> errors;
  KnowledgeBase kb = LoadKb(path, &errors);
  EXPECT_EQ(kb.size(), 2u);
  EXPECT_EQ(errors.size(), 2u);
  EXPECT_EQ(kb.Find("Q1")->categories, (std::vector<std::string>{"X", "Y"}));
  EXPECT_TRUE(kb.Find("Q2")->categories.empty());
}

TEST(DatasetFileTest, RoundTripAndHeader) {
  KnowledgeBase kb = LoadKb(kData + "/mini_kb.tsv");
  TypeOntology ontology = BuildOntology({"capitals", "in europe"}, 10);
  Dataset data;
  for (const Document &doc : LoadDocuments(kData + "/mini_corpus.tsv")) {
    for (Example &ex : ExtractExamples(doc, 3)) {
      LabelResult r = AttachGoldTypes(std::move(ex), kb, ontology,
                                      NormalizationConfig::Default());
      if (auto *e = std::get_if<Example>(&r)) data.push_back(*e);
    }
  }
  ASSERT_EQ(data.size(), 4u);  // Ada Lovelace has no ontology type
  std::string text = SerializeDataset(data);
  EXPECT_EQ(text.rfind("#xlet-dataset v1\n", 0), 0u);
  EXPECT_EQ(ParseDataset(text), data);
  EXPECT_THROW(ParseDataset("#xlet-dataset v0\n"), ValidationError);
}

}  // namespace
}  // namespace xlet
