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

// Macro-averaged typing metrics.
//
// Precision is averaged over examples with at least one predicted type,
// recall over examples with at least one gold type, and F1 is the harmonic
// mean of the two averages. All aggregate values are percentages.

#ifndef XLET_EVALUATION_H_
#define XLET_EVALUATION_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xlet/common.h"
#include "xlet/ontology.h"

namespace xlet {

struct PredictionRecord {
  std::string language;
  std::string qid;
  int64_t index = 0;
  TypeSet predicted;
  TypeSet gold;

  bool operator==(const PredictionRecord &other) const = default;
};

struct ExampleScore {
  double precision = 0.0;
  double recall = 0.0;
  bool no_pred = false;
  bool no_gold = false;
};

ExampleScore ExamplePr(const TypeSet &predicted, const TypeSet &gold);

struct Prf {
  double precision = 0.0;  // percent
  double recall = 0.0;     // percent
  double f1 = 0.0;         // percent
  int64_t examples = 0;
  int64_t precision_examples = 0;  // without the no-pred flag
  int64_t recall_examples = 0;     // without the no-gold flag
  // Set when every example is flagged on both sides; all values are then 0.
  bool undefined = false;

  bool operator==(const Prf &other) const = default;
};

// Throws ValidationError for an empty record list.
Prf MacroPrf(const std::vector<PredictionRecord> &records);

// 2PR / (P + R), or 0 when P + R = 0.
double HarmonicMean(double precision, double recall);

struct BucketScore {
  FrequencyBucket bucket;
  // nullopt when no record has a predicted or gold type in the bucket.
  std::optional<Prf> prf;

  bool operator==(const BucketScore &other) const = default;
};

// Restricts every record's predicted and gold sets to types ranked inside the
// bucket, drops records left with both sets empty, then applies MacroPrf.
// Throws ValidationError if the buckets overlap.
std::vector<BucketScore> BucketPrf(const std::vector<PredictionRecord> &records,
                                   const TypeOntology &ontology,
                                   const std::vector<FrequencyBucket> &buckets);

enum class AdjudicationLabel { kCorrect, kIncorrect, kMaybe };

const char *AdjudicationLabelName(AdjudicationLabel label);
AdjudicationLabel ParseAdjudicationLabel(std::string_view text);

struct Adjudication {
  std::string language;
  int64_t index = 0;
  TypeId type = 0;
  AdjudicationLabel label = AdjudicationLabel::kIncorrect;
};

// Macro precision after counting adjudicated-correct types (and maybe types
// when include_maybe is set) as true positives. Throws ValidationError when
// an adjudication references a missing record or a type that was not
// predicted, or that was already gold.
double AdjustedPrecision(const std::vector<PredictionRecord> &records,
                         const std::vector<Adjudication> &adjudications,
                         bool include_maybe);

// Predictions file with header "#xlet-predictions v1"; lines hold language,
// qid, example index, predicted ids and gold ids, tab-separated.
std::string SerializePredictions(const std::vector<PredictionRecord> &records);
void SavePredictions(const std::string &path,
                     const std::vector<PredictionRecord> &records);
std::vector<PredictionRecord> ParsePredictions(std::string_view text);
std::vector<PredictionRecord> LoadPredictions(const std::string &path);

// Lines: language, example index, type id, label. '#' lines are comments.
std::vector<Adjudication> ParseAdjudications(std::string_view text);
std::vector<Adjudication> LoadAdjudications(const std::string &path);

struct ScoreRow {
  std::string label;  // language tag, or "all"
  int64_t examples = 0;
  int64_t no_pred = 0;
  int64_t no_gold = 0;
  Prf overall;
  std::vector<BucketScore> buckets;
  std::optional<double> adjusted_precision;
  std::optional<double> adjusted_precision_maybe;

  bool operator==(const ScoreRow &other) const = default;
};

struct ReportSection {
  std::string split;  // "seen" or "unseen"
  bool present = false;
  std::vector<ScoreRow> rows;

  bool operator==(const ReportSection &other) const = default;
};

struct EvalReport {
  std::string convention;
  std::vector<ReportSection> sections;
  std::vector<std::string> warnings;

  bool operator==(const EvalReport &other) const = default;

  // Aligned tables with one decimal place.
  std::string ToText() const;
  // Same numbers as ToText, as JSON.
  std::string ToJson() const;
  static EvalReport FromJson(std::string_view json);
};

using RecordsByLanguage = std::map<std::string, std::vector<PredictionRecord>>;

// Groups records by their language tag.
RecordsByLanguage GroupByLanguage(const std::vector<PredictionRecord> &records);

// Per-language and pooled rows for the seen and unseen splits. An empty
// unseen map marks the unseen section absent. Values are rounded to one
// decimal so the text and JSON variants agree exactly.
EvalReport BuildReport(const RecordsByLanguage &seen,
                       const RecordsByLanguage &unseen,
                       const TypeOntology &ontology,
                       const std::vector<Adjudication> &adjudications = {});

}  // namespace xlet

#endif  // XLET_EVALUATION_H_
