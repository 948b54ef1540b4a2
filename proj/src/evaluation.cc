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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "xlet/text.h"

namespace xlet {
namespace {

using json = nlohmann::ordered_json;

constexpr char kPredictionsHeader[] = "#xlet-predictions v1";
constexpr char kReportFormat[] = "xlet-report v1";
constexpr char kConvention[] =
    "macro: precision averaged over examples with >=1 predicted type; "
    "recall averaged over examples with >=1 gold type; F1 = harmonic mean of "
    "macro P and macro R; bucket scores restrict predicted and gold sets to "
    "the bucket's ranks";

std::string ReadFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

size_t IntersectionSize(const TypeSet &a, const TypeSet &b) {
  size_t n = 0;
  for (TypeId id : a) n += b.count(id);
  return n;
}

double Round1(double value) { return std::round(value * 10.0) / 10.0; }

Prf RoundPrf(Prf prf) {
  prf.precision = Round1(prf.precision);
  prf.recall = Round1(prf.recall);
  prf.f1 = Round1(prf.f1);
  return prf;
}

std::string Fixed1(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", value);
  return buf;
}

std::string Pad(const std::string &text, size_t width, bool right = true) {
  if (text.size() >= width) return text;
  std::string fill(width - text.size(), ' ');
  return right ? fill + text : text + fill;
}

json PrfToJson(const Prf &prf) {
  return json{{"p", prf.precision},
              {"r", prf.recall},
              {"f1", prf.f1},
              {"examples", prf.examples},
              {"precision_examples", prf.precision_examples},
              {"recall_examples", prf.recall_examples},
              {"undefined", prf.undefined}};
}

Prf PrfFromJson(const json &j) {
  Prf prf;
  prf.precision = j.at("p").get<double>();
  prf.recall = j.at("r").get<double>();
  prf.f1 = j.at("f1").get<double>();
  prf.examples = j.at("examples").get<int64_t>();
  prf.precision_examples = j.at("precision_examples").get<int64_t>();
  prf.recall_examples = j.at("recall_examples").get<int64_t>();
  prf.undefined = j.at("undefined").get<bool>();
  return prf;
}

FrequencyBucket ParseBucketLabel(const std::string &label) {
  // "[lo,hi]"
  if (label.size() < 5 || label.front() != '[' || label.back() != ']') {
    throw ParseError("bad bucket label " + label);
  }
  std::vector<std::string> parts =
      SplitFields(label.substr(1, label.size() - 2), ',');
  if (parts.size() != 2) throw ParseError("bad bucket label " + label);
  return {static_cast<int32_t>(ParseInt(parts[0])),
          static_cast<int32_t>(ParseInt(parts[1]))};
}

}  // namespace

ExampleScore ExamplePr(const TypeSet &predicted, const TypeSet &gold) {
  ExampleScore score;
  const auto hits = static_cast<double>(IntersectionSize(predicted, gold));
  if (predicted.empty()) {
    score.no_pred = true;
  } else {
    score.precision = hits / static_cast<double>(predicted.size());
  }
  if (gold.empty()) {
    score.no_gold = true;
  } else {
    score.recall = hits / static_cast<double>(gold.size());
  }
  return score;
}

double HarmonicMean(double precision, double recall) {
  double sum = precision + recall;
  return sum > 0.0 ? 2.0 * precision * recall / sum : 0.0;
}

Prf MacroPrf(const std::vector<PredictionRecord> &records) {
  if (records.empty()) throw ValidationError("macro_prf needs >= 1 record");
  Prf prf;
  prf.examples = static_cast<int64_t>(records.size());
  double precision_sum = 0.0;
  double recall_sum = 0.0;
  for (const PredictionRecord &r : records) {
    ExampleScore s = ExamplePr(r.predicted, r.gold);
    if (!s.no_pred) {
      precision_sum += s.precision;
      ++prf.precision_examples;
    }
    if (!s.no_gold) {
      recall_sum += s.recall;
      ++prf.recall_examples;
    }
  }
  if (prf.precision_examples > 0) {
    prf.precision =
        100.0 * precision_sum / static_cast<double>(prf.precision_examples);
  }
  if (prf.recall_examples > 0) {
    prf.recall = 100.0 * recall_sum / static_cast<double>(prf.recall_examples);
  }
  prf.undefined = prf.precision_examples == 0 && prf.recall_examples == 0;
  prf.f1 = HarmonicMean(prf.precision, prf.recall);
  return prf;
}

std::vector<BucketScore> BucketPrf(const std::vector<PredictionRecord> &records,
                                   const TypeOntology &ontology,
                                   const std::vector<FrequencyBucket> &buckets) {
  for (size_t i = 0; i < buckets.size(); ++i) {
    if (buckets[i].lo > buckets[i].hi) {
      throw ValidationError("bucket " + buckets[i].Label() + " is inverted");
    }
    for (size_t j = i + 1; j < buckets.size(); ++j) {
      if (buckets[i].lo <= buckets[j].hi && buckets[j].lo <= buckets[i].hi) {
        throw ValidationError("buckets " + buckets[i].Label() + " and " +
                              buckets[j].Label() + " overlap");
      }
    }
  }
  std::vector<BucketScore> scores;
  for (const FrequencyBucket &bucket : buckets) {
    auto restrict = [&](const TypeSet &types) {
      TypeSet out;
      for (TypeId id : types) {
        if (bucket.Contains(ontology.RankOf(id))) out.insert(id);
      }
      return out;
    };
    std::vector<PredictionRecord> kept;
    for (const PredictionRecord &r : records) {
      PredictionRecord restricted = r;
      restricted.predicted = restrict(r.predicted);
      restricted.gold = restrict(r.gold);
      if (restricted.predicted.empty() && restricted.gold.empty()) continue;
      kept.push_back(std::move(restricted));
    }
    BucketScore score{bucket, std::nullopt};
    if (!kept.empty()) score.prf = MacroPrf(kept);
    scores.push_back(score);
  }
  return scores;
}

const char *AdjudicationLabelName(AdjudicationLabel label) {
  switch (label) {
    case AdjudicationLabel::kCorrect:
      return "correct";
    case AdjudicationLabel::kIncorrect:
      return "incorrect";
    case AdjudicationLabel::kMaybe:
      return "maybe";
  }
  return "incorrect";
}

AdjudicationLabel ParseAdjudicationLabel(std::string_view text) {
  if (text == "correct") return AdjudicationLabel::kCorrect;
  if (text == "incorrect") return AdjudicationLabel::kIncorrect;
  if (text == "maybe") return AdjudicationLabel::kMaybe;
  throw ParseError("adjudication label must be correct, incorrect or maybe; "
                   "found '" + std::string(text) + "'");
}

double AdjustedPrecision(const std::vector<PredictionRecord> &records,
                         const std::vector<Adjudication> &adjudications,
                         bool include_maybe) {
  std::map<std::pair<std::string, int64_t>, size_t> by_key;
  for (size_t i = 0; i < records.size(); ++i) {
    by_key[{records[i].language, records[i].index}] = i;
  }
  std::vector<TypeSet> accepted(records.size());
  for (const Adjudication &a : adjudications) {
    auto it = by_key.find({a.language, a.index});
    if (it == by_key.end()) {
      throw ValidationError("adjudication references unknown example " +
                            a.language + "/" + std::to_string(a.index));
    }
    const PredictionRecord &r = records[it->second];
    if (!r.predicted.count(a.type) || r.gold.count(a.type)) {
      throw ValidationError("adjudicated type " + std::to_string(a.type) +
                            " of example " + a.language + "/" +
                            std::to_string(a.index) +
                            " is not a predicted non-gold type");
    }
    if (a.label == AdjudicationLabel::kCorrect ||
        (include_maybe && a.label == AdjudicationLabel::kMaybe)) {
      accepted[it->second].insert(a.type);
    }
  }
  double sum = 0.0;
  int64_t count = 0;
  for (size_t i = 0; i < records.size(); ++i) {
    const PredictionRecord &r = records[i];
    if (r.predicted.empty()) continue;
    double hits = static_cast<double>(IntersectionSize(r.predicted, r.gold) +
                                      accepted[i].size());
    sum += hits / static_cast<double>(r.predicted.size());
    ++count;
  }
  return count > 0 ? 100.0 * sum / static_cast<double>(count) : 0.0;
}

std::string SerializePredictions(const std::vector<PredictionRecord> &records) {
  std::string out = kPredictionsHeader;
  out.push_back('\n');
  for (const PredictionRecord &r : records) {
    out += r.language + "\t" + r.qid + "\t" + std::to_string(r.index) + "\t" +
           FormatTypeSet(r.predicted) + "\t" + FormatTypeSet(r.gold) + "\n";
  }
  return out;
}

void SavePredictions(const std::string &path,
                     const std::vector<PredictionRecord> &records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << SerializePredictions(records);
}

std::vector<PredictionRecord> ParsePredictions(std::string_view text) {
  std::vector<std::string> lines = SplitFields(text, '\n');
  if (lines.empty() || lines[0] != kPredictionsHeader) {
    throw ValidationError("predictions schema mismatch: expected '" +
                          std::string(kPredictionsHeader) + "', found '" +
                          (lines.empty() ? "" : lines[0]) + "'");
  }
  std::vector<PredictionRecord> records;
  for (size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    std::vector<std::string> fields = SplitFields(lines[i], '\t');
    if (fields.size() != 5) {
      throw ParseError("predictions line " + std::to_string(i + 1) +
                       ": expected 5 fields");
    }
    PredictionRecord r;
    r.language = fields[0];
    r.qid = fields[1];
    r.index = ParseInt(fields[2]);
    r.predicted = ParseTypeSet(fields[3]);
    r.gold = ParseTypeSet(fields[4]);
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<PredictionRecord> LoadPredictions(const std::string &path) {
  return ParsePredictions(ReadFile(path));
}

std::vector<Adjudication> ParseAdjudications(std::string_view text) {
  std::vector<Adjudication> out;
  int64_t line_no = 0;
  for (const std::string &line : SplitFields(text, '\n')) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields = SplitFields(line, '\t');
    if (fields.size() != 4) {
      throw ParseError("adjudication line " + std::to_string(line_no) +
                       ": expected 4 fields");
    }
    Adjudication a;
    a.language = fields[0];
    a.index = ParseInt(fields[1]);
    a.type = static_cast<TypeId>(ParseInt(fields[2]));
    a.label = ParseAdjudicationLabel(fields[3]);
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<Adjudication> LoadAdjudications(const std::string &path) {
  return ParseAdjudications(ReadFile(path));
}

RecordsByLanguage GroupByLanguage(const std::vector<PredictionRecord> &records) {
  RecordsByLanguage grouped;
  for (const PredictionRecord &r : records) grouped[r.language].push_back(r);
  return grouped;
}

namespace {

ScoreRow MakeRow(const std::string &label,
                 const std::vector<PredictionRecord> &records,
                 const TypeOntology &ontology,
                 const std::vector<Adjudication> *adjudications,
                 std::vector<std::string> *warnings,
                 const std::string &split) {
  ScoreRow row;
  row.label = label;
  row.examples = static_cast<int64_t>(records.size());
  for (const PredictionRecord &r : records) {
    if (r.predicted.empty()) ++row.no_pred;
    if (r.gold.empty()) ++row.no_gold;
  }
  Prf overall = MacroPrf(records);
  if (overall.undefined) {
    warnings->push_back(split + "/" + label +
                        ": every example lacks both predictions and gold "
                        "types; scores reported as 0");
  } else if (overall.precision_examples == 0) {
    warnings->push_back(split + "/" + label +
                        ": no example has a prediction; precision reported "
                        "as 0");
  }
  row.overall = RoundPrf(overall);
  for (BucketScore &b : BucketPrf(records, ontology, CanonicalBuckets())) {
    if (b.prf) b.prf = RoundPrf(*b.prf);
    row.buckets.push_back(b);
  }
  if (adjudications != nullptr) {
    row.adjusted_precision =
        Round1(AdjustedPrecision(records, *adjudications, false));
    row.adjusted_precision_maybe =
        Round1(AdjustedPrecision(records, *adjudications, true));
  }
  return row;
}

ReportSection MakeSection(const std::string &split,
                          const RecordsByLanguage &records,
                          const TypeOntology &ontology,
                          const std::vector<Adjudication> *adjudications,
                          std::vector<std::string> *warnings) {
  ReportSection section;
  section.split = split;
  std::vector<PredictionRecord> pooled;
  for (const auto &[language, list] : records) {
    if (list.empty()) continue;
    std::vector<Adjudication> mine;
    if (adjudications != nullptr) {
      for (const Adjudication &a : *adjudications) {
        if (a.language == language) mine.push_back(a);
      }
    }
    section.rows.push_back(MakeRow(language, list, ontology,
                                   adjudications != nullptr ? &mine : nullptr,
                                   warnings, split));
    pooled.insert(pooled.end(), list.begin(), list.end());
  }
  section.present = !pooled.empty();
  if (section.present && section.rows.size() > 1) {
    section.rows.push_back(
        MakeRow("all", pooled, ontology, adjudications, warnings, split));
  }
  return section;
}

}  // namespace

EvalReport BuildReport(const RecordsByLanguage &seen,
                       const RecordsByLanguage &unseen,
                       const TypeOntology &ontology,
                       const std::vector<Adjudication> &adjudications) {
  EvalReport report;
  report.convention = kConvention;
  // Human adjudications refer to the full test sets.
  report.sections.push_back(MakeSection(
      "seen", seen, ontology, adjudications.empty() ? nullptr : &adjudications,
      &report.warnings));
  report.sections.push_back(
      MakeSection("unseen", unseen, ontology, nullptr, &report.warnings));
  return report;
}

std::string EvalReport::ToText() const {
  std::ostringstream out;
  out << "xlet evaluation report (" << kReportFormat << ")\n";
  out << "convention: " << convention << "\n";
  for (const ReportSection &section : sections) {
    out << "\n== " << section.split << " entities ==\n";
    if (!section.present) {
      out << "(absent)\n";
      continue;
    }
    bool adjusted = false;
    for (const ScoreRow &row : section.rows) {
      adjusted |= row.adjusted_precision.has_value();
    }
    out << Pad("language", 10, false) << Pad("examples", 10)
        << Pad("no-pred", 9) << Pad("no-gold", 9) << Pad("P", 7)
        << Pad("R", 7) << Pad("F1", 7);
    if (adjusted) out << Pad("adj-P", 8) << Pad("adj-P+maybe", 13);
    out << "\n";
    for (const ScoreRow &row : section.rows) {
      out << Pad(row.label, 10, false) << Pad(std::to_string(row.examples), 10)
          << Pad(std::to_string(row.no_pred), 9)
          << Pad(std::to_string(row.no_gold), 9)
          << Pad(Fixed1(row.overall.precision), 7)
          << Pad(Fixed1(row.overall.recall), 7)
          << Pad(Fixed1(row.overall.f1), 7);
      if (adjusted) {
        out << Pad(row.adjusted_precision ? Fixed1(*row.adjusted_precision)
                                          : "-",
                   8)
            << Pad(row.adjusted_precision_maybe
                       ? Fixed1(*row.adjusted_precision_maybe)
                       : "-",
                   13);
      }
      out << "\n";
    }
    out << "\n-- " << section.split << " by type frequency rank --\n";
    out << Pad("language", 10, false) << Pad("bucket", 14, false)
        << Pad("examples", 10) << Pad("P", 7) << Pad("R", 7) << Pad("F1", 7)
        << "\n";
    for (const ScoreRow &row : section.rows) {
      for (const BucketScore &b : row.buckets) {
        out << Pad(row.label, 10, false) << Pad(b.bucket.Label(), 14, false);
        if (b.prf) {
          out << Pad(std::to_string(b.prf->examples), 10)
              << Pad(Fixed1(b.prf->precision), 7)
              << Pad(Fixed1(b.prf->recall), 7) << Pad(Fixed1(b.prf->f1), 7);
        } else {
          out << Pad("0", 10) << Pad("-", 7) << Pad("-", 7) << Pad("-", 7);
        }
        out << "\n";
      }
    }
  }
  if (!warnings.empty()) {
    out << "\nwarnings:\n";
    for (const std::string &w : warnings) out << "  " << w << "\n";
  }
  return out.str();
}

std::string EvalReport::ToJson() const {
  json root;
  root["format"] = kReportFormat;
  root["convention"] = convention;
  json sections_json = json::array();
  for (const ReportSection &section : sections) {
    json s;
    s["split"] = section.split;
    s["present"] = section.present;
    json rows = json::array();
    for (const ScoreRow &row : section.rows) {
      json r;
      r["label"] = row.label;
      r["examples"] = row.examples;
      r["no_pred"] = row.no_pred;
      r["no_gold"] = row.no_gold;
      r["overall"] = PrfToJson(row.overall);
      json buckets = json::array();
      for (const BucketScore &b : row.buckets) {
        json bj;
        bj["bucket"] = b.bucket.Label();
        bj["scores"] = b.prf ? PrfToJson(*b.prf) : json(nullptr);
        buckets.push_back(bj);
      }
      r["buckets"] = buckets;
      if (row.adjusted_precision) {
        r["adjusted_precision"] = *row.adjusted_precision;
      }
      if (row.adjusted_precision_maybe) {
        r["adjusted_precision_maybe"] = *row.adjusted_precision_maybe;
      }
      rows.push_back(r);
    }
    s["rows"] = rows;
    sections_json.push_back(s);
  }
  root["sections"] = sections_json;
  root["warnings"] = warnings;
  return root.dump(2) + "\n";
}

EvalReport EvalReport::FromJson(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception &e) {
    throw ParseError(std::string("report is not valid JSON: ") + e.what());
  }
  if (root.value("format", "") != kReportFormat) {
    throw ValidationError("report schema mismatch: expected '" +
                          std::string(kReportFormat) + "', found '" +
                          root.value("format", "") + "'");
  }
  EvalReport report;
  try {
    report.convention = root.at("convention").get<std::string>();
    for (const json &s : root.at("sections")) {
      ReportSection section;
      section.split = s.at("split").get<std::string>();
      section.present = s.at("present").get<bool>();
      for (const json &r : s.at("rows")) {
        ScoreRow row;
        row.label = r.at("label").get<std::string>();
        row.examples = r.at("examples").get<int64_t>();
        row.no_pred = r.at("no_pred").get<int64_t>();
        row.no_gold = r.at("no_gold").get<int64_t>();
        row.overall = PrfFromJson(r.at("overall"));
        for (const json &b : r.at("buckets")) {
          BucketScore score;
          score.bucket = ParseBucketLabel(b.at("bucket").get<std::string>());
          if (!b.at("scores").is_null()) score.prf = PrfFromJson(b.at("scores"));
          row.buckets.push_back(score);
        }
        if (r.contains("adjusted_precision")) {
          row.adjusted_precision = r.at("adjusted_precision").get<double>();
        }
        if (r.contains("adjusted_precision_maybe")) {
          row.adjusted_precision_maybe =
              r.at("adjusted_precision_maybe").get<double>();
        }
        section.rows.push_back(std::move(row));
      }
      report.sections.push_back(std::move(section));
    }
    report.warnings = root.at("warnings").get<std::vector<std::string>>();
  } catch (const json::exception &e) {
    throw ParseError(std::string("malformed report: ") + e.what());
  }
  return report;
}

}  // namespace xlet
