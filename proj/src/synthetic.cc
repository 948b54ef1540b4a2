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


#include "xlet/synthetic.h"

#include <set>

#include "xlet/random.h"
#include "xlet/text.h"

namespace xlet {
namespace {

struct Kind {
  const char *category;  // plural, capitalized
  const char *cues[2];
  bool has_status;
  const char *status_category;
  const char *status_cue;
  const char *other_cue;
};

// Kinds 0 and 1 are people; kind 5 is organizations.
const Kind kKinds[] = {
    {"Physicists", {"Nobel", "quantum"}, true, "Living people", "b.", "†"},
    {"Footballers", {"FC", "goals"}, true, "Living people", "b.", "†"},
    {"Cities", {"km²", "mayor"}, false, nullptr, nullptr, nullptr},
    {"Rivers", {"delta", "m³/s"}, false, nullptr, nullptr, nullptr},
    {"Novels", {"ISBN", "chapters"}, false, nullptr, nullptr, nullptr},
    {"Companies", {"Ltd", "NASDAQ"}, true, "Defunct companies", "dissolved",
     "founded"},
};

struct Region {
  const char *name;
  const char *cue;
};

const Region kRegions[] = {
    {"Europe", "EUR"}, {"Asia", "JPY"}, {"Africa", "NGN"}, {"Oceania", "AUD"}};

const char *const kSyllables[] = {
    "ka", "lo", "mi", "ren", "tas", "vo",  "bel", "dor", "fi", "gan",
    "hu", "jor", "ke", "lin", "mar", "nes", "pol", "ri", "sun", "tev",
    "ul", "vik", "zan", "ost", "ber", "cal", "das", "el", "for", "gil"};
constexpr size_t kSyllableCount = sizeof(kSyllables) / sizeof(kSyllables[0]);

std::string RandomWord(Rng *rng, int syllables) {
  std::string word;
  for (int i = 0; i < syllables; ++i) {
    word += kSyllables[rng->Uniform(kSyllableCount)];
  }
  return word;
}

std::string Capitalize(std::string word) {
  if (!word.empty() && word[0] >= 'a' && word[0] <= 'z') word[0] -= 'a' - 'A';
  return word;
}

// Lowercase and uppercase ASCII letters mapped to UTF-8 strings.
const char *const kCyrillicLower[26] = {
    "а", "б", "ц", "д", "е", "ф", "г", "х", "и", "ј", "к", "л", "м",
    "н", "о", "п", "к", "р", "с", "т", "у", "в", "в", "кс", "ј", "з"};
const char *const kCyrillicUpper[26] = {
    "А", "Б", "Ц", "Д", "Е", "Ф", "Г", "Х", "И", "Ј", "К", "Л", "М",
    "Н", "О", "П", "К", "Р", "С", "Т", "У", "В", "В", "Кс", "Ј", "З"};
const char *const kGreekLower[26] = {
    "α", "β", "κ", "δ", "ε", "φ", "γ", "χ", "ι", "ι", "κ", "λ", "μ",
    "ν", "ο", "π", "κ", "ρ", "σ", "τ", "υ", "β", "ω", "ξ", "υ", "ζ"};
const char *const kGreekUpper[26] = {
    "Α", "Β", "Κ", "Δ", "Ε", "Φ", "Γ", "Χ", "Ι", "Ι", "Κ", "Λ", "Μ",
    "Ν", "Ο", "Π", "Κ", "Ρ", "Σ", "Τ", "Υ", "Β", "Ω", "Ξ", "Υ", "Ζ"};

struct SyntheticEntity {
  std::string qid;
  std::vector<std::string> name;  // Latin tokens
  int kind = 0;
  int region = 0;
  bool status = false;
};

}  // namespace

std::string Transliterate(std::string_view latin, Script script) {
  if (script == Script::kLatin) return std::string(latin);
  const char *const *lower =
      script == Script::kCyrillic ? kCyrillicLower : kGreekLower;
  const char *const *upper =
      script == Script::kCyrillic ? kCyrillicUpper : kGreekUpper;
  std::string out;
  for (char c : latin) {
    if (c >= 'a' && c <= 'z') {
      out += lower[c - 'a'];
    } else if (c >= 'A' && c <= 'Z') {
      out += upper[c - 'A'];
    } else {
      out.push_back(c);
    }
  }
  return out;
}

const std::vector<std::string> &SyntheticTypes() {
  static const std::vector<std::string> *types = new std::vector<std::string>{
      "physicists", "footballers", "cities",    "rivers",
      "novels",     "companies",   "in europe", "in asia",
      "in africa",  "in oceania",  "living people", "defunct companies"};
  return *types;
}

SyntheticCorpus GenerateCorpus(const SyntheticConfig &config) {
  if (config.entities < 1) throw ConfigError("need at least one entity");
  if (config.links_per_document < 1) {
    throw ConfigError("links_per_document must be >= 1");
  }
  Rng rng(config.seed);
  SyntheticCorpus corpus;

  // Entities with unique two-token names.
  std::vector<SyntheticEntity> entities;
  std::set<std::string> names;
  for (int32_t i = 0; i < config.entities; ++i) {
    SyntheticEntity e;
    e.qid = "Q" + std::to_string(1000 + i);
    e.kind = i % 6;
    e.region = (i / 6) % 4;
    e.status = kKinds[e.kind].has_status && (i / 24) % 2 == 0;
    std::string joined;
    do {
      e.name = {Capitalize(RandomWord(&rng, 2)), Capitalize(RandomWord(&rng, 2))};
      joined = e.name[0] + " " + e.name[1];
    } while (!names.insert(joined).second);

    const Kind &kind = kKinds[e.kind];
    EntityRecord record{e.qid, joined, {}};
    std::string lower_kind = Lowercase(kind.category);
    switch (i % 3) {
      case 0:
        record.categories.push_back(std::to_string(17 + i % 4) +
                                    "th-century " + lower_kind);
        break;
      case 1:
        record.categories.push_back(std::to_string(1950 + 10 * (i % 5)) +
                                    "s " + lower_kind);
        break;
      default:
        record.categories.push_back(kind.category);
    }
    record.categories.push_back(std::string(kind.category) + " in " +
                                kRegions[e.region].name);
    if (e.status) record.categories.push_back(kind.status_category);
    corpus.kb.push_back(std::move(record));
    entities.push_back(std::move(e));
  }

  // Entities whose categories only yield rare maintenance types.
  std::vector<std::string> typeless;
  for (int32_t i = 0; i < config.typeless_entities; ++i) {
    std::string qid = "Q" + std::to_string(5000 + i);
    std::string title = Capitalize(RandomWord(&rng, 3));
    corpus.kb.push_back(
        {qid, title, {"Stub articles " + std::to_string(i), "Pages in draft"}});
    typeless.push_back(qid);
  }

  int64_t missing_counter = 0;
  for (size_t l = 0; l < config.languages.size(); ++l) {
    const SyntheticLanguage &lang = config.languages[l];
    Rng lang_rng(config.document_seed * 1000003 + l + 1);
    std::vector<std::string> filler;
    for (int i = 0; i < 60; ++i) {
      filler.push_back(
          Transliterate(RandomWord(&lang_rng, 1 + i % 3), lang.script));
    }
    auto pick_filler = [&] { return filler[lang_rng.Uniform(filler.size())]; };

    for (int32_t d = 0; d < lang.documents; ++d) {
      Document doc;
      char id[32];
      std::snprintf(id, sizeof(id), "%s-%05d", lang.code.c_str(), d);
      doc.doc_id = id;
      doc.language = lang.code;
      for (int32_t k = 0; k < config.links_per_document; ++k) {
        if (k > 0) {
          for (int32_t g = 0; g < config.gap; ++g) doc.words.push_back(pick_filler());
        }
        double r = lang_rng.UniformDouble();
        std::string qid;
        std::vector<std::string> mention;
        std::vector<std::string> cues;
        if (r < config.missing_rate) {
          qid = "Q" + std::to_string(90000 + missing_counter++);
          mention = {Capitalize(RandomWord(&lang_rng, 2))};
        } else if (r < config.missing_rate + config.typeless_rate &&
                   !typeless.empty()) {
          qid = typeless[lang_rng.Uniform(typeless.size())];
          mention = {Capitalize(RandomWord(&lang_rng, 3))};
        } else {
          const SyntheticEntity &e = entities[lang_rng.Uniform(entities.size())];
          qid = e.qid;
          mention = e.name;
          const Kind &kind = kKinds[e.kind];
          cues.push_back(kind.cues[lang_rng.Uniform(2)]);
          cues.push_back(kRegions[e.region].cue);
          if (kind.has_status) {
            cues.push_back(e.status ? kind.status_cue : kind.other_cue);
          }
        }
        for (std::string &token : mention) {
          token = Transliterate(token, lang.script);
        }

        // Cues and three filler words in random order, with the mention
        // inserted at a random slot.
        std::vector<std::string> slots = cues;
        for (int f = 0; f < 3; ++f) slots.push_back(pick_filler());
        lang_rng.Shuffle(&slots);
        size_t at = lang_rng.Uniform(slots.size() + 1);
        for (size_t s = 0; s <= slots.size(); ++s) {
          if (s == at) {
            Link link;
            link.start = static_cast<int32_t>(doc.words.size());
            for (const std::string &token : mention) doc.words.push_back(token);
            link.end = static_cast<int32_t>(doc.words.size()) - 1;
            link.qid = qid;
            doc.links.push_back(std::move(link));
          }
          if (s < slots.size()) doc.words.push_back(slots[s]);
        }
        doc.words.push_back(".");
      }
      corpus.documents.push_back(std::move(doc));
    }
  }
  return corpus;
}

std::string FormatCorpus(const std::vector<Document> &documents) {
  std::string out;
  for (const Document &doc : documents) out += FormatDocumentLine(doc) + "\n";
  return out;
}

std::string FormatKb(const std::vector<EntityRecord> &kb) {
  std::string out;
  for (const EntityRecord &r : kb) {
    out += r.qid + "\t" + r.title + "\t" + Join(r.categories, "|") + "\n";
  }
  return out;
}

}  // namespace xlet
