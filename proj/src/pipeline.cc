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


#include "xlet/pipeline.h"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "xlet/baselines.h"
#include "xlet/corpus.h"
#include "xlet/evaluation.h"
#include "xlet/hash.h"
#include "xlet/ontology.h"
#include "xlet/random.h"
#include "xlet/text.h"
#include "xlet/tokenizer.h"

namespace xlet {
namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

std::string ToolVersion() { return XLET_VERSION; }

namespace {

constexpr char kSummaryHeader[] = "#xlet-summary v1";
constexpr char kHoldoutHeader[] = "#xlet-holdout v1";

std::string ReadFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes through a temporary file so a failed stage never leaves a truncated
// artifact behind.
void WriteFileAtomic(const std::string &path, const std::string &data) {
  fs::create_directories(fs::path(path).parent_path());
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ParseError("cannot write " + tmp);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw ParseError("write failed: " + tmp);
  }
  fs::rename(tmp, path);
}

std::string Trim(std::string_view s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool ParseBool(std::string_view text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError("expected true or false, found '" + std::string(text) + "'");
}

std::string ResolvePath(const std::string &path, const std::string &base) {
  if (path.empty() || base.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base) / path).lexically_normal().string();
}

// One config key bound to a RunConfig field.
struct Field {
  std::string section;
  std::string key;
  std::function<std::string(const RunConfig &)> get;
  std::function<void(RunConfig *, const std::string &, const std::string &)>
      set;  // (config, value, base_dir)
};

template <typename T, typename Member>
Field IntField(std::string section, std::string key, Member member) {
  return {std::move(section), std::move(key),
          [member](const RunConfig &c) { return std::to_string(member(c)); },
          [member](RunConfig *c, const std::string &v, const std::string &) {
            member(*c) = static_cast<T>(ParseInt(v));
          }};
}

template <typename Member>
Field DoubleField(std::string section, std::string key, Member member) {
  return {std::move(section), std::move(key),
          [member](const RunConfig &c) { return FormatDouble(member(c)); },
          [member](RunConfig *c, const std::string &v, const std::string &) {
            member(*c) = ParseDouble(v);
          }};
}

template <typename Member>
Field SeedField(std::string section, std::string key, Member member) {
  return {std::move(section), std::move(key),
          [member](const RunConfig &c) { return std::to_string(member(c)); },
          [member](RunConfig *c, const std::string &v, const std::string &) {
            int64_t seed = ParseInt(v);
            if (seed < 0) throw ConfigError("seeds must be non-negative");
            member(*c) = static_cast<uint64_t>(seed);
          }};
}

template <typename Member>
Field PathField(std::string section, std::string key, Member member) {
  return {std::move(section), std::move(key),
          [member](const RunConfig &c) { return member(c); },
          [member](RunConfig *c, const std::string &v, const std::string &base) {
            member(*c) = ResolvePath(v, base);
          }};
}

template <typename Member>
Field PathListField(std::string section, std::string key, Member member) {
  return {std::move(section), std::move(key),
          [member](const RunConfig &c) { return Join(member(c), ","); },
          [member](RunConfig *c, const std::string &v, const std::string &base) {
            std::vector<std::string> paths;
            for (const std::string &p : SplitFields(v, ',')) {
              std::string t = Trim(p);
              if (!t.empty()) paths.push_back(ResolvePath(t, base));
            }
            member(*c) = std::move(paths);
          }};
}

#define XLET_MEMBER(expr) [](auto &c) -> auto & { return c.expr; }

const std::vector<Field> &Fields() {
  static const std::vector<Field> *fields = new std::vector<Field>{
      PathListField("paths", "train_corpus", XLET_MEMBER(train_corpus)),
      PathListField("paths", "test_corpus", XLET_MEMBER(test_corpus)),
      PathField("paths", "kb", XLET_MEMBER(kb)),
      PathField("paths", "normalization", XLET_MEMBER(normalization)),
      PathField("paths", "out", XLET_MEMBER(out)),
      IntField<int32_t>("corpus", "window", XLET_MEMBER(window)),
      {"corpus", "first_link_only",
       [](const RunConfig &c) {
         return std::string(c.first_link_only ? "true" : "false");
       },
       [](RunConfig *c, const std::string &v, const std::string &) {
         c->first_link_only = ParseBool(v);
       }},
      IntField<int32_t>("ontology", "capacity", XLET_MEMBER(capacity)),
      IntField<int64_t>("sampling", "target", XLET_MEMBER(sample_target)),
      SeedField("sampling", "seed", XLET_MEMBER(sample_seed)),
      DoubleField("holdout", "min_fraction", XLET_MEMBER(min_fraction)),
      IntField<int64_t>("holdout", "total_target", XLET_MEMBER(total_target)),
      SeedField("holdout", "seed", XLET_MEMBER(holdout_seed)),
      IntField<int32_t>("tokenizer", "vocab_size", XLET_MEMBER(vocab_size)),
      IntField<int32_t>("model", "dim", XLET_MEMBER(model.dim)),
      IntField<int32_t>("model", "layers", XLET_MEMBER(model.layers)),
      IntField<int32_t>("model", "heads", XLET_MEMBER(model.heads)),
      IntField<int32_t>("model", "ffn_dim", XLET_MEMBER(model.ffn_dim)),
      IntField<int32_t>("model", "cap", XLET_MEMBER(model.cap)),
      IntField<int32_t>("train", "batch", XLET_MEMBER(train.batch)),
      DoubleField("train", "lr_encoder", XLET_MEMBER(train.lr_encoder)),
      DoubleField("train", "lr_type_matrix", XLET_MEMBER(train.lr_type_matrix)),
      DoubleField("train", "weight_decay", XLET_MEMBER(train.weight_decay)),
      DoubleField("train", "beta1", XLET_MEMBER(train.beta1)),
      DoubleField("train", "beta2", XLET_MEMBER(train.beta2)),
      DoubleField("train", "adam_epsilon", XLET_MEMBER(train.adam_epsilon)),
      IntField<int32_t>("train", "epochs", XLET_MEMBER(train.epochs)),
      SeedField("train", "seed", XLET_MEMBER(train.seed)),
      DoubleField("train", "init_scale", XLET_MEMBER(train.init_scale)),
      IntField<int32_t>("train", "threads", XLET_MEMBER(train.threads)),
      DoubleField("predict", "threshold", XLET_MEMBER(threshold)),
      IntField<int32_t>("baseline", "clusters", XLET_MEMBER(clusters)),
      IntField<int32_t>("baseline", "probes", XLET_MEMBER(probes)),
      SeedField("baseline", "seed", XLET_MEMBER(baseline_seed)),
      IntField<int32_t>("gradcheck", "dim", XLET_MEMBER(gc_dim)),
      IntField<int32_t>("gradcheck", "layers", XLET_MEMBER(gc_layers)),
      IntField<int32_t>("gradcheck", "heads", XLET_MEMBER(gc_heads)),
      IntField<int32_t>("gradcheck", "ffn_dim", XLET_MEMBER(gc_ffn_dim)),
      IntField<int32_t>("gradcheck", "num_types", XLET_MEMBER(gc_num_types)),
      IntField<int32_t>("gradcheck", "length", XLET_MEMBER(gc_length)),
      IntField<int32_t>("gradcheck", "coordinates",
                        XLET_MEMBER(gc_coordinates)),
      DoubleField("gradcheck", "epsilon", XLET_MEMBER(gc_epsilon)),
      DoubleField("gradcheck", "init_scale", XLET_MEMBER(gc_init_scale)),
      DoubleField("gradcheck", "tolerance", XLET_MEMBER(gc_tolerance)),
      SeedField("gradcheck", "seed", XLET_MEMBER(gc_seed)),
  };
  return *fields;
}

#undef XLET_MEMBER

ModelConfig GradCheckModelConfig(const RunConfig &c) {
  ModelConfig m;
  m.dim = c.gc_dim;
  m.layers = c.gc_layers;
  m.heads = c.gc_heads;
  m.ffn_dim = c.gc_ffn_dim;
  m.cap = c.gc_length;
  m.vocab_size = SubwordVocab::kFirstMerge;
  m.num_types = c.gc_num_types;
  return m;
}

std::string SummaryLine(const std::vector<std::string> &fields) {
  return Join(fields, "\t") + "\n";
}

}  // namespace

void RunConfig::Validate() const {
  if (window < 0) throw ConfigError("corpus.window must be >= 0");
  if (capacity < 1) throw ConfigError("ontology.capacity must be >= 1");
  if (sample_target < 1) throw ConfigError("sampling.target must be >= 1");
  if (!(min_fraction >= 0.0 && min_fraction <= 1.0)) {
    throw ConfigError("holdout.min_fraction must lie in [0, 1]");
  }
  if (total_target < 0) throw ConfigError("holdout.total_target must be >= 0");
  if (vocab_size < SubwordVocab::kFirstMerge) {
    throw ConfigError("tokenizer.vocab_size must be >= " +
                      std::to_string(SubwordVocab::kFirstMerge));
  }
  ModelConfig m = model;
  m.num_types = 1;
  m.vocab_size = vocab_size;
  m.Validate();
  train.Validate();
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ConfigError("predict.threshold must lie in (0, 1)");
  }
  if (clusters < 0) throw ConfigError("baseline.clusters must be >= 0");
  if (probes < 1) throw ConfigError("baseline.probes must be >= 1");
  GradCheckModelConfig(*this).Validate();
  if (gc_length < 3) throw ConfigError("gradcheck.length must be >= 3");
  if (gc_coordinates < 1) {
    throw ConfigError("gradcheck.coordinates must be >= 1");
  }
  if (!(gc_epsilon > 0.0)) throw ConfigError("gradcheck.epsilon must be > 0");
  if (!(gc_tolerance > 0.0)) {
    throw ConfigError("gradcheck.tolerance must be > 0");
  }
}

void RunConfig::OverrideSeed(uint64_t seed) {
  sample_seed = seed;
  holdout_seed = seed;
  train.seed = seed;
  baseline_seed = seed;
  gc_seed = seed;
}

RunConfig RunConfig::Parse(std::string_view text, const std::string &base_dir) {
  RunConfig config;
  std::string section;
  int64_t line_no = 0;
  for (const std::string &raw : SplitFields(text, '\n')) {
    ++line_no;
    std::string line = raw;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const std::string where = "config line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "bad section header");
      section = Trim(line.substr(1, line.size() - 2));
      bool known = std::any_of(Fields().begin(), Fields().end(),
                               [&](const Field &f) { return f.section == section; });
      if (!known) throw ConfigError(where + "unknown section [" + section + "]");
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    if (section.empty()) throw ConfigError(where + "key outside of a section");
    std::string key = Trim(line.substr(0, eq));
    std::string value = Trim(line.substr(eq + 1));
    auto it = std::find_if(Fields().begin(), Fields().end(), [&](const Field &f) {
      return f.section == section && f.key == key;
    });
    if (it == Fields().end()) {
      throw ConfigError(where + "unknown key " + section + "." + key);
    }
    try {
      it->set(&config, value, base_dir);
    } catch (const ParseError &e) {
      throw ConfigError(where + section + "." + key + ": " + e.what());
    }
  }
  config.Validate();
  return config;
}

RunConfig RunConfig::Load(const std::string &path) {
  std::string text;
  try {
    text = ReadFile(path);
  } catch (const ParseError &) {
    throw ConfigError("cannot read config file " + path);
  }
  return Parse(text, fs::path(path).parent_path().string());
}

std::string RunConfig::Serialize() const {
  std::string out;
  std::string section;
  for (const Field &f : Fields()) {
    if (f.section != section) {
      if (!section.empty()) out += "\n";
      section = f.section;
      out += "[" + section + "]\n";
    }
    out += f.key + " = " + f.get(*this) + "\n";
  }
  return out;
}

int ExitCodeFor(const std::exception &e) {
  if (auto *s = dynamic_cast<const StageError *>(&e)) return s->exit_code();
  if (dynamic_cast<const ConfigError *>(&e)) return 1;
  if (dynamic_cast<const ValidationError *>(&e)) return 3;
  return 2;
}

Split ParseSplit(std::string_view name) {
  if (name == "full") return Split::kFull;
  if (name == "unseen") return Split::kUnseen;
  throw ConfigError("unknown split '" + std::string(name) +
                    "' (expected full or unseen)");
}

const char *SplitName(Split split) {
  return split == Split::kFull ? "full" : "unseen";
}

BaselineKind ParseBaselineKind(std::string_view name) {
  if (name == "string-match") return BaselineKind::kStringMatch;
  if (name == "similarity") return BaselineKind::kSimilarity;
  throw ConfigError("unknown baseline '" + std::string(name) +
                    "' (expected string-match or similarity)");
}

const char *BaselineKindName(BaselineKind kind) {
  return kind == BaselineKind::kStringMatch ? "string-match" : "similarity";
}

GradCheckFixture MakeGradCheckFixture(const RunConfig &config) {
  ModelConfig m = GradCheckModelConfig(config);
  m.Validate();
  Rng rng(config.gc_seed);
  // CLS m SEP s SEP with a two-piece mention and byte pieces elsewhere.
  InputSequence x;
  const int32_t n = config.gc_length;
  const int32_t mention = std::min(2, n - 3);
  for (int32_t i = 0; i < n; ++i) {
    PieceId id;
    uint8_t segment = i <= mention + 1 ? 0 : 1;
    if (i == 0) {
      id = SubwordVocab::kCls;
    } else if (i == mention + 1 || i == n - 1) {
      id = SubwordVocab::kSep;
    } else {
      id = SubwordVocab::kFirstByte + static_cast<PieceId>(rng.Uniform(256));
    }
    x.ids.push_back(id);
    x.segments.push_back(segment);
  }
  TypeSet gold;
  for (int32_t k = 0; k < m.num_types; ++k) {
    if (rng.Uniform(3) == 0) gold.insert(k);
  }
  return {ModelParams::Init(m, config.gc_seed, config.gc_init_scale),
          std::move(x), std::move(gold)};
}

// Bookkeeping for one stage run: declared inputs and outputs, their hashes,
// and the manifest written at the end.
class Pipeline::Stage {
 public:
  Stage(Pipeline *pipeline, std::string name, uint64_t seed)
      : pipeline_(pipeline), name_(std::move(name)), seed_(seed) {
    pipeline_->Log(name_ + ": start");
  }

  const std::string &name() const { return name_; }

  // Declares an input file produced outside the pipeline or by an earlier
  // stage, and returns its path.
  const std::string &Input(const std::string &path,
                           const std::string &producer = "") {
    if (!fs::is_regular_file(path)) {
      std::string hint = producer.empty() ? "" : " (run '" + producer + "' first)";
      throw StageError(name_, 2, "missing input " + path + hint);
    }
    inputs_.emplace_back(pipeline_->Relative(path), Sha256File(path));
    return path;
  }

  void Output(const std::string &path, const std::string &bytes) {
    WriteFileAtomic(path, bytes);
    outputs_.emplace_back(path, Sha256Hex(bytes));
  }

  void Note(const std::string &key, Json value) { notes_[key] = std::move(value); }

  // Verifies every declared output on disk and writes the manifest.
  void Finish() {
    Json manifest;
    manifest["stage"] = name_;
    manifest["tool_version"] = ToolVersion();
    manifest["seed"] = seed_;
    RunConfig canonical = pipeline_->config_;
    canonical.out.clear();
    manifest["config_sha256"] = Sha256Hex(canonical.Serialize());
    Json in = Json::object();
    for (const auto &[path, digest] : inputs_) in[path] = digest;
    manifest["inputs"] = in;
    Json out = Json::object();
    for (const auto &[path, digest] : outputs_) {
      if (Sha256File(path) != digest) {
        throw StageError(name_, 3, "output " + path + " failed verification");
      }
      out[pipeline_->Relative(path)] = digest;
    }
    manifest["outputs"] = out;
    if (!notes_.empty()) manifest["notes"] = notes_;
    WriteFileAtomic(pipeline_->OutPath("manifests/" + name_ + ".json"),
                    manifest.dump(2) + "\n");
    pipeline_->Log(name_ + ": done");
  }

 private:
  Pipeline *pipeline_;
  std::string name_;
  uint64_t seed_;
  std::vector<std::pair<std::string, std::string>> inputs_;
  std::vector<std::pair<std::string, std::string>> outputs_;
  Json notes_ = Json::object();
};

Pipeline::Pipeline(RunConfig config) : config_(std::move(config)) {
  config_.Validate();
  if (config_.out.empty()) throw ConfigError("no output directory given");
  fs::create_directories(config_.out);
  std::string lock = OutPath(".xlet.lock");
  lock_fd_ = ::open(lock.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (lock_fd_ < 0) throw StageError("lock", 2, "cannot open " + lock);
  if (::flock(lock_fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(lock_fd_);
    lock_fd_ = -1;
    throw StageError("lock", 2,
                     "another xlet process is using " + config_.out);
  }
}

Pipeline::~Pipeline() {
  if (lock_fd_ >= 0) {
    ::flock(lock_fd_, LOCK_UN);
    ::close(lock_fd_);
  }
}

std::string Pipeline::OutPath(const std::string &relative) const {
  return (fs::path(config_.out) / relative).string();
}

std::string Pipeline::Relative(const std::string &path) const {
  fs::path rel = fs::path(path).lexically_relative(config_.out);
  if (!rel.empty() && *rel.begin() != "..") return rel.string();
  return path;
}

void Pipeline::Log(const std::string &line) const {
  if (log_) log_(line);
}

namespace {

NormalizationConfig LoadNormalization(const RunConfig &config) {
  if (config.normalization.empty()) return NormalizationConfig::Default();
  return NormalizationConfig::Load(config.normalization);
}

// Unlabeled examples from every corpus file, grouped by language in document
// order.
LanguagePools ExtractPools(const std::vector<std::string> &files,
                           const RunConfig &config, int64_t *bad_lines,
                           const std::function<void(const std::string &)> &log) {
  LanguagePools pools;
  for (const std::string &path : files) {
    DocumentReader reader(path);
    Document doc;
    while (reader.Next(&doc)) {
      for (Example &ex :
           ExtractExamples(doc, config.window, config.first_link_only)) {
        pools[ex.language].push_back(std::move(ex));
      }
    }
    for (const std::string &e : reader.errors()) log(e);
    *bad_lines += static_cast<int64_t>(reader.errors().size());
  }
  return pools;
}

struct LabelCounts {
  int64_t extracted = 0;
  int64_t missing_entity = 0;
  int64_t typeless = 0;
};

LanguagePools LabelPools(LanguagePools pools, GoldTypeMapper *mapper,
                         std::map<std::string, LabelCounts> *counts) {
  LanguagePools labeled;
  for (auto &[lang, examples] : pools) {
    LabelCounts &c = (*counts)[lang];
    Dataset &out = labeled[lang];
    for (Example &ex : examples) {
      ++c.extracted;
      LabelResult r = AttachGoldTypes(std::move(ex), mapper);
      if (auto *rejection = std::get_if<Rejection>(&r)) {
        (*rejection == Rejection::kMissingEntity ? c.missing_entity
                                                 : c.typeless)++;
      } else {
        out.push_back(std::move(std::get<Example>(r)));
      }
    }
  }
  return labeled;
}

struct SplitFiles {
  std::string train;
  std::map<std::string, std::string> tests;  // language -> path
};

// Reads a summary file written by build-dataset or holdout.
SplitFiles ReadSummary(const std::string &path, const std::string &train_split,
                       const std::string &test_split, const std::string &dir) {
  std::string text = ReadFile(path);
  std::vector<std::string> lines = SplitFields(text, '\n');
  if (lines.empty() || lines[0] != kSummaryHeader) {
    throw ValidationError(path + ": schema mismatch: expected '" +
                          std::string(kSummaryHeader) + "', found '" +
                          (lines.empty() ? "" : lines[0]) + "'");
  }
  SplitFiles files;
  for (size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty() || lines[i][0] == '#') continue;
    std::vector<std::string> f = SplitFields(lines[i], '\t');
    if (f.size() < 3) throw ParseError(path + ": malformed line " +
                                       std::to_string(i + 1));
    std::string file = (fs::path(dir) / f[2]).string();
    if (f[0] == train_split) {
      files.train = file;
    } else if (f[0] == test_split) {
      files.tests[f[1]] = file;
    }
  }
  if (files.train.empty()) throw ParseError(path + ": no training file listed");
  return files;
}

// Runs fn(i) for i in [0, n) on up to `threads` workers; each index is
// handled exactly once and results go to per-index slots.
void ParallelFor(size_t n, int32_t threads,
                 const std::function<void(size_t)> &fn) {
  size_t workers = std::min(n, static_cast<size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (size_t i = n * w / workers; i < n * (w + 1) / workers; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (std::thread &t : pool) t.join();
  for (const std::exception_ptr &e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

void Pipeline::BuildOntology() {
  Stage stage(this, "build-ontology", config_.sample_seed);
  if (config_.train_corpus.empty()) {
    throw StageError(stage.name(), 2, "no paths.train_corpus configured");
  }
  for (const std::string &p : config_.train_corpus) stage.Input(p);
  stage.Input(config_.kb);
  if (!config_.normalization.empty()) stage.Input(config_.normalization);

  NormalizationConfig norm = LoadNormalization(config_);
  std::vector<std::string> kb_errors;
  KnowledgeBase kb = LoadKb(config_.kb, &kb_errors);
  for (const std::string &e : kb_errors) Log(e);
  int64_t bad_lines = 0;
  LanguagePools pools = ExtractPools(config_.train_corpus, config_, &bad_lines,
                                     [this](const std::string &l) { Log(l); });

  // Types are counted over the balanced sample, before the typeless filter.
  Dataset sampled =
      SampleBalanced(pools, config_.sample_target, config_.sample_seed);
  TypeCounter counter;
  int64_t missing = 0;
  CountTypeOccurrences(sampled, kb, norm, &counter, &missing);
  TypeOntology ontology = xlet::BuildOntology(counter, config_.capacity);
  if (ontology.empty()) {
    throw StageError(stage.name(), 3, "no types found in the training corpus");
  }
  stage.Output(OutPath("ontology.tsv"), ontology.Serialize());
  stage.Note("types", ontology.size());
  stage.Note("distinct_types_seen", counter.counts().size());
  stage.Note("sampled_examples", sampled.size());
  stage.Note("examples_missing_entity", missing);
  stage.Note("malformed_corpus_lines", bad_lines);
  stage.Note("malformed_kb_lines", kb_errors.size());
  stage.Finish();
}

void Pipeline::BuildDataset() {
  Stage stage(this, "build-dataset", config_.sample_seed);
  TypeOntology ontology =
      TypeOntology::Load(stage.Input(OutPath("ontology.tsv"), "build-ontology"));
  for (const std::string &p : config_.train_corpus) stage.Input(p);
  for (const std::string &p : config_.test_corpus) stage.Input(p);
  stage.Input(config_.kb);
  if (!config_.normalization.empty()) stage.Input(config_.normalization);

  NormalizationConfig norm = LoadNormalization(config_);
  std::vector<std::string> kb_errors;
  KnowledgeBase kb = LoadKb(config_.kb, &kb_errors);
  GoldTypeMapper mapper(kb, ontology, norm);
  auto log = [this](const std::string &l) { Log(l); };

  int64_t bad_lines = 0;
  LanguagePools extracted =
      ExtractPools(config_.train_corpus, config_, &bad_lines, log);
  std::map<std::string, int64_t> extracted_sizes;
  for (const auto &[lang, examples] : extracted) {
    extracted_sizes[lang] = static_cast<int64_t>(examples.size());
  }
  // Sample each language, then label; the typeless filter comes last.
  LanguagePools sampled;
  for (Example &ex : SampleBalanced(extracted, config_.sample_target,
                                    config_.sample_seed)) {
    sampled[ex.language].push_back(std::move(ex));
  }
  std::map<std::string, LabelCounts> train_counts, test_counts;
  LanguagePools train_pools = LabelPools(std::move(sampled), &mapper, &train_counts);
  LanguagePools test_pools = LabelPools(
      ExtractPools(config_.test_corpus, config_, &bad_lines, log), &mapper,
      &test_counts);

  Dataset train;
  for (auto &[lang, examples] : train_pools) {
    for (Example &ex : examples) train.push_back(std::move(ex));
  }
  if (train.empty()) {
    throw StageError(stage.name(), 3, "no labeled training examples");
  }

  std::string summary = std::string(kSummaryHeader) + "\n";
  summary += SummaryLine({"#split", "language", "file", "extracted", "sampled",
                          "missing_entity", "typeless", "written"});
  stage.Output(OutPath("data/train.tsv"), SerializeDataset(train));
  for (const auto &[lang, c] : train_counts) {
    summary += SummaryLine(
        {"train", lang, "train.tsv", std::to_string(extracted_sizes[lang]),
         std::to_string(c.extracted), std::to_string(c.missing_entity),
         std::to_string(c.typeless), std::to_string(train_pools[lang].size())});
  }
  for (const auto &[lang, c] : test_counts) {
    const Dataset &examples = test_pools[lang];
    if (examples.empty()) continue;
    std::string file = "test." + lang + ".tsv";
    stage.Output(OutPath("data/" + file), SerializeDataset(examples));
    summary += SummaryLine(
        {"test", lang, file, std::to_string(c.extracted),
         std::to_string(c.extracted), std::to_string(c.missing_entity),
         std::to_string(c.typeless), std::to_string(examples.size())});
  }
  stage.Output(OutPath("data/summary.tsv"), summary);
  stage.Note("train_examples", train.size());
  stage.Note("malformed_corpus_lines", bad_lines);
  stage.Note("malformed_kb_lines", kb_errors.size());
  stage.Finish();
}

void Pipeline::Holdout() {
  Stage stage(this, "holdout", config_.holdout_seed);
  SplitFiles files =
      ReadSummary(stage.Input(OutPath("data/summary.tsv"), "build-dataset"),
                  "train", "test", OutPath("data"));
  Dataset train = LoadDataset(stage.Input(files.train, "build-dataset"));
  LanguagePools tests;
  for (const auto &[lang, path] : files.tests) {
    tests[lang] = LoadDataset(stage.Input(path, "build-dataset"));
  }
  if (tests.empty()) throw StageError(stage.name(), 2, "no test sets to hold out from");

  HoldoutSplit split =
      HoldoutEntities(train, tests, config_.min_fraction, config_.total_target,
                      config_.holdout_seed);

  std::string qids = std::string(kHoldoutHeader) + "\n";
  for (const std::string &q : split.held_out_qids) qids += q + "\n";
  stage.Output(OutPath("holdout/held_out.txt"), qids);
  stage.Output(OutPath("holdout/train.tsv"), SerializeDataset(split.filtered_train));

  std::string summary = std::string(kSummaryHeader) + "\n";
  summary += SummaryLine({"#split", "language", "file", "examples"});
  summary += SummaryLine({"train", "*", "train.tsv",
                          std::to_string(split.filtered_train.size())});
  for (const auto &[lang, examples] : split.unseen_tests) {
    if (examples.empty()) continue;
    std::string file = "unseen." + lang + ".tsv";
    stage.Output(OutPath("holdout/" + file), SerializeDataset(examples));
    summary += SummaryLine({"unseen", lang, file, std::to_string(examples.size())});
  }
  stage.Output(OutPath("holdout/summary.tsv"), summary);
  stage.Note("held_out_entities", split.held_out_qids.size());
  stage.Note("filtered_train_examples", split.filtered_train.size());
  stage.Note("removed_train_examples",
             train.size() - split.filtered_train.size());
  stage.Finish();
}

namespace {

struct SplitPaths {
  std::string summary;
  std::string dir;
  std::string test_split;
  std::string producer;
};

SplitPaths PathsFor(const Pipeline &p, Split split) {
  if (split == Split::kFull) {
    return {p.OutPath("data/summary.tsv"), p.OutPath("data"), "test",
            "build-dataset"};
  }
  return {p.OutPath("holdout/summary.tsv"), p.OutPath("holdout"), "unseen",
          "holdout"};
}

// Builds model inputs; examples whose mention cannot fit are dropped and
// counted.
std::vector<TrainingExample> ToTrainingExamples(const Dataset &data,
                                                const SubwordVocab &vocab,
                                                int32_t cap, int64_t *skipped) {
  std::vector<TrainingExample> out;
  out.reserve(data.size());
  for (const Example &ex : data) {
    try {
      out.push_back({BuildInput(ex.Mention(), ex.context, vocab, cap), ex.gold});
    } catch (const OversizeError &) {
      ++*skipped;
    }
  }
  return out;
}

std::string FormatLog(const std::vector<double> &losses) {
  std::string out = "#epoch\tmean_loss\n";
  for (size_t i = 0; i < losses.size(); ++i) {
    out += std::to_string(i) + "\t" + FormatDouble(losses[i]) + "\n";
  }
  return out;
}

}  // namespace

void Pipeline::TrainModel(Split split) {
  Stage stage(this, std::string("train.") + SplitName(split), config_.train.seed);
  SplitPaths paths = PathsFor(*this, split);
  SplitFiles files = ReadSummary(stage.Input(paths.summary, paths.producer),
                                 "train", paths.test_split, paths.dir);
  TypeOntology ontology =
      TypeOntology::Load(stage.Input(OutPath("ontology.tsv"), "build-ontology"));
  Dataset train = LoadDataset(stage.Input(files.train, paths.producer));
  if (train.empty()) throw StageError(stage.name(), 3, "training set is empty");

  std::vector<std::string> lines;
  lines.reserve(train.size());
  for (const Example &ex : train) lines.push_back(Join(ex.context, " "));
  SubwordVocab vocab = SubwordVocab::Train(lines, config_.vocab_size);

  int64_t skipped = 0;
  std::vector<TrainingExample> data =
      ToTrainingExamples(train, vocab, config_.model.cap, &skipped);
  if (data.empty()) {
    throw StageError(stage.name(), 3, "no training example fits the length cap");
  }

  ModelConfig model = config_.model;
  model.vocab_size = vocab.size();
  model.num_types = ontology.IdSpace();
  std::optional<TrainResult> trained;
  try {
    trained = Train(data, model, config_.train, [this](int32_t epoch, double loss) {
      Log("epoch " + std::to_string(epoch) + " mean loss " + FormatDouble(loss));
    });
  } catch (const TrainingDivergedError &e) {
    throw StageError(stage.name(), 3, e.what());
  }
  const TrainResult &result = *trained;

  std::string dir = std::string("models/") + SplitName(split) + "/";
  stage.Output(OutPath(dir + "vocab.txt"), vocab.Serialize());
  stage.Output(OutPath(dir + "model.ckpt"), result.params.Serialize(vocab.Hash()));
  stage.Output(OutPath(dir + "log.tsv"), FormatLog(result.epoch_mean_loss));
  stage.Note("examples", data.size());
  stage.Note("skipped_oversize", skipped);
  stage.Note("vocab_size", vocab.size());
  stage.Note("parameters", result.params.values().size());
  stage.Finish();
}

void Pipeline::PredictSplit(Split split) {
  Stage stage(this, std::string("predict.") + SplitName(split), 0);
  SplitPaths paths = PathsFor(*this, split);
  SplitFiles files = ReadSummary(stage.Input(paths.summary, paths.producer),
                                 "train", paths.test_split, paths.dir);
  std::string dir = std::string("models/") + SplitName(split) + "/";
  std::string train_stage = std::string("train --split ") + SplitName(split);
  SubwordVocab vocab =
      SubwordVocab::Load(stage.Input(OutPath(dir + "vocab.txt"), train_stage));
  ModelParams params = ModelParams::Load(
      stage.Input(OutPath(dir + "model.ckpt"), train_stage), vocab.Hash());

  std::vector<PredictionRecord> records;
  int64_t skipped = 0;
  for (const auto &[lang, path] : files.tests) {
    Dataset test = LoadDataset(stage.Input(path, paths.producer));
    std::vector<std::optional<PredictionRecord>> slots(test.size());
    ParallelFor(test.size(), config_.train.threads, [&](size_t i) {
      const Example &ex = test[i];
      InputSequence x;
      try {
        x = BuildInput(ex.Mention(), ex.context, vocab, params.config().cap);
      } catch (const OversizeError &) {
        return;
      }
      slots[i] = PredictionRecord{lang, ex.qid, static_cast<int64_t>(i),
                                  Predict(x, params, config_.threshold).types,
                                  ex.gold};
    });
    for (auto &slot : slots) {
      if (slot) {
        records.push_back(std::move(*slot));
      } else {
        ++skipped;
      }
    }
  }
  stage.Output(OutPath(std::string("predictions/model.") + SplitName(split) + ".tsv"),
               SerializePredictions(records));
  stage.Note("records", records.size());
  stage.Note("skipped_oversize", skipped);
  stage.Finish();
}

void Pipeline::Baseline(BaselineKind kind, Split split) {
  const std::string which = BaselineKindName(kind);
  Stage stage(this, "baseline." + which + "." + SplitName(split),
              kind == BaselineKind::kSimilarity ? config_.baseline_seed : 0);
  SplitPaths paths = PathsFor(*this, split);
  SplitFiles files = ReadSummary(stage.Input(paths.summary, paths.producer),
                                 "train", paths.test_split, paths.dir);
  Dataset train = LoadDataset(stage.Input(files.train, paths.producer));
  std::map<std::string, Dataset> tests;
  for (const auto &[lang, path] : files.tests) {
    tests[lang] = LoadDataset(stage.Input(path, paths.producer));
  }

  std::vector<PredictionRecord> records;
  int64_t skipped = 0;
  if (kind == BaselineKind::kStringMatch) {
    AliasTable table = AliasTable::Build(train);
    stage.Output(OutPath(std::string("baselines/alias.") + SplitName(split) + ".tsv"),
                 table.Serialize());
    for (const auto &[lang, test] : tests) {
      for (size_t i = 0; i < test.size(); ++i) {
        records.push_back({lang, test[i].qid, static_cast<int64_t>(i),
                           StringMatchPredict(test[i].MentionString(), table),
                           test[i].gold});
      }
    }
    stage.Note("aliases", table.size());
  } else {
    std::string dir = std::string("models/") + SplitName(split) + "/";
    std::string train_stage = std::string("train --split ") + SplitName(split);
    SubwordVocab vocab =
        SubwordVocab::Load(stage.Input(OutPath(dir + "vocab.txt"), train_stage));
    ModelParams params = ModelParams::Load(
        stage.Input(OutPath(dir + "model.ckpt"), train_stage), vocab.Hash());
    TransformerEncoder encoder(params);
    MentionIndex index = BuildMentionIndex(train, vocab, encoder);
    if (index.size() == 0) {
      throw StageError(stage.name(), 3, "no training mention could be encoded");
    }
    stage.Output(OutPath(std::string("baselines/index.") + SplitName(split) + ".bin"),
                 index.Serialize());
    std::optional<ClusteredMentionIndex> clustered;
    if (config_.clusters > 0) {
      clustered.emplace(index, config_.clusters, config_.probes,
                        config_.baseline_seed);
    }
    const MentionSearcher &searcher =
        clustered ? static_cast<const MentionSearcher &>(*clustered) : index;
    for (const auto &[lang, test] : tests) {
      std::vector<std::optional<PredictionRecord>> slots(test.size());
      ParallelFor(test.size(), config_.train.threads, [&](size_t i) {
        TypeSet predicted;
        try {
          predicted = SimilarityPredict(test[i].MentionString(), searcher,
                                        vocab, encoder);
        } catch (const ValidationError &) {
          return;
        }
        slots[i] = PredictionRecord{lang, test[i].qid, static_cast<int64_t>(i),
                                    std::move(predicted), test[i].gold};
      });
      for (auto &slot : slots) {
        if (slot) {
          records.push_back(std::move(*slot));
        } else {
          ++skipped;
        }
      }
    }
    stage.Note("index_entries", index.size());
    stage.Note("index_skipped", index.skipped());
  }
  stage.Output(OutPath("predictions/" + which + "." + SplitName(split) + ".tsv"),
               SerializePredictions(records));
  stage.Note("records", records.size());
  stage.Note("skipped", skipped);
  stage.Finish();
}

namespace {

std::vector<PredictionRecord> LoadNonEmptyPredictions(
    const std::string &stage, const std::string &path,
    const TypeOntology &ontology) {
  if (fs::file_size(path) == 0) {
    throw StageError(stage, 2, "predictions file " + path + " is empty");
  }
  std::vector<PredictionRecord> records = LoadPredictions(path);
  if (records.empty()) {
    throw StageError(stage, 2, "predictions file " + path + " is empty");
  }
  for (const PredictionRecord &r : records) {
    for (const TypeSet *set : {&r.predicted, &r.gold}) {
      for (TypeId id : *set) {
        if (!ontology.Contains(id)) {
          throw StageError(stage, 3,
                           path + ": type id " + std::to_string(id) +
                               " is not in the ontology");
        }
      }
    }
  }
  return records;
}

}  // namespace

std::string Pipeline::Evaluate(const EvaluateOptions &options) {
  Stage stage(this, "evaluate." + options.name, 0);
  if (options.seen.empty()) {
    throw StageError(stage.name(), 2, "no predictions file given");
  }
  TypeOntology ontology =
      TypeOntology::Load(stage.Input(OutPath("ontology.tsv"), "build-ontology"));
  std::vector<PredictionRecord> seen;
  try {
    seen = LoadNonEmptyPredictions(stage.name(), stage.Input(options.seen), ontology);
  } catch (const StageError &) {
    throw;
  } catch (const Error &e) {
    throw StageError(stage.name(), ExitCodeFor(e), options.seen + ": " + e.what());
  }
  std::vector<PredictionRecord> unseen;
  if (!options.unseen.empty()) {
    try {
      unseen = LoadNonEmptyPredictions(stage.name(), stage.Input(options.unseen),
                                       ontology);
    } catch (const StageError &) {
      throw;
    } catch (const Error &e) {
      throw StageError(stage.name(), ExitCodeFor(e),
                       options.unseen + ": " + e.what());
    }
  }
  std::vector<Adjudication> adjudications;
  if (!options.adjudications.empty()) {
    adjudications = LoadAdjudications(stage.Input(options.adjudications));
  }

  EvalReport report = BuildReport(GroupByLanguage(seen), GroupByLanguage(unseen),
                                  ontology, adjudications);
  std::string text = report.ToText();
  stage.Output(OutPath("reports/" + options.name + ".txt"), text);
  stage.Output(OutPath("reports/" + options.name + ".json"), report.ToJson());
  stage.Finish();
  return text;
}

GradCheckOutcome Pipeline::GradCheckStage() {
  Stage stage(this, "gradcheck", config_.gc_seed);
  GradCheckFixture fixture = MakeGradCheckFixture(config_);
  GradCheckOutcome outcome;
  outcome.result = GradCheck(fixture.params, fixture.x, fixture.gold,
                             config_.gc_epsilon, config_.gc_coordinates,
                             config_.gc_seed);
  outcome.passed = outcome.result.max_relative_error <= config_.gc_tolerance;
  const GradCheckResult &r = outcome.result;
  std::string out;
  out += "status\t" + std::string(outcome.passed ? "pass" : "fail") + "\n";
  out += "max_relative_error\t" + FormatDouble(r.max_relative_error) + "\n";
  out += "tolerance\t" + FormatDouble(config_.gc_tolerance) + "\n";
  out += "coordinates\t" + std::to_string(r.coordinates) + "\n";
  out += "epsilon\t" + FormatDouble(config_.gc_epsilon) + "\n";
  out += "worst_block\t" + r.worst_block + "\n";
  out += "worst_index\t" + std::to_string(r.worst_index) + "\n";
  out += "worst_analytic\t" + FormatDouble(r.worst_analytic) + "\n";
  out += "worst_numeric\t" + FormatDouble(r.worst_numeric) + "\n";
  stage.Output(OutPath("gradcheck.tsv"), out);
  stage.Note("passed", outcome.passed);
  stage.Finish();
  return outcome;
}

}  // namespace xlet
