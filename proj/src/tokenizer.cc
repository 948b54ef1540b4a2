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

#include "xlet/tokenizer.h"

#include <fstream>
#include <sstream>

#include "xlet/hash.h"
#include "xlet/text.h"

namespace xlet {
namespace {

constexpr char kVocabHeader[] = "#xlet-vocab v1";

std::string ToHex(std::string_view bytes) {
  static const char kHex[] = "0123456789abcdef";
  std::string hex;
  for (char c : bytes) {
    auto b = static_cast<unsigned char>(c);
    hex.push_back(kHex[b >> 4]);
    hex.push_back(kHex[b & 0xF]);
  }
  return hex;
}

}  // namespace

std::vector<std::string_view> PreTokenize(std::string_view text) {
  std::vector<std::string_view> chunks;
  size_t start = 0;
  for (size_t i = 1; i < text.size(); ++i) {
    if (text[i] == ' ') {
      chunks.push_back(text.substr(start, i - start));
      start = i;
    }
  }
  if (start < text.size()) chunks.push_back(text.substr(start));
  return chunks;
}

SubwordVocab::SubwordVocab() {
  pieces_ = {"[PAD]", "[CLS]", "[SEP]"};
  for (int b = 0; b < 256; ++b) {
    pieces_.emplace_back(1, static_cast<char>(b));
  }
}

void SubwordVocab::AddMerge(PieceId left, PieceId right) {
  PieceId id = size();
  pieces_.push_back(pieces_[left] + pieces_[right]);
  merges_.emplace_back(left, right);
  merge_ids_.emplace(std::make_pair(left, right), id);
}

SubwordVocab SubwordVocab::Train(const std::vector<std::string> &lines,
                                 int32_t vocab_size) {
  if (vocab_size < kFirstMerge) {
    throw ConfigError("vocab_size " + std::to_string(vocab_size) +
                      " is below the minimum " + std::to_string(kFirstMerge));
  }
  SubwordVocab vocab;

  // Distinct chunks with their frequencies, in byte order.
  std::map<std::string, int64_t> chunk_counts;
  for (const std::string &line : lines) {
    for (std::string_view chunk : PreTokenize(line)) {
      ++chunk_counts[std::string(chunk)];
    }
  }
  std::vector<std::vector<PieceId>> words;
  std::vector<int64_t> counts;
  for (const auto &[chunk, count] : chunk_counts) {
    std::vector<PieceId> ids;
    for (char c : chunk) {
      ids.push_back(kFirstByte + static_cast<unsigned char>(c));
    }
    if (ids.size() < 2) continue;
    words.push_back(std::move(ids));
    counts.push_back(count);
  }

  while (vocab.size() < vocab_size) {
    std::map<std::pair<PieceId, PieceId>, int64_t> pair_counts;
    for (size_t w = 0; w < words.size(); ++w) {
      const std::vector<PieceId> &ids = words[w];
      for (size_t i = 0; i + 1 < ids.size(); ++i) {
        pair_counts[{ids[i], ids[i + 1]}] += counts[w];
      }
    }
    std::pair<PieceId, PieceId> best{-1, -1};
    int64_t best_count = 1;
    for (const auto &[pair, count] : pair_counts) {
      if (count > best_count) {
        best = pair;
        best_count = count;
      }
    }
    if (best.first < 0) break;
    PieceId merged = vocab.size();
    vocab.AddMerge(best.first, best.second);
    for (std::vector<PieceId> &ids : words) {
      std::vector<PieceId> out;
      out.reserve(ids.size());
      for (size_t i = 0; i < ids.size(); ++i) {
        if (i + 1 < ids.size() && ids[i] == best.first &&
            ids[i + 1] == best.second) {
          out.push_back(merged);
          ++i;
        } else {
          out.push_back(ids[i]);
        }
      }
      ids.swap(out);
    }
  }
  return vocab;
}

void SubwordVocab::EncodeChunk(std::string_view chunk,
                               std::vector<PieceId> *out) const {
  std::vector<PieceId> ids;
  ids.reserve(chunk.size());
  for (char c : chunk) {
    ids.push_back(kFirstByte + static_cast<unsigned char>(c));
  }
  // Apply the earliest learned merge present until none applies, merging every
  // occurrence left to right as in training.
  for (;;) {
    PieceId best = -1;
    std::pair<PieceId, PieceId> best_pair;
    for (size_t i = 0; i + 1 < ids.size(); ++i) {
      auto it = merge_ids_.find({ids[i], ids[i + 1]});
      if (it != merge_ids_.end() && (best < 0 || it->second < best)) {
        best = it->second;
        best_pair = it->first;
      }
    }
    if (best < 0) break;
    std::vector<PieceId> merged;
    merged.reserve(ids.size());
    for (size_t i = 0; i < ids.size(); ++i) {
      if (i + 1 < ids.size() && ids[i] == best_pair.first &&
          ids[i + 1] == best_pair.second) {
        merged.push_back(best);
        ++i;
      } else {
        merged.push_back(ids[i]);
      }
    }
    ids.swap(merged);
  }
  out->insert(out->end(), ids.begin(), ids.end());
}

std::vector<PieceId> SubwordVocab::Encode(std::string_view text) const {
  std::vector<PieceId> ids;
  for (std::string_view chunk : PreTokenize(text)) EncodeChunk(chunk, &ids);
  return ids;
}

std::string SubwordVocab::Decode(const std::vector<PieceId> &ids) const {
  std::string text;
  for (PieceId id : ids) {
    if (id < kFirstByte) continue;
    text += pieces_.at(id);
  }
  return text;
}

std::string SubwordVocab::Serialize() const {
  std::string out = kVocabHeader;
  out += "\n#size\t" + std::to_string(size()) + "\n";
  for (size_t i = 0; i < merges_.size(); ++i) {
    PieceId id = kFirstMerge + static_cast<PieceId>(i);
    out += std::to_string(id) + "\t" + std::to_string(merges_[i].first) +
           "\t" + std::to_string(merges_[i].second) + "\t" +
           ToHex(pieces_[id]) + "\n";
  }
  return out;
}

SubwordVocab SubwordVocab::Parse(std::string_view text) {
  std::vector<std::string> lines = SplitFields(text, '\n');
  if (lines.empty() || lines[0] != kVocabHeader) {
    throw ValidationError("vocabulary schema mismatch: expected '" +
                          std::string(kVocabHeader) + "', found '" +
                          (lines.empty() ? "" : lines[0]) + "'");
  }
  SubwordVocab vocab;
  int64_t declared = -1;
  for (size_t i = 1; i < lines.size(); ++i) {
    const std::string &line = lines[i];
    if (line.empty()) continue;
    std::vector<std::string> fields = SplitFields(line, '\t');
    if (line[0] == '#') {
      if (fields.size() == 2 && fields[0] == "#size") {
        declared = ParseInt(fields[1]);
      }
      continue;
    }
    std::string where = "vocabulary line " + std::to_string(i + 1);
    if (fields.size() != 4) throw ParseError(where + ": expected 4 fields");
    int64_t id = ParseInt(fields[0]);
    int64_t left = ParseInt(fields[1]);
    int64_t right = ParseInt(fields[2]);
    if (id != vocab.size() || left < kFirstByte || right < kFirstByte ||
        left >= id || right >= id) {
      throw ParseError(where + ": merge ids out of order");
    }
    vocab.AddMerge(static_cast<PieceId>(left), static_cast<PieceId>(right));
    if (ToHex(vocab.pieces_.back()) != fields[3]) {
      throw ParseError(where + ": piece bytes disagree with merge");
    }
  }
  if (declared >= 0 && declared != vocab.size()) {
    throw ParseError("vocabulary declares " + std::to_string(declared) +
                     " pieces but holds " + std::to_string(vocab.size()));
  }
  return vocab;
}

void SubwordVocab::Save(const std::string &path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << Serialize();
}

SubwordVocab SubwordVocab::Load(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return Parse(ss.str());
}

std::string SubwordVocab::Hash() const { return Sha256Hex(Serialize()); }

InputSequence BuildInput(const std::vector<std::string> &mention,
                         const std::vector<std::string> &context,
                         const SubwordVocab &vocab, int32_t cap) {
  if (mention.empty()) throw ValidationError("mention must be non-empty");
  std::vector<PieceId> m = vocab.Encode(Join(mention, " "));
  std::vector<PieceId> s = vocab.Encode(Join(context, " "));
  const auto fixed = static_cast<int64_t>(m.size()) + 3;
  if (fixed > cap) {
    throw OversizeError("mention of " + std::to_string(m.size()) +
                        " pieces does not fit under cap " +
                        std::to_string(cap));
  }
  auto excess = fixed + static_cast<int64_t>(s.size()) - cap;
  size_t front = 0;
  size_t back = s.size();
  if (excess > 0) {
    front = static_cast<size_t>(excess / 2);
    back = s.size() - static_cast<size_t>(excess - excess / 2);
  }

  InputSequence x;
  x.ids.reserve(fixed + (back - front));
  x.ids.push_back(SubwordVocab::kCls);
  x.ids.insert(x.ids.end(), m.begin(), m.end());
  x.ids.push_back(SubwordVocab::kSep);
  x.segments.assign(x.ids.size(), 0);
  x.ids.insert(x.ids.end(), s.begin() + front, s.begin() + back);
  x.ids.push_back(SubwordVocab::kSep);
  x.segments.resize(x.ids.size(), 1);
  return x;
}

}  // namespace xlet
