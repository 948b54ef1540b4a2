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

// Byte-level BPE subword vocabulary.
//
// Ids 0-2 are the reserved [PAD], [CLS] and [SEP] symbols, ids 3-258 are the
// 256 single-byte pieces, and learned merges follow in merge order. Since every
// byte has its own piece, tokenization is total and never needs an unknown id.
// Text is pre-split before every space so that a piece never spans a word
// boundary except for the single leading space it carries.

#ifndef XLET_TOKENIZER_H_
#define XLET_TOKENIZER_H_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "xlet/common.h"

namespace xlet {

using PieceId = int32_t;

class SubwordVocab {
 public:
  static constexpr PieceId kPad = 0;
  static constexpr PieceId kCls = 1;
  static constexpr PieceId kSep = 2;
  static constexpr PieceId kFirstByte = 3;
  static constexpr PieceId kFirstMerge = kFirstByte + 256;
  static constexpr int kReservedCount = 3;

  // Byte pieces only.
  SubwordVocab();

  // Learns merges until the vocabulary holds vocab_size pieces or no pair
  // occurs at least twice. Ties between equally frequent pairs go to the
  // smaller (left, right) id pair. Throws ConfigError when vocab_size is below
  // 256 + reserved.
  static SubwordVocab Train(const std::vector<std::string> &lines,
                            int32_t vocab_size);

  std::vector<PieceId> Encode(std::string_view text) const;
  std::string Decode(const std::vector<PieceId> &ids) const;

  int32_t size() const { return static_cast<int32_t>(pieces_.size()); }
  const std::string &Piece(PieceId id) const { return pieces_.at(id); }
  const std::vector<std::pair<PieceId, PieceId>> &merges() const {
    return merges_;
  }

  std::string Serialize() const;
  static SubwordVocab Parse(std::string_view text);
  void Save(const std::string &path) const;
  static SubwordVocab Load(const std::string &path);

  // SHA-256 of the serialized vocabulary; stored in checkpoints.
  std::string Hash() const;

 private:
  void AddMerge(PieceId left, PieceId right);
  void EncodeChunk(std::string_view chunk, std::vector<PieceId> *out) const;

  std::vector<std::string> pieces_;
  std::vector<std::pair<PieceId, PieceId>> merges_;
  // (left, right) -> merged id; the merge rank is id - kFirstMerge.
  std::map<std::pair<PieceId, PieceId>, PieceId> merge_ids_;
};

// Splits text before every space; concatenating the chunks yields the input.
std::vector<std::string_view> PreTokenize(std::string_view text);

// Token ids for CLS m SEP s SEP. Segment 0 covers CLS, the mention and the
// first SEP; segment 1 covers the context and the final SEP.
struct InputSequence {
  std::vector<PieceId> ids;
  std::vector<uint8_t> segments;

  size_t size() const { return ids.size(); }
};

// Raised when the mention alone does not fit under the length cap.
class OversizeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// When the sequence exceeds cap, context pieces are dropped from both ends of
// the context (half from the front, the rest from the back) before any
// mention piece would be. Throws OversizeError if the mention does not fit.
InputSequence BuildInput(const std::vector<std::string> &mention,
                         const std::vector<std::string> &context,
                         const SubwordVocab &vocab, int32_t cap);

}  // namespace xlet

#endif  // XLET_TOKENIZER_H_
