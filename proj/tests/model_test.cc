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


#include "xlet/model.h"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "xlet/random.h"
#include "xlet/text.h"

namespace xlet {
namespace {

ModelConfig SmallConfig() {
  ModelConfig c;
  c.dim = 16;
  c.layers = 2;
  c.heads = 4;
  c.ffn_dim = 32;
  c.cap = 32;
  c.vocab_size = SubwordVocab::kFirstMerge;
  c.num_types = 5;
  return c;
}

InputSequence FixtureInput() {
  return BuildInput({"Helsinki"}, {"Helsinki", "on", "Suomen", "pääkaupunki"},
                    SubwordVocab(), 32);
}

TEST(EncodeTest, ShapeAndDeterminism) {
  ModelParams params = ModelParams::Init(SmallConfig(), 0);
  Vector a = Encode(FixtureInput(), params);
  Vector b = Encode(FixtureInput(), params);
  ASSERT_EQ(a.size(), 16);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    EXPECT_EQ(std::memcmp(&a(i), &b(i), sizeof(double)), 0);
  }
}

TEST(EncodeTest, MatchesGoldenVector) {
  ModelParams params = ModelParams::Init(SmallConfig(), 0);
  Vector h = Encode(FixtureInput(), params);
  const std::string path = std::string(XLET_TEST_DATA_DIR) + "/golden_encode.txt";
  if (std::getenv("XLET_UPDATE_GOLDEN") != nullptr) {
    std::ofstream out(path);
    for (Eigen::Index i = 0; i < h.size(); ++i) out << FormatDouble(h(i)) << "\n";
  }
  std::ifstream in(path);
  ASSERT_TRUE(in) << "missing " << path;
  std::vector<double> golden;
  std::string line;
  while (std::getline(in, line)) golden.push_back(ParseDouble(line));
  ASSERT_EQ(golden.size(), static_cast<size_t>(h.size()));
  for (Eigen::Index i = 0; i < h.size(); ++i) EXPECT_NEAR(h(i), golden[i], 1e-6);
}

TEST(EncodeTest, PositionsAreTheOnlyOrderSignal) {
  ModelParams params = ModelParams::Init(SmallConfig(), 3, 0.3);
  params.Mat(*params.layout().position_embedding).setZero();
  InputSequence x = FixtureInput();
  InputSequence y = x;
  // Reverse the context pieces, which all share segment 1.
  auto first = std::find(y.ids.begin() + 1, y.ids.end(), SubwordVocab::kSep) + 1;
  std::reverse(first, y.ids.end() - 1);
  ASSERT_NE(x.ids, y.ids);
  EXPECT_LT((Encode(x, params) - Encode(y, params)).norm(), 1e-12);

  ModelParams with_pos = ModelParams::Init(SmallConfig(), 3, 0.3);
  EXPECT_GT((Encode(x, with_pos) - Encode(y, with_pos)).norm(), 1e-6);
}

TEST(EncodeTest, RejectsBadInputs) {
  ModelParams params = ModelParams::Init(SmallConfig(), 0);
  InputSequence x = FixtureInput();
  x.ids[1] = SubwordVocab::kFirstMerge + 5;
  EXPECT_THROW(Encode(x, params), ValidationError);
  InputSequence long_x;
  long_x.ids.assign(40, SubwordVocab::kFirstByte);
  long_x.segments.assign(40, 0);
  EXPECT_THROW(Encode(long_x, params), OversizeError);
}

TEST(ScoreTest, ClosedFormToy) {
  Vector h(2);
  h << 1, 0;
  Matrix t(2, 1);
  t << 3, -1;
  Vector s = ScoreTypes(h, t);
  EXPECT_DOUBLE_EQ(s(0), 3.0);
  Vector p = ToProbabilities(s);
  EXPECT_NEAR(p(0), 0.9526, 1e-4);
  EXPECT_NEAR(p(0), 1.0 / (1.0 + std::exp(-3.0)), 1e-15);
  EXPECT_EQ(PredictTypes(p), TypeSet{0});
}

TEST(ScoreTest, ZeroScoreIsExcluded) {
  Vector s = Vector::Zero(4);
  Vector p = ToProbabilities(s);
  for (Eigen::Index i = 0; i < 4; ++i) EXPECT_EQ(p(i), 0.5);
  EXPECT_TRUE(PredictTypes(p).empty());
  Vector q(1);
  q << std::nextafter(0.5, 1.0);
  EXPECT_EQ(PredictTypes(q), TypeSet{0});
}

TEST(ScoreTest, ZeroStateGivesEmptyPrediction) {
  ModelParams params = ModelParams::Init(SmallConfig(), 1);
  Vector h = Vector::Zero(16);
  EXPECT_TRUE(PredictTypes(ToProbabilities(ScoreTypes(h, params))).empty());
}

TEST(ScoreTest, ProbabilitiesStayInRangeAndAreMonotone) {
  Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    Vector s(6);
    for (Eigen::Index k = 0; k < 6; ++k) s(k) = (rng.UniformDouble() - 0.5) * 2000;
    Vector p = ToProbabilities(s);
    TypeSet predicted = PredictTypes(p);
    for (Eigen::Index k = 0; k < 6; ++k) {
      EXPECT_GE(p(k), 0.0);
      EXPECT_LE(p(k), 1.0);
      EXPECT_EQ(predicted.count(static_cast<TypeId>(k)) > 0, p(k) > 0.5);
    }
    Vector bumped = s;
    bumped(0) += 0.5;
    Vector pb = ToProbabilities(bumped);
    EXPECT_GE(pb(0), p(0));
    if (std::abs(s(0)) < 30) {
      EXPECT_GT(pb(0), p(0));
    }
    if (predicted.count(0)) {
      EXPECT_TRUE(PredictTypes(pb).count(0));
    }
  }
}

TEST(LossTest, HalfProbabilitiesGiveLn2PerType) {
  Vector p = Vector::Constant(7, 0.5);
  Vector y = GoldIndicator({1, 4}, 7);
  EXPECT_NEAR(BceLoss(p, y), 7 * std::log(2.0), 1e-12);
}

TEST(LossTest, SingleActiveType) {
  Vector p = Vector::Constant(5, 0.0);
  p(2) = 0.9;
  Vector y = GoldIndicator({2}, 5);
  // The clamped zeros contribute -log(1 - 1e-7) each.
  EXPECT_NEAR(BceLoss(p, y), -std::log(0.9), 1e-6);
  EXPECT_NEAR(BceLoss(p, y), 0.10536, 1e-5);
}

TEST(LossTest, SymmetryAndNonNegativity) {
  Rng rng(9);
  for (int i = 0; i < 100; ++i) {
    double q = rng.UniformDouble();
    Vector p(1), one(1), flipped(1), zero(1);
    p << q;
    one << 1;
    flipped << 1 - q;
    zero << 0;
    EXPECT_NEAR(BceLoss(p, one), BceLoss(flipped, zero), 1e-9);
    EXPECT_GE(BceLoss(p, one), 0.0);
  }
  Vector exact = GoldIndicator({0, 2}, 3);
  EXPECT_NEAR(BceLoss(exact, exact), 3 * -std::log(1 - kProbabilityEpsilon), 1e-12);
  EXPECT_THROW(BceLoss(Vector::Zero(2), Vector::Zero(3)), ValidationError);
}

TEST(LossTest, ScoreGradientMatchesClosedForm) {
  Rng rng(4);
  Vector s(6);
  for (Eigen::Index k = 0; k < 6; ++k) s(k) = rng.Normal() * 3;
  Vector y = GoldIndicator({0, 3}, 6);
  Vector g = BceScoreGradient(ToProbabilities(s), y);
  const double eps = 1e-6;
  for (Eigen::Index k = 0; k < 6; ++k) {
    EXPECT_DOUBLE_EQ(g(k), ToProbabilities(s)(k) - y(k));
    Vector up = s, down = s;
    up(k) += eps;
    down(k) -= eps;
    double numeric = (BceLoss(ToProbabilities(up), y) -
                      BceLoss(ToProbabilities(down), y)) / (2 * eps);
    EXPECT_NEAR(g(k), numeric, 1e-6);
  }
}

TEST(GradientTest, PaddingEmbeddingGetsZeroGradient) {
  ModelParams params = ModelParams::Init(SmallConfig(), 0, 0.1);
  InputSequence x = BuildInput({"Oulu"}, {"in", "Oulu"}, SubwordVocab(), 32);
  ASSERT_LT(x.size(), 32u);
  std::vector<double> grad(params.values().size(), 0.0);
  LossAndGradient(params, x, GoldIndicator({1}, 5), &grad);
  const ParamBlock &tok = *params.layout().token_embedding;
  for (int32_t c = 0; c < tok.cols; ++c) {
    EXPECT_EQ(grad[tok.offset + SubwordVocab::kPad * tok.cols + c], 0.0);
  }
  const ParamBlock &pos = *params.layout().position_embedding;
  // Positions past the sequence end get nothing either.
  for (int64_t r = static_cast<int64_t>(x.size()); r < pos.rows; ++r) {
    for (int32_t c = 0; c < pos.cols; ++c) {
      EXPECT_EQ(grad[pos.offset + r * pos.cols + c], 0.0);
    }
  }
}

TEST(GradientTest, TypeMatrixGradientIsOuterProduct) {
  ModelParams params = ModelParams::Init(SmallConfig(), 5, 0.1);
  InputSequence x = FixtureInput();
  Vector y = GoldIndicator({0, 2}, 5);
  std::vector<double> grad(params.values().size(), 0.0);
  LossAndGradient(params, x, y, &grad);
  Vector h = Encode(x, params);
  Vector dscores = ToProbabilities(ScoreTypes(h, params)) - y;
  const ParamBlock &t = *params.layout().type_matrix;
  for (int32_t r = 0; r < t.rows; ++r) {
    for (int32_t c = 0; c < t.cols; ++c) {
      EXPECT_NEAR(grad[t.offset + static_cast<int64_t>(r) * t.cols + c],
                  h(r) * dscores(c), 1e-12);
    }
  }
}

TEST(ParamsTest, InitIsSeeded) {
  ModelParams a = ModelParams::Init(SmallConfig(), 7);
  ModelParams b = ModelParams::Init(SmallConfig(), 7);
  ModelParams c = ModelParams::Init(SmallConfig(), 8);
  EXPECT_EQ(a.values(), b.values());
  EXPECT_NE(a.values(), c.values());
  EXPECT_TRUE(a.AllFinite());
  const ParamBlock &tok = *a.layout().token_embedding;
  for (int32_t col = 0; col < tok.cols; ++col) {
    EXPECT_EQ(a.values()[tok.offset + col], 0.0);  // PAD row
  }
}

TEST(ParamsTest, LayoutCoversBufferContiguously) {
  ParamLayout layout(SmallConfig());
  int64_t offset = 0;
  for (const ParamBlock &b : layout.blocks()) {
    EXPECT_EQ(b.offset, offset) << b.name;
    offset += b.size();
  }
  EXPECT_EQ(offset, layout.total());
  EXPECT_EQ(layout.blocks().back().name, "type_matrix");
  EXPECT_EQ(layout.type_matrix->rows, 16);
  EXPECT_EQ(layout.type_matrix->cols, 5);
  EXPECT_EQ(layout.type_matrix->group, ParamGroup::kTypeMatrix);
}

TEST(ParamsTest, RejectsInconsistentShapes) {
  ModelConfig c = SmallConfig();
  c.heads = 3;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = SmallConfig();
  c.vocab_size = 10;
  EXPECT_THROW(c.Validate(), ConfigError);
}

TEST(CheckpointTest, RoundTripAndVocabHashCheck) {
  ModelParams params = ModelParams::Init(SmallConfig(), 11, 0.05);
  std::string bytes = params.Serialize("abc123");
  EXPECT_EQ(bytes.substr(0, 8), "XLETCKPT");
  ModelParams back = ModelParams::Deserialize(bytes, "abc123");
  EXPECT_EQ(back.values(), params.values());
  EXPECT_EQ(back.config(), params.config());
  EXPECT_EQ(back.Serialize("abc123"), bytes);
  EXPECT_THROW(ModelParams::Deserialize(bytes, "other"), ValidationError);
  EXPECT_NO_THROW(ModelParams::Deserialize(bytes, ""));
  EXPECT_THROW(ModelParams::Deserialize(bytes.substr(0, bytes.size() - 3), ""),
               ParseError);
  std::string wrong_version = bytes;
  wrong_version[8] = 9;
  EXPECT_THROW(ModelParams::Deserialize(wrong_version, ""), ValidationError);
}

TEST(PredictTest, PredictedSetFollowsProbabilities) {
  ModelParams params = ModelParams::Init(SmallConfig(), 2, 0.5);
  Prediction p = Predict(FixtureInput(), params);
  ASSERT_EQ(p.probabilities.size(), 5);
  EXPECT_EQ(p.types, PredictTypes(p.probabilities));
}

}  // namespace
}  // namespace xlet
