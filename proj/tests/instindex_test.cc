// Copyright 2026 The egobench Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "egobench/instindex.h"

#include <cmath>

#include <gtest/gtest.h>

#include "egobench/error.h"

namespace egobench {
namespace {

using Vec = std::vector<double>;

void Register(EmbeddingIndex& index, Id id, std::vector<Vec> es) {
  index.Register(id, es);
}

TEST(EmbeddingIndexTest, SingleUnitVectorStoredUnchanged) {
  EmbeddingIndex index(3);
  Register(index, 1, {{0.6, 0.0, 0.8}});
  EXPECT_EQ(*index.Find(1), (Vec{0.6, 0.0, 0.8}));
}

TEST(EmbeddingIndexTest, OppositeVectorsAreDegenerate) {
  EmbeddingIndex index(2);
  try {
    Register(index, 1, {{1, 0}, {-1, 0}});
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("DEGENERATE_MEAN"), std::string::npos);
  }
  EXPECT_EQ(index.Find(1), nullptr);
}

TEST(EmbeddingIndexTest, MeanIsRenormalized) {
  EmbeddingIndex index(2);
  Register(index, 1, {{1, 0}, {0, 5}});
  const Vec& v = *index.Find(1);
  EXPECT_NEAR(v[0], std::sqrt(2.0) / 2.0, 1e-15);
  EXPECT_NEAR(v[1], std::sqrt(2.0) / 2.0, 1e-15);
}

TEST(EmbeddingIndexTest, RejectsBadInput) {
  EmbeddingIndex index(2);
  EXPECT_THROW(Register(index, 1, {}), Error);
  EXPECT_THROW(Register(index, 1, {{0, 0}}), Error);
  EXPECT_THROW(Register(index, 1, {{1, 0, 0}}), Error);
  EXPECT_THROW(EmbeddingIndex(0), Error);
  EXPECT_THROW(EmbeddingIndex(2, 1.5), Error);
}

TEST(EmbeddingIndexTest, ExactMatchKeepsRpnScore) {
  EmbeddingIndex index(2, 0.5);
  Register(index, 4, {{1, 0}});
  Register(index, 5, {{0, 1}});
  const auto m = index.Match(Vec{2, 0}, 0.8);
  ASSERT_TRUE(m);
  EXPECT_EQ(m->instance_id, 4);
  EXPECT_DOUBLE_EQ(m->final_score, 0.8);
}

TEST(EmbeddingIndexTest, OrthogonalProposalIsRejected) {
  EmbeddingIndex index(3, 0.5);
  Register(index, 1, {{1, 0, 0}});
  Register(index, 2, {{0, 1, 0}});
  EXPECT_FALSE(index.Match(Vec{0, 0, 1}, 0.9));
}

TEST(EmbeddingIndexTest, ArgmaxThenProduct) {
  EmbeddingIndex index(2, 0.5);
  Register(index, 1, {{0.9, std::sqrt(1 - 0.81)}});
  Register(index, 2, {{0.7, std::sqrt(1 - 0.49)}});
  const auto m = index.Match(Vec{1, 0}, 0.5);
  ASSERT_TRUE(m);
  EXPECT_EQ(m->instance_id, 1);
  EXPECT_NEAR(m->similarity, 0.9, 1e-12);
  EXPECT_NEAR(m->final_score, 0.45, 1e-12);
}

TEST(EmbeddingIndexTest, TiesGoToLowestId) {
  EmbeddingIndex index(2, 0.1);
  Register(index, 9, {{1, 0}});
  Register(index, 3, {{1, 0}});
  EXPECT_EQ(index.Match(Vec{1, 0}, 1.0)->instance_id, 3);
}

TEST(EmbeddingIndexTest, EmptyIndexMatchesNothing) {
  EXPECT_FALSE(EmbeddingIndex(2).Match(Vec{1, 0}, 1.0));
}

TEST(EmbeddingIndexTest, RpnScoreOutOfRangeThrows) {
  EmbeddingIndex index(2);
  Register(index, 1, {{1, 0}});
  EXPECT_THROW(index.Match(Vec{1, 0}, 1.2), Error);
}

TEST(EmbeddingFilesTest, ParseAndMatchProposals) {
  EmbeddingIndex index(2, 0.5);
  ParseEmbeddings(Json::parse(R"([
    {"instance_id": 1, "embedding": [1, 0]},
    {"instance_id": 1, "embedding": [0, 1]},
    {"instance_id": 2, "embedding": [-1, 0]}
  ])"), index);
  EXPECT_EQ(index.size(), 2u);
  EXPECT_NEAR((*index.Find(1))[0], std::sqrt(2.0) / 2.0, 1e-15);

  const auto proposals = ParseProposals(Json::parse(R"([
    {"image_id": 7, "bbox": [0, 0, 4, 4], "score": 0.5, "embedding": [1, 1]},
    {"image_id": 7, "bbox": [1, 1, 4, 4], "score": 0.9, "embedding": [0, -1]},
    {"image_id": 8, "bbox": [2, 2, 4, 4], "score": 1.0, "embedding": [-3, 0]}
  ])"), 2);
  const auto preds = MatchProposals(index, proposals);
  ASSERT_EQ(preds.size(), 2u);
  EXPECT_EQ(preds[0].label, 1);
  EXPECT_NEAR(preds[0].score, 0.5, 1e-15);
  EXPECT_EQ(preds[1].image_id, 8);
  EXPECT_EQ(preds[1].label, 2);
  EXPECT_EQ(preds[1].bbox, (Box{2, 2, 4, 4}));
}

TEST(EmbeddingFilesTest, WrongDimensionIsReported) {
  EXPECT_THROW(ParseProposals(Json::parse(R"([
    {"image_id": 7, "bbox": [0, 0, 4, 4], "score": 0.5, "embedding": [1, 1, 1]}
  ])"), 2), Error);
}

}  // namespace
}  // namespace egobench
