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

#include "egobench/consensus.h"

#include <algorithm>
#include <array>

#include <gtest/gtest.h>

#include "egobench/error.h"
#include "test_util.h"

namespace egobench {
namespace {

using testing::DatasetBuilder;

BoxAnnotation Ann(const Box& b, Id category = 1, Id image = 1) {
  BoxAnnotation a;
  a.image_id = image;
  a.category_id = category;
  a.bbox = b;
  return a;
}

AnnotatorLabels Labels(Id id, std::vector<BoxAnnotation> boxes) {
  return AnnotatorLabels{id, std::move(boxes)};
}

TEST(PairwiseAgreementTest, IdenticalLists) {
  const std::vector<BoxAnnotation> a{Ann({0, 0, 10, 10}), Ann({20, 20, 5, 5})};
  EXPECT_DOUBLE_EQ(PairwiseAgreement(a, a), 1.0);
}

TEST(PairwiseAgreementTest, AgainstEmpty) {
  const std::vector<BoxAnnotation> a{Ann({0, 0, 10, 10})};
  const std::vector<BoxAnnotation> none;
  EXPECT_DOUBLE_EQ(PairwiseAgreement(a, none), 0.0);
  EXPECT_DOUBLE_EQ(PairwiseAgreement(none, none), 1.0);
  EXPECT_DOUBLE_EQ(PairwiseAgreement(none, a), 0.0);
}

TEST(PairwiseAgreementTest, OneOfTwoMatched) {
  const std::vector<BoxAnnotation> a{Ann({0, 0, 10, 10}), Ann({50, 50, 10, 10})};
  const std::vector<BoxAnnotation> b{Ann({0, 0, 10, 10})};
  EXPECT_DOUBLE_EQ(PairwiseAgreement(a, b), 0.5);
  EXPECT_DOUBLE_EQ(PairwiseAgreement(b, a), 1.0);
}

TEST(PairwiseAgreementTest, CategoriesDoNotCrossMatch) {
  const std::vector<BoxAnnotation> a{Ann({0, 0, 10, 10}, 1)};
  const std::vector<BoxAnnotation> b{Ann({0, 0, 10, 10}, 2)};
  EXPECT_DOUBLE_EQ(PairwiseAgreement(a, b), 0.0);
}

TEST(PairwiseAgreementTest, RejectsMixedImages) {
  const std::vector<BoxAnnotation> a{Ann({0, 0, 10, 10}, 1, 1)};
  const std::vector<BoxAnnotation> b{Ann({0, 0, 10, 10}, 1, 2)};
  EXPECT_THROW(PairwiseAgreement(a, b), Error);
}

AnnotatorSet TwoSameOneDisjoint() {
  return {Labels(1, {Ann({0, 0, 10, 10})}), Labels(2, {Ann({0, 0, 10, 10})}),
          Labels(3, {Ann({50, 50, 10, 10})})};
}

TEST(ConsensusScoresTest, TwoIdenticalOneDisjoint) {
  EXPECT_EQ(ConsensusScores(TwoSameOneDisjoint()),
            (std::vector<double>{0.5, 0.5, 0.0}));
  EXPECT_EQ(SelectSourceOfTruth(TwoSameOneDisjoint()), 1);
}

TEST(ConsensusScoresTest, AllIdentical) {
  const AnnotatorSet set{Labels(4, {Ann({0, 0, 10, 10})}),
                         Labels(5, {Ann({0, 0, 10, 10})}),
                         Labels(6, {Ann({0, 0, 10, 10})})};
  EXPECT_EQ(ConsensusScores(set), (std::vector<double>{1.0, 1.0, 1.0}));
  EXPECT_EQ(SelectSourceOfTruth(set), 4);
}

TEST(ConsensusScoresTest, HalfOverlapPair) {
  const AnnotatorSet set{Labels(1, {Ann({0, 0, 10, 10})}),
                         Labels(2, {Ann({5, 0, 10, 10})})};
  const auto s = ConsensusScores(set);
  EXPECT_NEAR(s[0], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(s[1], 1.0 / 3.0, 1e-15);
}

TEST(ConsensusScoresTest, NeedsTwoAnnotators) {
  EXPECT_THROW(ConsensusScores({Labels(1, {})}), Error);
}

TEST(SelectSourceOfTruthTest, MiddleAnnotatorWins) {
  // IoU(1,2) = IoU(2,3) = 2/3, IoU(1,3) = 3/7.
  const AnnotatorSet set{Labels(1, {Ann({0, 0, 10, 10})}),
                         Labels(2, {Ann({2, 0, 10, 10})}),
                         Labels(3, {Ann({4, 0, 10, 10})})};
  const auto s = ConsensusScores(set);
  EXPECT_GT(s[1], s[0]);
  EXPECT_GT(s[1], s[2]);
  EXPECT_EQ(SelectSourceOfTruth(set), 2);
}

TEST(SelectSourceOfTruthTest, OmittedBox) {
  // Annotator 2 omitted the second box. Its agreement with 1 is 1.0 while
  // 1's agreement with 2 is 0.5, so the shorter list wins.
  const AnnotatorSet set{
      Labels(1, {Ann({0, 0, 10, 10}), Ann({40, 40, 10, 10})}),
      Labels(2, {Ann({0, 0, 10, 10})})};
  EXPECT_EQ(ConsensusScores(set), (std::vector<double>{0.5, 1.0}));
  EXPECT_EQ(SelectSourceOfTruth(set), 2);
}

TEST(ConsensusProperty, PermutationEquivariance) {
  const AnnotatorSet base = TwoSameOneDisjoint();
  const auto base_scores = ConsensusScores(base);
  std::array<int, 3> order{0, 1, 2};
  int perms = 0;
  do {
    AnnotatorSet set;
    for (int k : order) set.push_back(base[k]);
    const auto s = ConsensusScores(set);
    for (int k = 0; k < 3; ++k) EXPECT_EQ(s[k], base_scores[order[k]]);
    EXPECT_EQ(SelectSourceOfTruth(set), 1);
    ++perms;
  } while (std::next_permutation(order.begin(), order.end()));
  EXPECT_EQ(perms, 6);
}

Dataset MultiAnnotatorDataset() {
  DatasetBuilder b;
  b.AddCategory(1);
  b.AddVideo(1, 1, 1);
  b.AddImage(1, 1);
  b.AddImage(2, 1);
  b.AddImage(3, 1).extra["annotator_ids"] = Json::array({7, 8});
  for (Id who : {7, 8}) b.AddBox(1, 1, {0, 0, 10, 10}).annotator_id = who;
  b.AddBox(1, 1, {50, 50, 10, 10}).annotator_id = 9;
  b.AddBox(2, 1, {0, 0, 10, 10}).annotator_id = 7;
  b.AddBox(3, 1, {0, 0, 10, 10}).annotator_id = 8;
  return b.Build();
}

TEST(ReconcileDatasetTest, PicksWinnersAndSkipsSingleAnnotatorImages) {
  const ConsensusResult r = ReconcileDataset(MultiAnnotatorDataset());
  ASSERT_EQ(r.images.size(), 2u);
  EXPECT_EQ(r.images[0].image_id, 1);
  EXPECT_EQ(r.images[0].annotator_ids, (std::vector<Id>{7, 8, 9}));
  EXPECT_EQ(r.images[0].scores, (std::vector<double>{0.5, 0.5, 0.0}));
  EXPECT_EQ(r.images[0].source_of_truth, 7);
  // Annotator 7 is listed on image 3 but drew nothing there.
  EXPECT_EQ(r.images[1].image_id, 3);
  EXPECT_EQ(r.images[1].scores, (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(r.skipped_images, std::vector<Id>{2});
}

TEST(ReconcileDatasetTest, ApplyKeepsWinnerBoxes) {
  const Dataset ds = MultiAnnotatorDataset();
  const Dataset out = ApplyConsensus(ds, ReconcileDataset(ds));
  std::size_t on_image1 = 0;
  for (const auto& a : out.annotations()) {
    if (a.image_id == 1) {
      ++on_image1;
      EXPECT_EQ(a.annotator_id, std::optional<Id>(7));
    }
  }
  EXPECT_EQ(on_image1, 1u);
}

TEST(ReconcileDatasetTest, CsvHasOneRowPerAnnotator) {
  const std::string csv = ConsensusToCsv(ReconcileDataset(MultiAnnotatorDataset()));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 3 + 2);
}

}  // namespace
}  // namespace egobench
