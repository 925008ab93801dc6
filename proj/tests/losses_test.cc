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

#include "egobench/losses.h"

#include <cmath>

#include <gtest/gtest.h>

#include "egobench/error.h"

namespace egobench {
namespace {

// Prediction whose box has the given IoU with gt {0, 0, 10, 10}: same
// height, width 10 * iou.
LossInput WithIou(double iou, double confidence = 0.6) {
  LossInput in;
  in.size_y = 10.0;
  in.size_x = 10.0 * iou;
  in.center_y = 5.0;
  in.center_x = 0.5 * in.size_x;
  in.confidence = confidence;
  return in;
}

const Box kGt{0, 0, 10, 10};

TEST(AssignLabelTest, Thresholds) {
  const LossConfig cfg;
  EXPECT_EQ(AssignLabel(0.75, cfg), AssignedLabel::kPositive);
  EXPECT_EQ(AssignLabel(0.25, cfg), AssignedLabel::kNegative);
  EXPECT_EQ(AssignLabel(0.5, cfg), AssignedLabel::kIgnored);
  EXPECT_EQ(AssignLabel(0.7, cfg), AssignedLabel::kIgnored);
  EXPECT_EQ(AssignLabel(0.3, cfg), AssignedLabel::kNegative);
}

TEST(DetectionLossTest, PerfectBoxHighConfidence) {
  LossInput in{5.0, 5.0, 10.0, 10.0, 1.0 - 1e-12};
  const LossResult r = DetectionLoss(in, kGt, LossConfig{}, ImageRole::kPositive);
  EXPECT_EQ(r.label, AssignedLabel::kPositive);
  EXPECT_NEAR(r.localization, 0.0, 1e-15);
  EXPECT_LT(r.classification, 1e-11);
}

TEST(DetectionLossTest, NegativeImageHalfConfidence) {
  LossConfig cfg;
  cfg.negative_weight = 0.7;
  LossInput in;
  in.size_x = in.size_y = 3.0;
  in.confidence = 0.5;
  const LossResult r = DetectionLoss(in, std::nullopt, cfg, ImageRole::kNegative);
  EXPECT_EQ(r.label, AssignedLabel::kNegative);
  EXPECT_EQ(r.localization, 0.0);
  EXPECT_NEAR(r.total, 0.7 * std::log(2.0), 1e-15);
}

TEST(DetectionLossTest, LabelsFollowIou) {
  const LossConfig cfg;
  const LossResult pos = DetectionLoss(WithIou(0.75), kGt, cfg, ImageRole::kPositive);
  EXPECT_NEAR(pos.iou, 0.75, 1e-12);
  EXPECT_EQ(pos.label, AssignedLabel::kPositive);
  EXPECT_NEAR(pos.classification, -std::log(0.6), 1e-12);

  const LossResult neg = DetectionLoss(WithIou(0.25), kGt, cfg, ImageRole::kIndex);
  EXPECT_EQ(neg.label, AssignedLabel::kNegative);
  EXPECT_NEAR(neg.classification, -std::log(0.4), 1e-12);

  const LossResult mid = DetectionLoss(WithIou(0.5), kGt, cfg, ImageRole::kPositive);
  EXPECT_EQ(mid.label, AssignedLabel::kIgnored);
  EXPECT_EQ(mid.classification, 0.0);
  EXPECT_EQ(mid.total, mid.localization);
  EXPECT_GT(mid.localization, 0.0);
}

TEST(DetectionLossTest, RoleWeights) {
  LossConfig cfg;
  cfg.positive_weight = 2.0;
  cfg.index_weight = 3.0;
  const LossInput in = WithIou(0.5);
  const double pos = DetectionLoss(in, kGt, cfg, ImageRole::kPositive).total;
  const double idx = DetectionLoss(in, kGt, cfg, ImageRole::kIndex).total;
  EXPECT_NEAR(idx / pos, 1.5, 1e-12);
}

TEST(DetectionLossTest, ContractViolationsThrow) {
  const LossConfig cfg;
  EXPECT_THROW(DetectionLoss(WithIou(0.5), std::nullopt, cfg, ImageRole::kPositive),
               Error);
  EXPECT_THROW(DetectionLoss(WithIou(0.5), kGt, cfg, ImageRole::kNegative), Error);
  EXPECT_THROW(DetectionLoss(WithIou(0.5, 1.5), kGt, cfg, ImageRole::kPositive),
               Error);
  LossConfig bad;
  bad.iou_neg = 0.8;
  EXPECT_THROW(bad.Validate(), Error);
}

TEST(DetectionLossTest, BackwardOnIgnoredHasNoConfidenceGradient) {
  const LossGrad g =
      DetectionLossBackward(WithIou(0.5), kGt, LossConfig{}, ImageRole::kPositive);
  EXPECT_EQ(g.d_confidence, 0.0);
  EXPECT_NE(g.d_size_x, 0.0);
}

}  // namespace
}  // namespace egobench
