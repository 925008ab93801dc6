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

#include "egobench/conditions.h"

#include <gtest/gtest.h>

#include "egobench/error.h"
#include "test_util.h"

namespace egobench {
namespace {

using testing::DatasetBuilder;

TEST(ClassifyDistanceTest, Thresholds) {
  EXPECT_EQ(ClassifyDistance(350, 1000), Distance::kNear);
  EXPECT_EQ(ClassifyDistance(250, 1000), Distance::kMedium);
  EXPECT_EQ(ClassifyDistance(100, 1000), Distance::kFar);
}

TEST(ClassifyDistanceTest, Boundaries) {
  EXPECT_EQ(ClassifyDistance(300, 1000), Distance::kMedium);
  EXPECT_EQ(ClassifyDistance(200, 1000), Distance::kFar);
  EXPECT_EQ(ClassifyDistance(200.001, 1000), Distance::kMedium);
  EXPECT_EQ(ClassifyDistance(199.999, 1000), Distance::kFar);
  EXPECT_EQ(ClassifyDistance(300.001, 1000), Distance::kNear);
}

TEST(ClassifyDistanceTest, RejectsBadFrame) {
  EXPECT_THROW(ClassifyDistance(10, 0), Error);
}

TEST(ClassifyLightingTest, Thresholds) {
  EXPECT_EQ(ClassifyLighting(500), Lighting::kBright);
  EXPECT_EQ(ClassifyLighting(250), Lighting::kDim);
  EXPECT_EQ(ClassifyLighting(250.001), Lighting::kBright);
  EXPECT_EQ(ClassifyLighting(0), Lighting::kDim);
}

TEST(CanonicalConfigsTest, AllRows) {
  using D = Distance;
  using M = Motion;
  using B = Background;
  using L = Lighting;
  const std::array<CaptureConfig, 10> expected{{
      {1, D::kNear, M::kHorizontal, B::kSimple, L::kBright},
      {2, D::kMedium, M::kHorizontal, B::kSimple, L::kBright},
      {3, D::kNear, M::kHorizontal, B::kSimple, L::kDim},
      {4, D::kMedium, M::kHorizontal, B::kBusy, L::kBright},
      {5, D::kFar, M::kHorizontal, B::kBusy, L::kBright},
      {6, D::kMedium, M::kVertical, B::kBusy, L::kBright},
      {7, D::kMedium, M::kCombined, B::kBusy, L::kBright},
      {8, D::kNear, M::kHorizontal, B::kBusy, L::kDim},
      {9, D::kMedium, M::kHorizontal, B::kBusy, L::kDim},
      {10, D::kFar, M::kHorizontal, B::kBusy, L::kDim},
  }};
  EXPECT_EQ(CanonicalConfigs(), expected);
}

TEST(CanonicalConfigsTest, TuplesAreDistinct) {
  const auto& cfgs = CanonicalConfigs();
  for (std::size_t i = 0; i < cfgs.size(); ++i) {
    for (std::size_t j = i + 1; j < cfgs.size(); ++j) {
      EXPECT_FALSE(cfgs[i].distance == cfgs[j].distance &&
                   cfgs[i].motion == cfgs[j].motion &&
                   cfgs[i].background == cfgs[j].background &&
                   cfgs[i].lighting == cfgs[j].lighting);
    }
  }
}

DatasetBuilder CoverageFixture(bool skip_slot6) {
  DatasetBuilder b;
  b.AddCategory(1);
  for (const auto& cfg : CanonicalConfigs()) {
    if (skip_slot6 && cfg.video_slot == 6) continue;
    auto& v = b.AddVideo(cfg.video_slot, 42, 1);
    v.distance = cfg.distance;
    v.motion = cfg.motion;
    v.background = cfg.background;
    v.lighting = cfg.lighting;
  }
  return b;
}

TEST(CoverageTest, AllSlotsMatched) {
  const CoverageReport r = CheckVideoCoverage(CoverageFixture(false).Build(), 42);
  EXPECT_TRUE(r.Complete());
  for (int s = 0; s < 10; ++s) {
    EXPECT_EQ(r.slot_videos[s], std::vector<Id>{s + 1});
  }
  EXPECT_TRUE(r.unmatched_videos.empty());
}

TEST(CoverageTest, MissingSlotReported) {
  const CoverageReport r = CheckVideoCoverage(CoverageFixture(true).Build(), 42);
  EXPECT_EQ(r.MissingSlots(), std::vector<int>{6});
}

TEST(CoverageTest, OffTableTupleMatchesNoSlot) {
  DatasetBuilder b;
  b.AddCategory(1);
  auto& v = b.AddVideo(1, 42, 1);
  v.distance = Distance::kNear;
  v.motion = Motion::kVertical;
  v.background = Background::kSimple;
  v.lighting = Lighting::kBright;
  const CoverageReport r = CheckVideoCoverage(b.Build(), 42);
  EXPECT_EQ(r.unmatched_videos, std::vector<Id>{1});
  EXPECT_EQ(r.MissingSlots().size(), 10u);
}

TEST(CoverageTest, UnknownInstanceThrows) {
  EXPECT_THROW(CheckVideoCoverage(CoverageFixture(false).Build(), 7), Error);
}

}  // namespace
}  // namespace egobench
