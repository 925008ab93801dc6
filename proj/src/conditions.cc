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

#include <cmath>
#include <string>

#include "egobench/error.h"

namespace egobench {

Distance ClassifyDistance(double object_scale, double frame_scale) {
  if (!(object_scale > 0.0) || !(frame_scale > 0.0) ||
      !std::isfinite(object_scale) || !std::isfinite(frame_scale)) {
    throw Error(ErrorCode::kInvalidArgument,
                "object and frame scale must be positive");
  }
  const double ratio = object_scale / frame_scale;
  if (ratio > kNearRatio) return Distance::kNear;
  if (ratio > kMediumRatio) return Distance::kMedium;
  return Distance::kFar;
}

Lighting ClassifyLighting(double lux) {
  if (!(lux >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "lux must be non-negative");
  }
  return lux > kBrightLux ? Lighting::kBright : Lighting::kDim;
}

bool CaptureConfig::Matches(const VideoMeta& v) const {
  return v.distance == distance && v.motion == motion &&
         v.background == background && v.lighting == lighting;
}

const std::array<CaptureConfig, 10>& CanonicalConfigs() {
  using D = Distance;
  using M = Motion;
  using B = Background;
  using L = Lighting;
  static const std::array<CaptureConfig, 10> kConfigs{{
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
  return kConfigs;
}

std::vector<int> CoverageReport::MissingSlots() const {
  std::vector<int> missing;
  for (int i = 0; i < 10; ++i) {
    if (slot_videos[i].empty()) missing.push_back(i + 1);
  }
  return missing;
}

CoverageReport CheckVideoCoverage(const Dataset& dataset, Id main_instance_id) {
  CoverageReport report;
  report.main_instance_id = main_instance_id;
  bool found = false;
  for (const auto& v : dataset.videos()) {
    if (v.main_instance_id != main_instance_id) continue;
    found = true;
    bool matched = false;
    for (const auto& cfg : CanonicalConfigs()) {
      if (cfg.Matches(v)) {
        report.slot_videos[cfg.video_slot - 1].push_back(v.id);
        matched = true;
      }
    }
    if (!matched) report.unmatched_videos.push_back(v.id);
  }
  if (!found) {
    throw Error(ErrorCode::kInvalidArgument,
                "no video has main instance " +
                    std::to_string(main_instance_id));
  }
  return report;
}

}  // namespace egobench
