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

#ifndef EGOBENCH_CONDITIONS_H_
#define EGOBENCH_CONDITIONS_H_

#include <array>
#include <optional>
#include <vector>

#include "egobench/schema.h"

namespace egobench {

// Distance thresholds on object-scale / frame-scale.
inline constexpr double kNearRatio = 0.30;
inline constexpr double kMediumRatio = 0.20;
inline constexpr double kBrightLux = 250.0;

// object_scale is the longer box side, frame_scale the shorter frame edge.
// ratio > 0.30 is near, 0.20 < ratio <= 0.30 medium, anything else far.
Distance ClassifyDistance(double object_scale, double frame_scale);

// Bright strictly above 250 lux.
Lighting ClassifyLighting(double lux);

struct CaptureConfig {
  int video_slot = 0;  // 1..10
  Distance distance = Distance::kNear;
  Motion motion = Motion::kHorizontal;
  Background background = Background::kSimple;
  Lighting lighting = Lighting::kBright;

  bool Matches(const VideoMeta& v) const;
  bool operator==(const CaptureConfig&) const = default;
};

// The ten configurations every main object is captured under.
const std::array<CaptureConfig, 10>& CanonicalConfigs();

struct CoverageReport {
  Id main_instance_id = 0;
  // slot_videos[i] lists the ids of videos matching slot i + 1.
  std::array<std::vector<Id>, 10> slot_videos;
  // Videos of this instance whose condition tuple is in no canonical slot
  // (or that lack one of the four tags).
  std::vector<Id> unmatched_videos;

  std::vector<int> MissingSlots() const;
  bool Complete() const { return MissingSlots().empty(); }
};

// Throws Error(kInvalidArgument) if no video has this main instance.
CoverageReport CheckVideoCoverage(const Dataset& dataset, Id main_instance_id);

}  // namespace egobench

#endif  // EGOBENCH_CONDITIONS_H_
