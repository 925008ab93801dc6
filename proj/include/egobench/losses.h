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

#ifndef EGOBENCH_LOSSES_H_
#define EGOBENCH_LOSSES_H_

#include <optional>

#include "egobench/geometry.h"

namespace egobench {

struct LossConfig {
  double iou_pos = 0.7;
  double iou_neg = 0.3;
  double positive_weight = 1.0;
  double index_weight = 1.0;
  double negative_weight = 1.0;
  double l1_weight = 1.0;
  double giou_weight = 1.0;

  // Throws Error(kInvalidArgument) unless 0 <= iou_neg < iou_pos <= 1 and
  // every weight is non-negative.
  void Validate() const;
};

// Positive: the other view of the target. Index: the reference image itself.
// Negative: an image without the target.
enum class ImageRole { kPositive, kIndex, kNegative };

enum class AssignedLabel { kPositive, kNegative, kIgnored };

// Positive above iou_pos, negative at or below iou_neg, ignored in between.
AssignedLabel AssignLabel(double iou, const LossConfig& cfg);

// Predicted box in center form plus its confidence in (0, 1).
struct LossInput {
  double center_y = 0.0;
  double center_x = 0.0;
  double size_y = 0.0;
  double size_x = 0.0;
  double confidence = 0.5;

  Box AsBox() const;
};

struct LossResult {
  double total = 0.0;           // role weight * (localization + classification)
  double localization = 0.0;    // l1_weight * L1 + giou_weight * (1 - GIoU)
  double classification = 0.0;  // binary cross entropy, 0 when ignored
  AssignedLabel label = AssignedLabel::kIgnored;
  double iou = 0.0;
};

// `gt` must be present for positive and index roles and absent for the
// negative role; anything else throws Error(kInvalidArgument).
LossResult DetectionLoss(const LossInput& pred, const std::optional<Box>& gt,
                         const LossConfig& cfg, ImageRole role);

struct LossGrad {
  double d_center_y = 0.0;
  double d_center_x = 0.0;
  double d_size_y = 0.0;
  double d_size_x = 0.0;
  double d_confidence = 0.0;
};

// Gradient of LossResult::total. The assigned label is held fixed.
LossGrad DetectionLossBackward(const LossInput& pred,
                               const std::optional<Box>& gt,
                               const LossConfig& cfg, ImageRole role);

}  // namespace egobench

#endif  // EGOBENCH_LOSSES_H_
