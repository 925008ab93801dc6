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

#ifndef EGOBENCH_GEOMETRY_H_
#define EGOBENCH_GEOMETRY_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace egobench {

// Axis-aligned box, top-left origin, (x, y, w, h) in pixels. The covered
// region is the half-open rectangle [x, x + w) x [y, y + h).
struct Box {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double Area() const { return w * h; }
  double Right() const { return x + w; }
  double Bottom() const { return y + h; }
  double CenterX() const { return x + 0.5 * w; }
  double CenterY() const { return y + 0.5 * h; }
  bool IsDegenerate() const { return !(w > 0.0) || !(h > 0.0); }

  bool operator==(const Box&) const = default;
};

// Intersection over union in [0, 1]. Zero-area boxes score 0 against
// everything, including themselves.
double Iou(const Box& a, const Box& b);

// Generalized IoU in [-1, 1]: IoU - (hull - union) / hull.
double Giou(const Box& a, const Box& b);

// Result of matching predictions to ground truth. gt_for_pred[i] is the gt
// index matched by prediction i (or nullopt); pred_for_gt is the inverse.
struct Matching {
  std::vector<std::optional<std::size_t>> gt_for_pred;
  std::vector<std::optional<std::size_t>> pred_for_gt;
};

// Greedy matching used by AP evaluators. `preds` must already be in
// descending score order (ties by ascending prediction index). Each
// prediction takes the still-unmatched gt with the highest IoU >= iou_thresh;
// equal IoUs go to the lower gt index.
Matching GreedyMatch(std::span<const Box> preds, std::span<const Box> gts,
                     double iou_thresh);

}  // namespace egobench

#endif  // EGOBENCH_GEOMETRY_H_
