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

#include "egobench/geometry.h"

#include <algorithm>

namespace egobench {

namespace {

double IntersectionArea(const Box& a, const Box& b) {
  const double iw = std::min(a.Right(), b.Right()) - std::max(a.x, b.x);
  const double ih = std::min(a.Bottom(), b.Bottom()) - std::max(a.y, b.y);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  return iw * ih;
}

}  // namespace

double Iou(const Box& a, const Box& b) {
  if (a.IsDegenerate() || b.IsDegenerate()) return 0.0;
  const double inter = IntersectionArea(a, b);
  const double uni = a.Area() + b.Area() - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

double Giou(const Box& a, const Box& b) {
  const double inter =
      (a.IsDegenerate() || b.IsDegenerate()) ? 0.0 : IntersectionArea(a, b);
  const double uni = a.Area() + b.Area() - inter;
  const double hull = (std::max(a.Right(), b.Right()) - std::min(a.x, b.x)) *
                      (std::max(a.Bottom(), b.Bottom()) - std::min(a.y, b.y));
  if (hull <= 0.0) return 0.0;
  const double iou = uni > 0.0 ? inter / uni : 0.0;
  return iou - (hull - uni) / hull;
}

Matching GreedyMatch(std::span<const Box> preds, std::span<const Box> gts,
                     double iou_thresh) {
  Matching m;
  m.gt_for_pred.assign(preds.size(), std::nullopt);
  m.pred_for_gt.assign(gts.size(), std::nullopt);
  for (std::size_t p = 0; p < preds.size(); ++p) {
    std::optional<std::size_t> best;
    double best_iou = iou_thresh;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (m.pred_for_gt[g]) continue;
      const double iou = Iou(preds[p], gts[g]);
      if (iou < iou_thresh) continue;
      // Strictly greater keeps the lowest index among equal IoUs.
      if (!best || iou > best_iou) {
        best = g;
        best_iou = iou;
      }
    }
    if (best) {
      m.gt_for_pred[p] = best;
      m.pred_for_gt[*best] = p;
    }
  }
  return m;
}

}  // namespace egobench
