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

// Brute-force reference for the AP engine. Written against the metric
// definition only; nothing here is shared with eval.cc.

#include <algorithm>
#include <set>

#include "egobench/eval.h"

namespace egobench {

namespace {

double OracleIou(const Box& a, const Box& b) {
  if (!(a.w > 0.0) || !(a.h > 0.0) || !(b.w > 0.0) || !(b.h > 0.0)) return 0.0;
  const double left = std::max(a.x, b.x);
  const double right = std::min(a.x + a.w, b.x + b.w);
  const double top = std::max(a.y, b.y);
  const double bottom = std::min(a.y + a.h, b.y + b.h);
  if (right <= left || bottom <= top) return 0.0;
  const double inter = (right - left) * (bottom - top);
  return inter / (a.w * a.h + b.w * b.h - inter);
}

}  // namespace

double BruteForceApOracle(std::span<const OracleBox> gts,
                          std::span<const OracleBox> predictions,
                          double iou_thresh) {
  if (gts.empty()) return 0.0;

  // Selection sort into rank order: highest score first, earlier input first.
  std::vector<std::size_t> order;
  std::vector<bool> placed(predictions.size(), false);
  for (std::size_t n = 0; n < predictions.size(); ++n) {
    std::size_t pick = predictions.size();
    for (std::size_t i = 0; i < predictions.size(); ++i) {
      if (placed[i]) continue;
      if (pick == predictions.size() || predictions[i].score > predictions[pick].score) {
        pick = i;
      }
    }
    placed[pick] = true;
    order.push_back(pick);
  }

  // Walking detections in global rank order visits each image's detections
  // in its own rank order, which is all the per-image matching depends on.
  std::vector<bool> used(gts.size(), false);
  std::vector<double> precision;
  std::vector<double> recall;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const OracleBox& p = predictions[order[k]];
    std::size_t best = gts.size();
    double best_iou = -1.0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (used[g] || gts[g].image_id != p.image_id) continue;
      const double iou = OracleIou(p.box, gts[g].box);
      if (iou >= iou_thresh && iou > best_iou) {
        best = g;
        best_iou = iou;
      }
    }
    if (best != gts.size()) {
      used[best] = true;
      ++hits;
    }
    recall.push_back(static_cast<double>(hits) / static_cast<double>(gts.size()));
    precision.push_back(static_cast<double>(hits) / static_cast<double>(k + 1));
  }

  double sum = 0.0;
  for (int r = 0; r <= 100; ++r) {
    const double level = r / 100.0;
    double q = 0.0;
    for (std::size_t k = 0; k < recall.size(); ++k) {
      if (recall[k] >= level) q = std::max(q, precision[k]);
    }
    sum += q;
  }
  return sum / 101;
}

OracleSummary BruteForceFederatedOracle(const Dataset& dataset,
                                        std::span<const Prediction> predictions,
                                        std::span<const double> iou_thresholds) {
  std::vector<Id> categories;
  for (const auto& c : dataset.categories()) categories.push_back(c.id);
  std::sort(categories.begin(), categories.end());

  std::vector<double> ap, ap50, ap75;
  for (Id c : categories) {
    std::set<Id> images;
    std::vector<OracleBox> gts;
    for (const auto& a : dataset.annotations()) {
      if (a.category_id != c) continue;
      images.insert(a.image_id);
      gts.push_back({a.image_id, a.bbox, 0.0});
    }
    if (gts.empty()) continue;
    for (const auto& img : dataset.images()) {
      for (Id n : img.neg_category_ids) {
        if (n == c) images.insert(img.id);
      }
    }
    std::vector<OracleBox> preds;
    for (const auto& p : predictions) {
      if (p.label == c && images.count(p.image_id)) {
        preds.push_back({p.image_id, p.bbox, p.score});
      }
    }
    double sum = 0.0;
    for (double t : iou_thresholds) sum += BruteForceApOracle(gts, preds, t);
    ap.push_back(sum / static_cast<double>(iou_thresholds.size()));
    ap50.push_back(BruteForceApOracle(gts, preds, 0.5));
    ap75.push_back(BruteForceApOracle(gts, preds, 0.75));
  }

  OracleSummary out;
  if (ap.empty()) return out;
  for (std::size_t i = 0; i < ap.size(); ++i) {
    out.ap += ap[i];
    out.ap50 += ap50[i];
    out.ap75 += ap75[i];
  }
  out.ap /= static_cast<double>(ap.size());
  out.ap50 /= static_cast<double>(ap.size());
  out.ap75 /= static_cast<double>(ap.size());
  return out;
}

}  // namespace egobench
