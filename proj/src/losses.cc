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

#include <algorithm>
#include <cmath>

#include "egobench/error.h"

namespace egobench {

namespace {

constexpr double kProbEpsilon = 1e-12;

double Sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

double ClampProb(double p) {
  return std::clamp(p, kProbEpsilon, 1.0 - kProbEpsilon);
}

double RoleWeight(const LossConfig& cfg, ImageRole role) {
  switch (role) {
    case ImageRole::kPositive:
      return cfg.positive_weight;
    case ImageRole::kIndex:
      return cfg.index_weight;
    case ImageRole::kNegative:
      return cfg.negative_weight;
  }
  return 0.0;
}

void CheckInputs(const LossInput& pred, const std::optional<Box>& gt,
                 const LossConfig& cfg, ImageRole role) {
  cfg.Validate();
  if (role == ImageRole::kNegative && gt) {
    throw Error(ErrorCode::kInvalidArgument,
                "negative images carry no ground-truth box");
  }
  if (role != ImageRole::kNegative && !gt) {
    throw Error(ErrorCode::kInvalidArgument,
                "positive and index images need a ground-truth box");
  }
  if (gt && gt->IsDegenerate()) {
    throw Error(ErrorCode::kInvalidArgument, "ground-truth box is degenerate");
  }
  if (!(pred.size_y >= 0.0) || !(pred.size_x >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "predicted sizes must be >= 0");
  }
  if (!(pred.confidence >= 0.0 && pred.confidence <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "confidence must be in [0, 1]");
  }
}

double Bce(double p, AssignedLabel label) {
  switch (label) {
    case AssignedLabel::kPositive:
      return -std::log(ClampProb(p));
    case AssignedLabel::kNegative:
      return -std::log(1.0 - ClampProb(p));
    case AssignedLabel::kIgnored:
      return 0.0;
  }
  return 0.0;
}

double BceGrad(double p, AssignedLabel label) {
  switch (label) {
    case AssignedLabel::kPositive:
      return -1.0 / ClampProb(p);
    case AssignedLabel::kNegative:
      return 1.0 / (1.0 - ClampProb(p));
    case AssignedLabel::kIgnored:
      return 0.0;
  }
  return 0.0;
}

struct CornerGrad {
  double x1 = 0.0;
  double x2 = 0.0;
  double y1 = 0.0;
  double y2 = 0.0;
};

// d GIoU / d (pred corners).
CornerGrad GiouCornerGrad(const Box& p, const Box& g) {
  const double px1 = p.x, px2 = p.Right(), py1 = p.y, py2 = p.Bottom();
  const double gx1 = g.x, gx2 = g.Right(), gy1 = g.y, gy2 = g.Bottom();

  const double iw = std::min(px2, gx2) - std::max(px1, gx1);
  const double ih = std::min(py2, gy2) - std::max(py1, gy1);
  const bool overlap = iw > 0.0 && ih > 0.0;
  const double inter = overlap ? iw * ih : 0.0;
  const double uni = p.Area() + g.Area() - inter;
  const double hw = std::max(px2, gx2) - std::min(px1, gx1);
  const double hh = std::max(py2, gy2) - std::min(py1, gy1);
  const double hull = hw * hh;

  const double dg_di = 1.0 / uni;
  const double dg_du = -inter / (uni * uni) + 1.0 / hull;
  const double dg_dc = -uni / (hull * hull);

  auto combine = [&](double d_inter, double d_area, double d_hull) {
    return d_inter * dg_di + (d_area - d_inter) * dg_du + d_hull * dg_dc;
  };

  CornerGrad cg;
  cg.x1 = combine(overlap && px1 > gx1 ? -ih : 0.0, -(py2 - py1),
                  px1 < gx1 ? -hh : 0.0);
  cg.x2 = combine(overlap && px2 < gx2 ? ih : 0.0, (py2 - py1),
                  px2 > gx2 ? hh : 0.0);
  cg.y1 = combine(overlap && py1 > gy1 ? -iw : 0.0, -(px2 - px1),
                  py1 < gy1 ? -hw : 0.0);
  cg.y2 = combine(overlap && py2 < gy2 ? iw : 0.0, (px2 - px1),
                  py2 > gy2 ? hw : 0.0);
  return cg;
}

}  // namespace

void LossConfig::Validate() const {
  if (!(iou_neg >= 0.0 && iou_neg < iou_pos && iou_pos <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "loss thresholds must satisfy 0 <= iou_neg < iou_pos <= 1");
  }
  for (double w : {positive_weight, index_weight, negative_weight, l1_weight,
                   giou_weight}) {
    if (!(w >= 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "loss weights must be >= 0");
    }
  }
}

AssignedLabel AssignLabel(double iou, const LossConfig& cfg) {
  if (iou > cfg.iou_pos) return AssignedLabel::kPositive;
  if (iou <= cfg.iou_neg) return AssignedLabel::kNegative;
  return AssignedLabel::kIgnored;
}

Box LossInput::AsBox() const {
  return Box{center_x - 0.5 * size_x, center_y - 0.5 * size_y, size_x, size_y};
}

LossResult DetectionLoss(const LossInput& pred, const std::optional<Box>& gt,
                         const LossConfig& cfg, ImageRole role) {
  CheckInputs(pred, gt, cfg, role);
  LossResult r;
  if (role == ImageRole::kNegative) {
    r.label = AssignedLabel::kNegative;
    r.classification = Bce(pred.confidence, r.label);
  } else {
    const Box pb = pred.AsBox();
    const double l1 = std::abs(pred.center_y - gt->CenterY()) +
                      std::abs(pred.center_x - gt->CenterX()) +
                      std::abs(pred.size_y - gt->h) +
                      std::abs(pred.size_x - gt->w);
    r.localization = cfg.l1_weight * l1 + cfg.giou_weight * (1.0 - Giou(pb, *gt));
    r.iou = Iou(pb, *gt);
    r.label = AssignLabel(r.iou, cfg);
    r.classification = Bce(pred.confidence, r.label);
  }
  r.total = RoleWeight(cfg, role) * (r.localization + r.classification);
  return r;
}

LossGrad DetectionLossBackward(const LossInput& pred,
                               const std::optional<Box>& gt,
                               const LossConfig& cfg, ImageRole role) {
  CheckInputs(pred, gt, cfg, role);
  const double w = RoleWeight(cfg, role);
  LossGrad g;
  if (role == ImageRole::kNegative) {
    g.d_confidence = w * BceGrad(pred.confidence, AssignedLabel::kNegative);
    return g;
  }
  const Box pb = pred.AsBox();
  const CornerGrad cg = GiouCornerGrad(pb, *gt);
  // Corners: x1 = cx - sx/2, x2 = cx + sx/2.
  const double dgiou_dcx = cg.x1 + cg.x2;
  const double dgiou_dcy = cg.y1 + cg.y2;
  const double dgiou_dsx = 0.5 * (cg.x2 - cg.x1);
  const double dgiou_dsy = 0.5 * (cg.y2 - cg.y1);

  g.d_center_y = w * (cfg.l1_weight * Sign(pred.center_y - gt->CenterY()) -
                      cfg.giou_weight * dgiou_dcy);
  g.d_center_x = w * (cfg.l1_weight * Sign(pred.center_x - gt->CenterX()) -
                      cfg.giou_weight * dgiou_dcx);
  g.d_size_y = w * (cfg.l1_weight * Sign(pred.size_y - gt->h) -
                    cfg.giou_weight * dgiou_dsy);
  g.d_size_x = w * (cfg.l1_weight * Sign(pred.size_x - gt->w) -
                    cfg.giou_weight * dgiou_dsx);
  g.d_confidence =
      w * BceGrad(pred.confidence, AssignLabel(Iou(pb, *gt), cfg));
  return g;
}

}  // namespace egobench
