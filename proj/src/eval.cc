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

#include "egobench/eval.h"

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "egobench/error.h"
#include "egobench/geometry.h"
#include "egobench/parallel.h"
#include "egobench/stats.h"
#include "text_util.h"

namespace egobench {

namespace {

constexpr int kRecallPoints = 101;

// Ground truth and detections of one label on one image.
struct Slice {
  const ImageRecord* image = nullptr;
  std::vector<std::size_t> gts;    // indices into dataset.annotations()
  std::vector<std::size_t> preds;  // indices into predictions, ranked
};

struct Unit {
  Id label = 0;
  std::size_t num_gt = 0;
  std::vector<Slice> slices;
};

enum class DetFlag : unsigned char { kFalsePositive, kTruePositive, kIgnored };

// Descending score, ascending input index.
struct RankOrder {
  std::span<const Prediction> preds;
  bool operator()(std::size_t a, std::size_t b) const {
    if (preds[a].score != preds[b].score) return preds[a].score > preds[b].score;
    return a < b;
  }
};

std::optional<Id> LabelOf(const BoxAnnotation& a, LabelMode mode) {
  if (mode == LabelMode::kCategory) return a.category_id;
  return a.instance_id;
}

using ImageFilter = std::function<bool(const ImageRecord&)>;

// Everything the engine needs, grouped by label then image.
class Problem {
 public:
  Problem(const Dataset& ds, std::span<const Prediction> preds, LabelMode mode,
          const EvalConfig& cfg, const std::set<Id>* registry,
          const std::vector<Id>* eval_images)
      : ds_(ds), preds_(preds), mode_(mode), registry_(registry) {
    if (cfg.image_subset) {
      subset_.emplace(cfg.image_subset->begin(), cfg.image_subset->end());
    }
    if (eval_images) {
      std::set<Id> s(eval_images->begin(), eval_images->end());
      if (subset_) {
        std::set<Id> both;
        for (Id id : s) {
          if (subset_->count(id)) both.insert(id);
        }
        s = std::move(both);
      }
      subset_ = std::move(s);
    }

    for (std::size_t ai = 0; ai < ds.annotations().size(); ++ai) {
      const BoxAnnotation& a = ds.annotations()[ai];
      const auto label = LabelOf(a, mode);
      if (!label) continue;
      if (registry_ && !registry_->count(*label)) continue;
      gts_[*label][a.image_id].push_back(ai);
    }
    if (mode == LabelMode::kCategory) {
      for (const auto& img : ds.images()) {
        for (Id c : img.neg_category_ids) negatives_[c].insert(img.id);
      }
    }

    for (std::size_t i = 0; i < preds.size(); ++i) {
      if (registry_ && !registry_->count(preds[i].label)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "prediction label " + std::to_string(preds[i].label) +
                        " is not in the target registry");
      }
      preds_by_label_[preds[i].label][preds[i].image_id].push_back(i);
    }
    RankOrder order{preds};
    for (auto& [label, by_image] : preds_by_label_) {
      for (auto& [image, idx] : by_image) {
        std::sort(idx.begin(), idx.end(), order);
        if (cfg.max_dets && idx.size() > static_cast<std::size_t>(*cfg.max_dets)) {
          idx.resize(*cfg.max_dets);
        }
      }
    }
  }

  // Units with at least one ground truth on an admitted image, ascending by
  // label. For registry-driven problems every registry label is considered.
  std::vector<Unit> Units(const ImageFilter& filter) const {
    std::vector<Unit> out;
    auto admit = [&](Id image_id) {
      if (subset_ && !subset_->count(image_id)) return false;
      return !filter || filter(*ds_.FindImage(image_id));
    };
    for (const auto& [label, gt_by_image] : gts_) {
      Unit u;
      u.label = label;
      std::set<Id> images;
      for (const auto& [image_id, idx] : gt_by_image) {
        if (admit(image_id)) images.insert(image_id);
      }
      if (images.empty()) continue;
      const auto pit = preds_by_label_.find(label);
      if (mode_ == LabelMode::kCategory) {
        if (auto nit = negatives_.find(label); nit != negatives_.end()) {
          for (Id image_id : nit->second) {
            if (admit(image_id)) images.insert(image_id);
          }
        }
      } else if (pit != preds_by_label_.end()) {
        for (const auto& [image_id, idx] : pit->second) {
          if (admit(image_id)) images.insert(image_id);
        }
      }
      for (Id image_id : images) {
        Slice s;
        s.image = ds_.FindImage(image_id);
        if (auto git = gt_by_image.find(image_id); git != gt_by_image.end()) {
          s.gts = git->second;
        }
        if (pit != preds_by_label_.end()) {
          if (auto it = pit->second.find(image_id); it != pit->second.end()) {
            s.preds = it->second;
          }
        }
        u.num_gt += s.gts.size();
        u.slices.push_back(std::move(s));
      }
      out.push_back(std::move(u));
    }
    return out;
  }

  const Dataset& dataset() const { return ds_; }
  std::span<const Prediction> preds() const { return preds_; }

 private:
  const Dataset& ds_;
  std::span<const Prediction> preds_;
  LabelMode mode_;
  const std::set<Id>* registry_;
  std::optional<std::set<Id>> subset_;
  std::map<Id, std::map<Id, std::vector<std::size_t>>> gts_;
  std::map<Id, std::set<Id>> negatives_;
  std::map<Id, std::map<Id, std::vector<std::size_t>>> preds_by_label_;
};

// IoU matrices per slice, computed once and reused across thresholds.
struct UnitGeometry {
  std::vector<std::vector<double>> iou;  // per slice, preds x gts row-major
};

UnitGeometry ComputeGeometry(const Unit& u, const Problem& p) {
  UnitGeometry g;
  g.iou.reserve(u.slices.size());
  for (const Slice& s : u.slices) {
    std::vector<double> m(s.preds.size() * s.gts.size());
    for (std::size_t i = 0; i < s.preds.size(); ++i) {
      for (std::size_t j = 0; j < s.gts.size(); ++j) {
        m[i * s.gts.size() + j] = Iou(p.preds()[s.preds[i]].bbox,
                                      p.dataset().annotations()[s.gts[j]].bbox);
      }
    }
    g.iou.push_back(std::move(m));
  }
  return g;
}

// gt index (within the slice) matched by each ranked prediction, or -1.
// Same rule as GreedyMatch, over a precomputed IoU matrix.
std::vector<int> MatchSlice(const std::vector<double>& iou, std::size_t num_preds,
                            std::size_t num_gts, double thresh) {
  std::vector<int> gt_for_pred(num_preds, -1);
  std::vector<bool> taken(num_gts, false);
  for (std::size_t i = 0; i < num_preds; ++i) {
    int best = -1;
    double best_iou = 0.0;
    for (std::size_t j = 0; j < num_gts; ++j) {
      if (taken[j]) continue;
      const double v = iou[i * num_gts + j];
      if (v < thresh) continue;
      if (best < 0 || v > best_iou) {
        best = static_cast<int>(j);
        best_iou = v;
      }
    }
    if (best >= 0) {
      gt_for_pred[i] = best;
      taken[best] = true;
    }
  }
  return gt_for_pred;
}

// Detection of a unit in global rank order.
struct RankedDet {
  std::size_t slice = 0;
  std::size_t rank = 0;  // position within slice.preds
};

std::vector<RankedDet> GlobalRanking(const Unit& u, std::span<const Prediction> preds) {
  std::vector<RankedDet> dets;
  for (std::size_t s = 0; s < u.slices.size(); ++s) {
    for (std::size_t r = 0; r < u.slices[s].preds.size(); ++r) dets.push_back({s, r});
  }
  RankOrder order{preds};
  std::sort(dets.begin(), dets.end(), [&](const RankedDet& a, const RankedDet& b) {
    return order(u.slices[a.slice].preds[a.rank], u.slices[b.slice].preds[b.rank]);
  });
  return dets;
}

// 101-point interpolated AP over flags in rank order; ignored detections are
// skipped.
double InterpolatedAp(const std::vector<DetFlag>& flags, std::size_t num_gt) {
  if (num_gt == 0) return 0.0;
  std::vector<double> precision;
  std::vector<double> recall;
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (DetFlag f : flags) {
    if (f == DetFlag::kIgnored) continue;
    if (f == DetFlag::kTruePositive) {
      ++tp;
    } else {
      ++fp;
    }
    recall.push_back(static_cast<double>(tp) / static_cast<double>(num_gt));
    precision.push_back(static_cast<double>(tp) / static_cast<double>(tp + fp));
  }
  for (std::size_t k = precision.size(); k > 1; --k) {
    precision[k - 2] = std::max(precision[k - 2], precision[k - 1]);
  }
  double sum = 0.0;
  std::size_t k = 0;
  for (int r = 0; r < kRecallPoints; ++r) {
    const double level = r / 100.0;
    while (k < recall.size() && recall[k] < level) ++k;
    sum += k < recall.size() ? precision[k] : 0.0;
  }
  return sum / kRecallPoints;
}

std::vector<DetFlag> FlagsAt(const Unit& u, const UnitGeometry& g,
                             const std::vector<RankedDet>& ranking, double thresh) {
  std::vector<std::vector<int>> matches(u.slices.size());
  for (std::size_t s = 0; s < u.slices.size(); ++s) {
    matches[s] = MatchSlice(g.iou[s], u.slices[s].preds.size(),
                            u.slices[s].gts.size(), thresh);
  }
  std::vector<DetFlag> flags;
  flags.reserve(ranking.size());
  for (const RankedDet& d : ranking) {
    flags.push_back(matches[d.slice][d.rank] >= 0 ? DetFlag::kTruePositive
                                                  : DetFlag::kFalsePositive);
  }
  return flags;
}

// AP at each threshold for one unit.
std::vector<double> UnitAps(const Unit& u, const Problem& p,
                            std::span<const double> thresholds) {
  const UnitGeometry g = ComputeGeometry(u, p);
  const std::vector<RankedDet> ranking = GlobalRanking(u, p.preds());
  std::vector<double> out;
  out.reserve(thresholds.size());
  for (double t : thresholds) {
    out.push_back(InterpolatedAp(FlagsAt(u, g, ranking, t), u.num_gt));
  }
  return out;
}

double Mean(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

std::optional<double> MeanOrAbsent(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  return Mean(v);
}

// Thresholds evaluated per unit: the configured list, then 0.5 and 0.75 when
// missing from it.
struct ThresholdPlan {
  std::vector<double> all;
  std::size_t num_configured = 0;
  std::size_t at50 = 0;
  std::size_t at75 = 0;
};

ThresholdPlan PlanThresholds(const std::vector<double>& configured) {
  ThresholdPlan plan;
  plan.all = configured;
  plan.num_configured = configured.size();
  auto locate = [&plan](double t) {
    auto it = std::find(plan.all.begin(), plan.all.end(), t);
    if (it != plan.all.end()) return static_cast<std::size_t>(it - plan.all.begin());
    plan.all.push_back(t);
    return plan.all.size() - 1;
  };
  plan.at50 = locate(0.5);
  plan.at75 = locate(0.75);
  return plan;
}

std::vector<LabelAp> EvaluateUnits(const std::vector<Unit>& units,
                                   const Problem& p, const EvalConfig& cfg) {
  const ThresholdPlan plan = PlanThresholds(cfg.iou_thresholds);
  std::vector<LabelAp> out(units.size());
  ParallelFor(units.size(), cfg.threads, [&](std::size_t i) {
    const std::vector<double> aps = UnitAps(units[i], p, plan.all);
    LabelAp& r = out[i];
    r.label = units[i].label;
    r.num_gt = units[i].num_gt;
    r.ap = Mean(std::span<const double>(aps).first(plan.num_configured));
    r.ap50 = aps[plan.at50];
    r.ap75 = aps[plan.at75];
  });
  return out;
}

// Mean AP50 over the units admitted by `filter`; absent without ground truth.
std::optional<double> FilteredAp50(const Problem& p, const EvalConfig& cfg,
                                   const ImageFilter& filter) {
  const std::vector<Unit> units = p.Units(filter);
  if (units.empty()) return std::nullopt;
  std::vector<double> ap50(units.size());
  const double half[] = {0.5};
  ParallelFor(units.size(), cfg.threads, [&](std::size_t i) {
    ap50[i] = UnitAps(units[i], p, half)[0];
  });
  return Mean(ap50);
}

enum class SizeBucket { kSmall, kMedium, kLarge };

SizeBucket BucketOf(double scale, const SizeBuckets& b) {
  if (scale < b.small_below) return SizeBucket::kSmall;
  if (scale > b.large_above) return SizeBucket::kLarge;
  return SizeBucket::kMedium;
}

std::array<std::optional<double>, 3> SizeAps(const Problem& p,
                                             const EvalConfig& cfg) {
  const std::vector<Unit> units = p.Units(nullptr);
  // [unit][bucket] -> AP50, or nullopt when the unit has no gt in the bucket.
  std::vector<std::array<std::optional<double>, 3>> per_unit(units.size());
  ParallelFor(units.size(), cfg.threads, [&](std::size_t i) {
    const Unit& u = units[i];
    const UnitGeometry g = ComputeGeometry(u, p);
    const std::vector<RankedDet> ranking = GlobalRanking(u, p.preds());
    std::vector<std::vector<int>> matches(u.slices.size());
    std::array<std::size_t, 3> num_gt{};
    std::vector<std::vector<SizeBucket>> gt_bucket(u.slices.size());
    for (std::size_t s = 0; s < u.slices.size(); ++s) {
      const Slice& sl = u.slices[s];
      matches[s] = MatchSlice(g.iou[s], sl.preds.size(), sl.gts.size(), 0.5);
      for (std::size_t gi : sl.gts) {
        const SizeBucket b = BucketOf(
            RelativeScale(p.dataset().annotations()[gi].bbox, *sl.image),
            cfg.size_buckets);
        gt_bucket[s].push_back(b);
        ++num_gt[static_cast<int>(b)];
      }
    }
    for (int b = 0; b < 3; ++b) {
      if (num_gt[b] == 0) continue;
      std::vector<DetFlag> flags;
      flags.reserve(ranking.size());
      for (const RankedDet& d : ranking) {
        const Slice& sl = u.slices[d.slice];
        const int m = matches[d.slice][d.rank];
        SizeBucket own;
        if (m >= 0) {
          own = gt_bucket[d.slice][m];
          flags.push_back(static_cast<int>(own) == b ? DetFlag::kTruePositive
                                                     : DetFlag::kIgnored);
        } else {
          own = BucketOf(RelativeScale(p.preds()[sl.preds[d.rank]].bbox, *sl.image),
                         cfg.size_buckets);
          flags.push_back(static_cast<int>(own) == b ? DetFlag::kFalsePositive
                                                     : DetFlag::kIgnored);
        }
      }
      per_unit[i][b] = InterpolatedAp(flags, num_gt[b]);
    }
  });
  std::array<std::optional<double>, 3> out;
  for (int b = 0; b < 3; ++b) {
    std::vector<double> v;
    for (const auto& pu : per_unit) {
      if (pu[b]) v.push_back(*pu[b]);
    }
    out[b] = MeanOrAbsent(v);
  }
  return out;
}

BucketAps Breakdown(const Problem& p, const EvalConfig& cfg) {
  BucketAps out;
  const auto sizes = SizeAps(p, cfg);
  out.s = sizes[0];
  out.m = sizes[1];
  out.l = sizes[2];
  const Dataset& ds = p.dataset();
  auto by_lighting = [&ds](Lighting v) -> ImageFilter {
    return [&ds, v](const ImageRecord& img) {
      const VideoMeta* vm = ds.VideoOfImage(img.id);
      return vm && vm->lighting == v;
    };
  };
  auto by_background = [&ds](Background v) -> ImageFilter {
    return [&ds, v](const ImageRecord& img) {
      const VideoMeta* vm = ds.VideoOfImage(img.id);
      return vm && vm->background == v;
    };
  };
  out.bright = FilteredAp50(p, cfg, by_lighting(Lighting::kBright));
  out.dim = FilteredAp50(p, cfg, by_lighting(Lighting::kDim));
  out.simple = FilteredAp50(p, cfg, by_background(Background::kSimple));
  out.busy = FilteredAp50(p, cfg, by_background(Background::kBusy));
  return out;
}

std::size_t CountEvaluated(const std::vector<Unit>& units) {
  std::size_t n = 0;
  for (const Unit& u : units) {
    for (const Slice& s : u.slices) n += s.preds.size();
  }
  return n;
}

void Summarize(EvalReport& r) {
  std::vector<double> ap, ap50, ap75;
  for (const LabelAp& l : r.per_label) {
    ap.push_back(l.ap);
    ap50.push_back(l.ap50);
    ap75.push_back(l.ap75);
  }
  r.ap = Mean(ap);
  r.ap50 = Mean(ap50);
  r.ap75 = Mean(ap75);
}

Json OptionalNumber(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace

std::vector<double> DefaultIouThresholds() {
  std::vector<double> out;
  for (int i = 0; i < 10; ++i) out.push_back((50 + 5 * i) / 100.0);
  return out;
}

void EvalConfig::Validate() const {
  if (iou_thresholds.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no IoU thresholds configured");
  }
  for (std::size_t i = 0; i < iou_thresholds.size(); ++i) {
    const double t = iou_thresholds[i];
    if (!(t > 0.0 && t <= 1.0) || (i > 0 && !(t > iou_thresholds[i - 1]))) {
      throw Error(ErrorCode::kInvalidArgument,
                  "IoU thresholds must be strictly increasing in (0, 1]");
    }
  }
  if (max_dets && *max_dets <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "max_dets must be positive");
  }
  if (!(size_buckets.small_below <= size_buckets.large_above)) {
    throw Error(ErrorCode::kInvalidArgument, "size bucket cut points out of order");
  }
  if (threads <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "thread count must be positive");
  }
}

EvalReport FederatedApCategory(const Dataset& dataset,
                               std::span<const Prediction> predictions,
                               const EvalConfig& cfg) {
  cfg.Validate();
  const Problem p(dataset, predictions, LabelMode::kCategory, cfg, nullptr, nullptr);
  const std::vector<Unit> units = p.Units(nullptr);
  if (units.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "no category has ground truth in the evaluated images");
  }
  EvalReport r;
  r.mode = LabelMode::kCategory;
  r.iou_thresholds = cfg.iou_thresholds;
  r.per_label = EvaluateUnits(units, p, cfg);
  r.num_predictions = CountEvaluated(units);
  Summarize(r);
  if (cfg.buckets) r.buckets = Breakdown(p, cfg);
  return r;
}

EvalReport InstanceAp(const Dataset& dataset,
                      std::span<const Prediction> predictions,
                      const SplitSpec& spec, const EvalConfig& cfg) {
  cfg.Validate();
  const std::set<Id> registry = spec.TargetInstances();
  const std::vector<Id> eval_images = spec.EvaluationImages();
  const Problem p(dataset, predictions, LabelMode::kInstance, cfg, &registry,
                  cfg.image_subset ? nullptr : &eval_images);
  const std::vector<Unit> units = p.Units(nullptr);
  if (units.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "no target instance has ground truth in the evaluated images");
  }
  EvalReport r;
  r.mode = LabelMode::kInstance;
  r.iou_thresholds = cfg.iou_thresholds;
  r.per_label = EvaluateUnits(units, p, cfg);
  r.num_predictions = CountEvaluated(units);
  Summarize(r);
  std::vector<double> seen, unseen;
  for (LabelAp& l : r.per_label) {
    l.unseen = spec.IsUnseen(l.label);
    (*l.unseen ? unseen : seen).push_back(l.ap50);
  }
  r.ap50_seen = MeanOrAbsent(seen);
  r.ap50_unseen = MeanOrAbsent(unseen);
  if (cfg.buckets) r.buckets = Breakdown(p, cfg);
  return r;
}

BucketAps BucketBreakdown(const Dataset& dataset,
                          std::span<const Prediction> predictions,
                          const EvalConfig& cfg, const SplitSpec* spec) {
  cfg.Validate();
  if (!spec) {
    const Problem p(dataset, predictions, LabelMode::kCategory, cfg, nullptr,
                    nullptr);
    return Breakdown(p, cfg);
  }
  const std::set<Id> registry = spec->TargetInstances();
  const std::vector<Id> eval_images = spec->EvaluationImages();
  const Problem p(dataset, predictions, LabelMode::kInstance, cfg, &registry,
                  cfg.image_subset ? nullptr : &eval_images);
  return Breakdown(p, cfg);
}

Json ReportToJson(const EvalReport& r) {
  Json j;
  j["mode"] = std::string(ToString(r.mode));
  j["iou_thresholds"] = r.iou_thresholds;
  j["AP"] = r.ap;
  j["AP50"] = r.ap50;
  j["AP75"] = r.ap75;
  if (r.mode == LabelMode::kInstance) {
    j["AP50_seen"] = OptionalNumber(r.ap50_seen);
    j["AP50_unseen"] = OptionalNumber(r.ap50_unseen);
  }
  if (r.buckets) {
    const BucketAps& b = *r.buckets;
    const std::pair<const char*, const std::optional<double>*> fields[] = {
        {"AP50_l", &b.l},           {"AP50_m", &b.m},
        {"AP50_s", &b.s},           {"AP50_bright", &b.bright},
        {"AP50_dim", &b.dim},       {"AP50_simple", &b.simple},
        {"AP50_busy", &b.busy}};
    for (const auto& [key, v] : fields) {
      if (*v) j[key] = **v;
    }
  }
  j["num_predictions"] = r.num_predictions;
  const char* label_key =
      r.mode == LabelMode::kCategory ? "category_id" : "instance_id";
  Json rows = Json::array();
  for (const LabelAp& l : r.per_label) {
    Json row = {{label_key, l.label},
                {"num_gt", l.num_gt},
                {"AP", l.ap},
                {"AP50", l.ap50},
                {"AP75", l.ap75}};
    if (l.unseen) row["unseen"] = *l.unseen;
    rows.push_back(std::move(row));
  }
  j["per_label"] = std::move(rows);
  return j;
}

std::string ReportToCsv(const EvalReport& r) {
  using internal::FormatDouble;
  std::ostringstream out;
  const bool instance = r.mode == LabelMode::kInstance;
  out << (instance ? "instance_id" : "category_id") << ",num_gt,AP,AP50,AP75";
  if (instance) out << ",unseen";
  out << '\n';
  std::size_t total_gt = 0;
  for (const LabelAp& l : r.per_label) {
    total_gt += l.num_gt;
    out << l.label << ',' << l.num_gt << ',' << FormatDouble(l.ap) << ','
        << FormatDouble(l.ap50) << ',' << FormatDouble(l.ap75);
    if (instance) out << ',' << (l.unseen.value_or(false) ? 1 : 0);
    out << '\n';
  }
  out << "all," << total_gt << ',' << FormatDouble(r.ap) << ','
      << FormatDouble(r.ap50) << ',' << FormatDouble(r.ap75);
  if (instance) out << ',';
  out << '\n';
  return out.str();
}

}  // namespace egobench
