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

#ifndef EGOBENCH_EVAL_H_
#define EGOBENCH_EVAL_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "egobench/schema.h"
#include "egobench/splits.h"

namespace egobench {

// 0.50, 0.55, ..., 0.95.
std::vector<double> DefaultIouThresholds();

// Relative-scale cut points for the size buckets: s below `small_below`,
// l above `large_above`, m in between (both ends inclusive).
struct SizeBuckets {
  double small_below = 0.20;
  double large_above = 0.30;
};

struct EvalConfig {
  std::vector<double> iou_thresholds = DefaultIouThresholds();
  // Restricts evaluation to these images. Instance mode defaults to
  // val + test of the split spec.
  std::optional<std::vector<Id>> image_subset;
  // Keep only the top-scoring detections per image and label.
  std::optional<int> max_dets;
  bool buckets = false;
  SizeBuckets size_buckets;
  int threads = 1;

  // Throws Error(kInvalidArgument) unless thresholds are strictly increasing
  // in (0, 1], max_dets is positive and the size cut points are ordered.
  void Validate() const;
};

// AP50 per condition bucket. A bucket without ground truth is absent.
struct BucketAps {
  std::optional<double> l, m, s;
  std::optional<double> bright, dim;
  std::optional<double> simple, busy;

  bool operator==(const BucketAps&) const = default;
};

struct LabelAp {
  Id label = 0;
  std::size_t num_gt = 0;
  double ap = 0.0;
  double ap50 = 0.0;
  double ap75 = 0.0;
  std::optional<bool> unseen;  // instance mode only

  bool operator==(const LabelAp&) const = default;
};

// Metrics are fractions in [0, 1].
struct EvalReport {
  LabelMode mode = LabelMode::kCategory;
  std::vector<double> iou_thresholds;
  double ap = 0.0;
  double ap50 = 0.0;
  double ap75 = 0.0;
  std::optional<double> ap50_seen;
  std::optional<double> ap50_unseen;
  std::optional<BucketAps> buckets;
  std::vector<LabelAp> per_label;  // ascending label, labels with ground truth
  std::size_t num_predictions = 0;  // after gating and max_dets

  bool operator==(const EvalReport&) const = default;
};

Json ReportToJson(const EvalReport& report);
// One row per label, then a summary row with label "all".
std::string ReportToCsv(const EvalReport& report);

// Category-level AP with federated gating: predictions of category c count
// only on images annotated with c or listing c as a verified negative.
// Throws Error(kInvalidArgument) when no category has ground truth.
EvalReport FederatedApCategory(const Dataset& dataset,
                               std::span<const Prediction> predictions,
                               const EvalConfig& cfg);

// Instance-level AP over the split's target instances, evaluated on every
// evaluation image. Labels outside the target registry throw
// Error(kInvalidArgument).
EvalReport InstanceAp(const Dataset& dataset,
                      std::span<const Prediction> predictions,
                      const SplitSpec& spec, const EvalConfig& cfg);

// AP50 per size, lighting and background bucket. Lighting and background
// buckets keep only images whose video carries that tag. Size buckets bin
// ground truth by relative scale; each prediction is matched against all
// ground truth first, counts as a true positive only in its gt's bucket and
// as a false positive only in its own scale's bucket. `spec` selects
// instance mode.
BucketAps BucketBreakdown(const Dataset& dataset,
                          std::span<const Prediction> predictions,
                          const EvalConfig& cfg,
                          const SplitSpec* spec = nullptr);

enum class StreamMode { kClassIncrementalInstance, kDataIncrementalCategory };

std::string_view ToString(StreamMode mode);
std::optional<StreamMode> ParseStreamMode(std::string_view s);

// One training batch. `map` is a precomputed checkpoint mAP in percent;
// otherwise the checkpoint is scored from predictions.
struct Experience {
  std::vector<Id> image_ids;
  std::vector<Id> instance_ids;
  std::vector<Id> category_ids;
  std::optional<double> map;
  std::optional<std::filesystem::path> predictions;
};

struct ExperienceStream {
  StreamMode mode = StreamMode::kClassIncrementalInstance;
  std::vector<Experience> experiences;
  std::optional<std::filesystem::path> dataset;
  std::optional<std::filesystem::path> splits;
  // Fixed test set; defaults to the split's test images, else every image.
  std::optional<std::vector<Id>> test_images;
};

// Throws Error(kInvalidArgument) when experiences overlap: instance sets in
// class-incremental streams, image sets in data-incremental ones.
void ValidateStream(const ExperienceStream& stream);

// Relative paths in the file are resolved against the file's directory.
ExperienceStream ParseStream(const Json& j,
                             const std::filesystem::path& base_dir = {});
ExperienceStream LoadStream(const std::filesystem::path& path);

struct ClResult {
  std::vector<double> map;  // percent, one per experience
  double eap = 0.0;         // mean of map
};

// Mean of per-experience mAPs. Throws on an empty list.
double ExperienceAveragePrecision(std::span<const double> maps);

// Scores every checkpoint on the stream's fixed test set with the mode's AP
// operation. predictions[i] is required for experiences without a
// precomputed map; instance streams also need `spec`.
ClResult ClEvaluate(const ExperienceStream& stream,
                    std::span<const std::optional<std::vector<Prediction>>> predictions,
                    const Dataset* dataset, const SplitSpec* spec,
                    const EvalConfig& cfg);

Json ClResultToJson(const ClResult& r, StreamMode mode);

// Test oracle: 101-point interpolated AP for one label by direct
// precision/recall enumeration. Shares no matching code with the engine.
struct OracleBox {
  Id image_id = 0;
  Box box;
  double score = 0.0;  // ignored for ground truth
};
double BruteForceApOracle(std::span<const OracleBox> gts,
                          std::span<const OracleBox> predictions,
                          double iou_thresh);

struct OracleSummary {
  double ap = 0.0;
  double ap50 = 0.0;
  double ap75 = 0.0;
};

// Category-mode AP, AP50 and AP75 assembled from BruteForceApOracle with the
// same gating and averaging rules as FederatedApCategory.
OracleSummary BruteForceFederatedOracle(const Dataset& dataset,
                                        std::span<const Prediction> predictions,
                                        std::span<const double> iou_thresholds);

}  // namespace egobench

#endif  // EGOBENCH_EVAL_H_
