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

#ifndef EGOBENCH_SPLITS_H_
#define EGOBENCH_SPLITS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <vector>

#include "egobench/schema.h"

namespace egobench {

// The single reference annotation registered for an evaluation instance.
struct TargetRef {
  Id instance_id = 0;
  Id image_id = 0;
  Id annotation_id = 0;

  bool operator==(const TargetRef&) const = default;
};

// Image ids per split (ascending), one target reference per evaluation
// instance (ascending by instance), and the evaluation instances whose
// category has no training annotation. Reference images belong to the target
// split only and appear in none of the image lists.
struct SplitSpec {
  std::vector<Id> train_images;
  std::vector<Id> val_images;
  std::vector<Id> test_images;
  std::vector<TargetRef> targets;
  std::vector<Id> unseen_instance_ids;

  bool operator==(const SplitSpec&) const = default;

  std::set<Id> TargetInstances() const;
  // val + test, ascending.
  std::vector<Id> EvaluationImages() const;
  bool IsUnseen(Id instance_id) const;
};

enum class SplitMode {
  kUnified,  // unseen categories arise only by chance
  kInstDet,  // some categories are withheld from training entirely
};

struct SplitOptions {
  // Fraction of annotated instances drawn as evaluation instances.
  double eval_instance_fraction = 0.5;
  // InstDet mode: fraction of categories withheld from training, unless
  // `withheld_categories` names them explicitly. Random picks that would leave
  // no training video are skipped.
  double withheld_category_fraction = 0.25;
  std::vector<Id> withheld_categories;
};

// Per-video split construction. Videos touching an evaluation instance go to
// val/test; every other video is training data, so evaluation instances never
// appear in a train image. Each evaluation instance's reference is its
// annotation with the largest relative size (ties to the lowest annotation
// id). Deterministic for a given seed. Throws Error(kInvalidArgument) when
// the dataset cannot yield both a train video and an evaluation instance.
SplitSpec BuildSplits(const Dataset& dataset, SplitMode mode, std::uint64_t seed,
                      const SplitOptions& options = {});

// Categories with at least one annotation on a train image.
std::set<Id> SeenCategories(const Dataset& dataset, const SplitSpec& spec);

// Codes: UNKNOWN_ID, SPLIT_OVERLAP, DUPLICATE_REFERENCE, BAD_REFERENCE,
// REFERENCE_IN_EVAL, LEAKED_INSTANCE, MISSING_REFERENCE, BAD_UNSEEN_FLAG.
// MISSING_REFERENCE fires for an instance annotated in val/test but never in
// train that has no target entry.
std::vector<Violation> VerifySplits(const Dataset& dataset,
                                    const SplitSpec& spec);

std::optional<SplitMode> ParseSplitMode(std::string_view s);
std::string_view ToString(SplitMode mode);

Json SplitsToJson(const SplitSpec& spec);
SplitSpec ParseSplits(const Json& j);
SplitSpec LoadSplits(const std::filesystem::path& path);
void SaveSplits(const SplitSpec& spec, const std::filesystem::path& path);

}  // namespace egobench

#endif  // EGOBENCH_SPLITS_H_
