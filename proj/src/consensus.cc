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

#include "egobench/consensus.h"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <tuple>

#include "egobench/error.h"
#include "egobench/geometry.h"
#include "text_util.h"

namespace egobench {

namespace {

void CheckSingleImage(std::span<const BoxAnnotation> a,
                      std::span<const BoxAnnotation> b) {
  std::optional<Id> image;
  for (auto rows : {a, b}) {
    for (const auto& r : rows) {
      if (image && *image != r.image_id) {
        throw Error(ErrorCode::kInvalidArgument,
                    "annotations span images " + std::to_string(*image) +
                        " and " + std::to_string(r.image_id));
      }
      image = r.image_id;
    }
  }
}

}  // namespace

double PairwiseAgreement(std::span<const BoxAnnotation> a,
                         std::span<const BoxAnnotation> b) {
  CheckSingleImage(a, b);
  if (a.empty()) return b.empty() ? 1.0 : 0.0;

  struct Pair {
    double iou;
    std::size_t i;
    std::size_t j;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (a[i].category_id != b[j].category_id) continue;
      pairs.push_back({Iou(a[i].bbox, b[j].bbox), i, j});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
    if (x.iou != y.iou) return x.iou > y.iou;
    return std::tie(x.i, x.j) < std::tie(y.i, y.j);
  });

  std::vector<bool> used_a(a.size(), false);
  std::vector<bool> used_b(b.size(), false);
  double total = 0.0;
  for (const auto& p : pairs) {
    if (used_a[p.i] || used_b[p.j]) continue;
    used_a[p.i] = used_b[p.j] = true;
    total += p.iou;
  }
  return total / static_cast<double>(a.size());
}

std::vector<double> ConsensusScores(const AnnotatorSet& set) {
  if (set.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "consensus needs at least two annotators");
  }
  std::vector<double> scores(set.size(), 0.0);
  for (std::size_t k = 0; k < set.size(); ++k) {
    double sum = 0.0;
    for (std::size_t j = 0; j < set.size(); ++j) {
      if (j == k) continue;
      sum += PairwiseAgreement(set[k].boxes, set[j].boxes);
    }
    scores[k] = sum / static_cast<double>(set.size() - 1);
  }
  return scores;
}

Id SelectSourceOfTruth(const AnnotatorSet& set) {
  const std::vector<double> scores = ConsensusScores(set);
  std::size_t best = 0;
  for (std::size_t k = 1; k < set.size(); ++k) {
    if (scores[k] > scores[best] ||
        (scores[k] == scores[best] &&
         set[k].annotator_id < set[best].annotator_id)) {
      best = k;
    }
  }
  return set[best].annotator_id;
}

ConsensusResult ReconcileDataset(const Dataset& dataset) {
  ConsensusResult result;
  for (const auto& img : dataset.images()) {
    std::map<Id, AnnotatorLabels> by_annotator;
    auto listed = img.extra.find("annotator_ids");
    if (listed != img.extra.end() && listed->is_array()) {
      for (const auto& id : *listed) {
        if (!id.is_number_integer()) {
          throw Error(ErrorCode::kParseError,
                      "image " + std::to_string(img.id) +
                          ".annotator_ids: expected integer ids");
        }
        by_annotator[id.get<Id>()].annotator_id = id.get<Id>();
      }
    }
    for (std::size_t ai : dataset.AnnotationIndicesForImage(img.id)) {
      const auto& a = dataset.annotations()[ai];
      if (!a.annotator_id) continue;
      auto& labels = by_annotator[*a.annotator_id];
      labels.annotator_id = *a.annotator_id;
      labels.boxes.push_back(a);
    }
    if (by_annotator.size() < 2) {
      result.skipped_images.push_back(img.id);
      continue;
    }
    AnnotatorSet set;
    for (auto& [id, labels] : by_annotator) set.push_back(std::move(labels));

    ImageConsensus ic;
    ic.image_id = img.id;
    ic.scores = ConsensusScores(set);
    for (const auto& labels : set) ic.annotator_ids.push_back(labels.annotator_id);
    ic.source_of_truth = SelectSourceOfTruth(set);
    result.images.push_back(std::move(ic));
  }
  return result;
}

Dataset ApplyConsensus(const Dataset& dataset, const ConsensusResult& result) {
  std::map<Id, Id> winner;
  for (const auto& ic : result.images) winner[ic.image_id] = ic.source_of_truth;

  std::vector<BoxAnnotation> kept;
  for (const auto& a : dataset.annotations()) {
    auto it = winner.find(a.image_id);
    if (it == winner.end() || (a.annotator_id && *a.annotator_id == it->second)) {
      kept.push_back(a);
    }
  }
  return Dataset({dataset.categories().begin(), dataset.categories().end()},
                 {dataset.videos().begin(), dataset.videos().end()},
                 {dataset.images().begin(), dataset.images().end()},
                 std::move(kept));
}

std::string ConsensusToCsv(const ConsensusResult& result) {
  std::ostringstream out;
  out << "image_id,annotator_id,consensus_score,source_of_truth\n";
  for (const auto& ic : result.images) {
    for (std::size_t k = 0; k < ic.annotator_ids.size(); ++k) {
      out << ic.image_id << ',' << ic.annotator_ids[k] << ','
          << internal::FormatDouble(ic.scores[k]) << ',' << (ic.annotator_ids[k] == ic.source_of_truth ? 1 : 0)
          << '\n';
    }
  }
  return out.str();
}

}  // namespace egobench
