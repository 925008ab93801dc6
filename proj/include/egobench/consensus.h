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

#ifndef EGOBENCH_CONSENSUS_H_
#define EGOBENCH_CONSENSUS_H_

#include <span>
#include <string>
#include <vector>

#include "egobench/schema.h"

namespace egobench {

// One annotator's boxes on one image.
struct AnnotatorLabels {
  Id annotator_id = 0;
  std::vector<BoxAnnotation> boxes;
};

// Two or more annotators' labels for the same image.
using AnnotatorSet = std::vector<AnnotatorLabels>;

// Mean over a's boxes of the IoU each gets when a's and b's boxes of the same
// category are paired greedily in descending IoU order. Unpaired boxes of a
// contribute 0. Empty a scores 1 against empty b and 0 otherwise. Not
// symmetric. Throws if the boxes span more than one image.
double PairwiseAgreement(std::span<const BoxAnnotation> a,
                         std::span<const BoxAnnotation> b);

// score[k] = mean over j != k of PairwiseAgreement(set[k], set[j]), in input
// order. Requires at least two annotators.
std::vector<double> ConsensusScores(const AnnotatorSet& set);

// Annotator with the highest consensus score; ties go to the lowest id.
Id SelectSourceOfTruth(const AnnotatorSet& set);

struct ImageConsensus {
  Id image_id = 0;
  std::vector<Id> annotator_ids;  // ascending
  std::vector<double> scores;     // aligned with annotator_ids
  Id source_of_truth = 0;
};

struct ConsensusResult {
  std::vector<ImageConsensus> images;  // images with >= 2 annotators
  std::vector<Id> skipped_images;      // fewer than 2 annotators
};

// Reconciles every image of a multi-annotator file. The annotators of an
// image are listed by an optional "annotator_ids" array on the image record;
// otherwise they are the annotators with at least one box on it.
ConsensusResult ReconcileDataset(const Dataset& dataset);

// Keeps only the source-of-truth annotator's boxes on reconciled images.
Dataset ApplyConsensus(const Dataset& dataset, const ConsensusResult& result);

std::string ConsensusToCsv(const ConsensusResult& result);

}  // namespace egobench

#endif  // EGOBENCH_CONSENSUS_H_
