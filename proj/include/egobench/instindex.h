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

#ifndef EGOBENCH_INSTINDEX_H_
#define EGOBENCH_INSTINDEX_H_

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "egobench/schema.h"

namespace egobench {

inline constexpr int kDefaultEmbeddingDim = 512;

struct IndexMatch {
  Id instance_id = 0;
  double similarity = 0.0;   // cosine, clamped to [0, 1]
  double final_score = 0.0;  // rpn_score * similarity
};

// Target embeddings for proposal-to-instance matching. Stored embeddings are
// unit-norm. Const members may be called concurrently; Register must not run
// concurrently with anything else.
class EmbeddingIndex {
 public:
  explicit EmbeddingIndex(int dim = kDefaultEmbeddingDim,
                          double threshold = 0.5);

  int dim() const { return dim_; }
  double threshold() const { return threshold_; }
  std::size_t size() const { return entries_.size(); }

  // Stores normalize(mean(normalize(e_i))) for the instance, replacing any
  // earlier registration. Throws on zero vectors, dimension mismatch, or a
  // mean that cancels to zero (DEGENERATE_MEAN).
  void Register(Id instance_id, std::span<const std::vector<double>> embeddings);

  const std::vector<double>* Find(Id instance_id) const;

  // Best cosine match, or nullopt below threshold or for an empty index. Ties
  // go to the lowest instance id.
  std::optional<IndexMatch> Match(std::span<const double> proposal,
                                  double rpn_score) const;

 private:
  int dim_;
  double threshold_;
  std::map<Id, std::vector<double>> entries_;
};

// Region proposal with an embedding, as produced upstream of this toolkit.
struct Proposal {
  Id image_id = 0;
  Box bbox;
  double score = 0.0;  // RPN objectness in [0, 1]
  std::vector<double> embedding;
};

// {"instance_id", "embedding"} records; repeated ids are averaged together.
void LoadEmbeddings(const std::filesystem::path& path, EmbeddingIndex& index);
void ParseEmbeddings(const Json& j, EmbeddingIndex& index);

std::vector<Proposal> ParseProposals(const Json& j, int dim);
std::vector<Proposal> LoadProposals(const std::filesystem::path& path, int dim);

// Instance-mode predictions for every proposal that clears the threshold.
std::vector<Prediction> MatchProposals(const EmbeddingIndex& index,
                                       std::span<const Proposal> proposals);

}  // namespace egobench

#endif  // EGOBENCH_INSTINDEX_H_
