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

#include "egobench/instindex.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "egobench/error.h"

namespace egobench {

namespace {

double Norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void CheckDim(std::span<const double> v, int dim, const std::string& what) {
  if (v.size() != static_cast<std::size_t>(dim)) {
    throw Error(ErrorCode::kShapeMismatch,
                what + " has dimension " + std::to_string(v.size()) +
                    ", index expects " + std::to_string(dim));
  }
}

std::vector<double> ReadVector(const Json& j, const std::string& where) {
  if (!j.is_array()) {
    throw Error(ErrorCode::kParseError, where + ": expected a number array");
  }
  std::vector<double> v;
  v.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_number()) {
      throw Error(ErrorCode::kParseError, where + ": expected numbers");
    }
    v.push_back(e.get<double>());
  }
  return v;
}

}  // namespace

EmbeddingIndex::EmbeddingIndex(int dim, double threshold)
    : dim_(dim), threshold_(threshold) {
  if (dim <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "embedding dim must be positive");
  }
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "match threshold must be in [0, 1]");
  }
}

void EmbeddingIndex::Register(Id instance_id,
                              std::span<const std::vector<double>> embeddings) {
  if (embeddings.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "instance " + std::to_string(instance_id) +
                    " registered without embeddings");
  }
  std::vector<double> mean(dim_, 0.0);
  for (const auto& e : embeddings) {
    CheckDim(e, dim_, "embedding of instance " + std::to_string(instance_id));
    const double n = Norm(e);
    if (!(n > 0.0) || !std::isfinite(n)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "zero or non-finite embedding for instance " +
                      std::to_string(instance_id));
    }
    for (int k = 0; k < dim_; ++k) mean[k] += e[k] / n;
  }
  for (double& v : mean) v /= static_cast<double>(embeddings.size());
  const double n = Norm(mean);
  // Relative to unit inputs, anything this small is cancellation noise.
  if (!(n > 1e-12)) {
    throw Error(ErrorCode::kInvalidArgument,
                "DEGENERATE_MEAN: embeddings of instance " +
                    std::to_string(instance_id) + " average to zero");
  }
  for (double& v : mean) v /= n;
  entries_[instance_id] = std::move(mean);
}

const std::vector<double>* EmbeddingIndex::Find(Id instance_id) const {
  auto it = entries_.find(instance_id);
  return it == entries_.end() ? nullptr : &it->second;
}

std::optional<IndexMatch> EmbeddingIndex::Match(std::span<const double> proposal,
                                                double rpn_score) const {
  CheckDim(proposal, dim_, "proposal embedding");
  if (!(rpn_score >= 0.0 && rpn_score <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "RPN score must be in [0, 1]");
  }
  const double n = Norm(proposal);
  if (entries_.empty() || !(n > 0.0)) return std::nullopt;

  std::optional<IndexMatch> best;
  for (const auto& [id, e] : entries_) {
    double dot = 0.0;
    for (int k = 0; k < dim_; ++k) dot += e[k] * proposal[k];
    const double cosine = std::clamp(dot / n, 0.0, 1.0);
    if (!best || cosine > best->similarity) {
      best = IndexMatch{id, cosine, 0.0};
    }
  }
  if (best->similarity < threshold_) return std::nullopt;
  best->final_score = rpn_score * best->similarity;
  return best;
}

void ParseEmbeddings(const Json& j, EmbeddingIndex& index) {
  if (!j.is_array()) {
    throw Error(ErrorCode::kParseError, "embedding file: expected an array");
  }
  std::map<Id, std::vector<std::vector<double>>> grouped;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string where = "embeddings[" + std::to_string(i) + "]";
    const Json& r = j[i];
    if (!r.is_object() || !r.contains("instance_id") ||
        !r["instance_id"].is_number_integer() || !r.contains("embedding")) {
      throw Error(ErrorCode::kParseError,
                  where + ": expected {\"instance_id\", \"embedding\"}");
    }
    grouped[r["instance_id"].get<Id>()].push_back(
        ReadVector(r["embedding"], where + ".embedding"));
  }
  for (const auto& [id, vecs] : grouped) index.Register(id, vecs);
}

void LoadEmbeddings(const std::filesystem::path& path, EmbeddingIndex& index) {
  ParseEmbeddings(ReadJsonFile(path), index);
}

std::vector<Proposal> ParseProposals(const Json& j, int dim) {
  if (!j.is_array()) {
    throw Error(ErrorCode::kParseError, "proposal file: expected an array");
  }
  std::vector<Proposal> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string where = "proposals[" + std::to_string(i) + "]";
    const Json& r = j[i];
    if (!r.is_object() || !r.contains("image_id") ||
        !r["image_id"].is_number_integer() || !r.contains("score") ||
        !r["score"].is_number() || !r.contains("embedding")) {
      throw Error(ErrorCode::kParseError,
                  where + ": expected image_id, bbox, score and embedding");
    }
    Proposal p;
    p.image_id = r["image_id"].get<Id>();
    const auto bbox = ReadVector(r.value("bbox", Json()), where + ".bbox");
    if (bbox.size() != 4) {
      throw Error(ErrorCode::kParseError, where + ".bbox: expected [x, y, w, h]");
    }
    p.bbox = Box{bbox[0], bbox[1], bbox[2], bbox[3]};
    p.score = r["score"].get<double>();
    if (!std::isfinite(p.score) || p.score < 0.0 || p.score > 1.0) {
      throw Error(ErrorCode::kParseError, where + ": score out of range");
    }
    p.embedding = ReadVector(r["embedding"], where + ".embedding");
    CheckDim(p.embedding, dim, where + ".embedding");
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<Proposal> LoadProposals(const std::filesystem::path& path, int dim) {
  return ParseProposals(ReadJsonFile(path), dim);
}

std::vector<Prediction> MatchProposals(const EmbeddingIndex& index,
                                       std::span<const Proposal> proposals) {
  std::vector<Prediction> out;
  for (const auto& p : proposals) {
    if (auto m = index.Match(p.embedding, p.score)) {
      out.push_back({p.image_id, m->instance_id, p.bbox, m->final_score});
    }
  }
  return out;
}

}  // namespace egobench
