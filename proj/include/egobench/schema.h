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

#ifndef EGOBENCH_SCHEMA_H_
#define EGOBENCH_SCHEMA_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "egobench/geometry.h"

namespace egobench {

using Id = std::int64_t;
using Json = nlohmann::json;

// Capture-condition vocabularies. The string forms are the on-disk values.
enum class Device { kVuzix, kAria, kRayban, kMobile };
enum class Distance { kNear, kMedium, kFar };
enum class Motion { kHorizontal, kVertical, kCombined };
enum class Background { kSimple, kBusy };
enum class Lighting { kBright, kDim };

std::string_view ToString(Device v);
std::string_view ToString(Distance v);
std::string_view ToString(Motion v);
std::string_view ToString(Background v);
std::string_view ToString(Lighting v);

// Returns nullopt for values outside the vocabulary.
template <typename E>
std::optional<E> ParseEnum(std::string_view s);

struct Category {
  Id id = 0;
  std::string name;
  std::optional<Id> parent_id;
  Json extra = Json::object();
};

struct VideoMeta {
  Id id = 0;
  std::optional<Id> participant_id;
  std::optional<Device> device;
  Id main_instance_id = 0;
  Id main_category_id = 0;
  std::optional<Distance> distance;
  std::optional<Motion> motion;
  std::optional<Background> background;
  std::optional<Lighting> lighting;
  std::string location;
  Json extra = Json::object();
};

struct ImageRecord {
  Id id = 0;
  Id video_id = 0;
  int width = 0;
  int height = 0;
  std::int64_t frame_index = 0;
  std::vector<Id> neg_category_ids;  // sorted, unique
  Json extra = Json::object();
};

struct BoxAnnotation {
  Id id = 0;
  Id image_id = 0;
  Id category_id = 0;
  std::optional<Id> instance_id;
  Box bbox;
  bool is_main = false;
  std::optional<Id> annotator_id;
  Json extra = Json::object();
};

// Cross-linked, immutable annotation set. Construction checks referential
// integrity and throws Error(kIntegrityError) naming the offending id.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<Category> categories, std::vector<VideoMeta> videos,
          std::vector<ImageRecord> images,
          std::vector<BoxAnnotation> annotations);

  std::span<const Category> categories() const { return categories_; }
  std::span<const VideoMeta> videos() const { return videos_; }
  std::span<const ImageRecord> images() const { return images_; }
  std::span<const BoxAnnotation> annotations() const { return annotations_; }

  const Category* FindCategory(Id id) const;
  const VideoMeta* FindVideo(Id id) const;
  const ImageRecord* FindImage(Id id) const;
  const BoxAnnotation* FindAnnotation(Id id) const;

  // Indices into annotations() for one image, in file order.
  std::span<const std::size_t> AnnotationIndicesForImage(Id image_id) const;
  // Indices into images() for one video, in file order.
  std::span<const std::size_t> ImageIndicesForVideo(Id video_id) const;

  // Category of an instance; nullopt when the instance is never annotated.
  std::optional<Id> CategoryOfInstance(Id instance_id) const;
  // Every annotated instance id, ascending.
  std::vector<Id> InstanceIds() const;

  // The video an image belongs to (never null for a constructed dataset).
  const VideoMeta* VideoOfImage(Id image_id) const;

 private:
  std::vector<Category> categories_;
  std::vector<VideoMeta> videos_;
  std::vector<ImageRecord> images_;
  std::vector<BoxAnnotation> annotations_;

  std::unordered_map<Id, std::size_t> category_index_;
  std::unordered_map<Id, std::size_t> video_index_;
  std::unordered_map<Id, std::size_t> image_index_;
  std::unordered_map<Id, std::size_t> annotation_index_;
  std::vector<std::vector<std::size_t>> annotations_by_image_;
  std::vector<std::vector<std::size_t>> images_by_video_;
  std::map<Id, Id> instance_category_;
};

Dataset ParseDataset(const Json& j);
Dataset ParseDatasetText(std::string_view text);
Dataset LoadDataset(const std::filesystem::path& path);

Json DatasetToJson(const Dataset& dataset);
void SaveDataset(const Dataset& dataset, const std::filesystem::path& path);

// A data-level problem found by Validate. `code` is machine readable, e.g.
// NEG_CONTRADICTION or DEGENERATE_BOX.
struct Violation {
  std::string code;
  std::string message;

  bool operator==(const Violation&) const = default;
};

// Empty iff every dataset invariant holds. Violations are returned, never
// thrown.
std::vector<Violation> Validate(const Dataset& dataset);

// Which id namespace prediction labels live in.
enum class LabelMode { kCategory, kInstance };

std::string_view ToString(LabelMode mode);

struct Prediction {
  Id image_id = 0;
  Id label = 0;  // category id or instance id, depending on LabelMode
  Box bbox;
  double score = 0.0;
};

// Parses a prediction array. Labels are checked against the dataset's
// categories (category mode) or against `target_registry` when given, else
// the dataset's annotated instances (instance mode).
std::vector<Prediction> ParsePredictions(
    const Json& j, LabelMode mode, const Dataset& dataset,
    const std::set<Id>* target_registry = nullptr);
std::vector<Prediction> LoadPredictions(
    const std::filesystem::path& path, LabelMode mode, const Dataset& dataset,
    const std::set<Id>* target_registry = nullptr);

Json PredictionsToJson(std::span<const Prediction> preds, LabelMode mode);

// Shared JSON helpers for the other file formats.
Json ReadJsonFile(const std::filesystem::path& path);
void WriteTextFile(const std::filesystem::path& path, std::string_view text);

}  // namespace egobench

#endif  // EGOBENCH_SCHEMA_H_
