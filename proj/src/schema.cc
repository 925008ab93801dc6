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

#include "egobench/schema.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include "egobench/error.h"

namespace egobench {

namespace {

template <typename E>
struct EnumNames;

template <>
struct EnumNames<Device> {
  static constexpr std::array<std::pair<Device, std::string_view>, 4> kNames{{
      {Device::kVuzix, "vuzix"},
      {Device::kAria, "aria"},
      {Device::kRayban, "rayban"},
      {Device::kMobile, "mobile"},
  }};
};
template <>
struct EnumNames<Distance> {
  static constexpr std::array<std::pair<Distance, std::string_view>, 3> kNames{{
      {Distance::kNear, "near"},
      {Distance::kMedium, "medium"},
      {Distance::kFar, "far"},
  }};
};
template <>
struct EnumNames<Motion> {
  static constexpr std::array<std::pair<Motion, std::string_view>, 3> kNames{{
      {Motion::kHorizontal, "horizontal"},
      {Motion::kVertical, "vertical"},
      {Motion::kCombined, "combined"},
  }};
};
template <>
struct EnumNames<Background> {
  static constexpr std::array<std::pair<Background, std::string_view>, 2>
      kNames{{
          {Background::kSimple, "simple"},
          {Background::kBusy, "busy"},
      }};
};
template <>
struct EnumNames<Lighting> {
  static constexpr std::array<std::pair<Lighting, std::string_view>, 2> kNames{{
      {Lighting::kBright, "bright"},
      {Lighting::kDim, "dim"},
  }};
};

template <typename E>
std::string_view EnumToString(E v) {
  for (const auto& [value, name] : EnumNames<E>::kNames) {
    if (value == v) return name;
  }
  return "?";
}

[[noreturn]] void ParseFail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::kParseError, where + ": " + what);
}

[[noreturn]] void IntegrityFail(const std::string& what) {
  throw Error(ErrorCode::kIntegrityError, what);
}

std::string Sub(const std::string& path, std::string_view key) {
  return path + "." + std::string(key);
}

// Reads typed fields out of one JSON record, reporting the record path on
// failure and remembering which keys were consumed.
class RecordReader {
 public:
  RecordReader(const Json& j, std::string path)
      : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) ParseFail(path_, "expected an object");
  }

  const std::string& path() const { return path_; }

  bool Has(std::string_view key) const {
    auto it = j_.find(key);
    return it != j_.end() && !it->is_null();
  }

  Id RequireId(std::string_view key) {
    auto v = OptionalId(key);
    if (!v) ParseFail(Sub(path_, key), "missing required integer field");
    return *v;
  }

  std::optional<Id> OptionalId(std::string_view key) {
    known_.emplace_back(key);
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return std::nullopt;
    if (!it->is_number_integer()) {
      ParseFail(Sub(path_, key), "expected an integer");
    }
    return it->get<Id>();
  }

  std::string RequireString(std::string_view key) {
    auto v = OptionalString(key);
    if (!v) ParseFail(Sub(path_, key), "missing required string field");
    return *v;
  }

  std::optional<std::string> OptionalString(std::string_view key) {
    known_.emplace_back(key);
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) ParseFail(Sub(path_, key), "expected a string");
    return it->get<std::string>();
  }

  std::optional<bool> OptionalBool(std::string_view key) {
    known_.emplace_back(key);
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return std::nullopt;
    if (!it->is_boolean()) ParseFail(Sub(path_, key), "expected a boolean");
    return it->get<bool>();
  }

  double RequireNumber(std::string_view key) {
    known_.emplace_back(key);
    auto it = j_.find(key);
    if (it == j_.end() || !it->is_number()) {
      ParseFail(Sub(path_, key), "missing or non-numeric field");
    }
    return it->get<double>();
  }

  template <typename E>
  std::optional<E> OptionalEnum(std::string_view key) {
    auto s = OptionalString(key);
    if (!s) return std::nullopt;
    auto v = ParseEnum<E>(*s);
    if (!v) ParseFail(Sub(path_, key), "unknown value \"" + *s + "\"");
    return v;
  }

  Box RequireBox(std::string_view key) {
    known_.emplace_back(key);
    auto it = j_.find(key);
    if (it == j_.end() || !it->is_array() || it->size() != 4) {
      ParseFail(Sub(path_, key), "expected [x, y, w, h]");
    }
    std::array<double, 4> v{};
    for (std::size_t i = 0; i < 4; ++i) {
      if (!(*it)[i].is_number()) {
        ParseFail(Sub(path_, key), "expected [x, y, w, h] of numbers");
      }
      v[i] = (*it)[i].get<double>();
      if (!std::isfinite(v[i])) ParseFail(Sub(path_, key), "non-finite value");
    }
    return Box{v[0], v[1], v[2], v[3]};
  }

  std::vector<Id> OptionalIdList(std::string_view key) {
    known_.emplace_back(key);
    std::vector<Id> out;
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return out;
    if (!it->is_array()) ParseFail(Sub(path_, key), "expected an array");
    for (const auto& e : *it) {
      if (!e.is_number_integer()) {
        ParseFail(Sub(path_, key), "expected integer ids");
      }
      out.push_back(e.get<Id>());
    }
    return out;
  }

  // Everything not consumed by a typed getter.
  Json Extra() const {
    Json extra = Json::object();
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (std::find(known_.begin(), known_.end(), it.key()) == known_.end()) {
        extra[it.key()] = it.value();
      }
    }
    return extra;
  }

 private:
  const Json& j_;
  std::string path_;
  std::vector<std::string> known_;
};

const Json& RequireArray(const Json& j, std::string_view key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_array()) {
    ParseFail(std::string(key), "missing top-level array");
  }
  return *it;
}

std::string Indexed(std::string_view table, std::size_t i) {
  return std::string(table) + "[" + std::to_string(i) + "]";
}

template <typename T>
std::unordered_map<Id, std::size_t> IndexById(const std::vector<T>& rows,
                                              std::string_view what) {
  std::unordered_map<Id, std::size_t> index;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!index.emplace(rows[i].id, i).second) {
      IntegrityFail("duplicate " + std::string(what) + " id " +
                    std::to_string(rows[i].id));
    }
  }
  return index;
}

template <typename T>
void MergeExtra(Json& out, const T& row) {
  for (auto it = row.extra.begin(); it != row.extra.end(); ++it) {
    out[it.key()] = it.value();
  }
}

}  // namespace

std::string_view ToString(Device v) { return EnumToString(v); }
std::string_view ToString(Distance v) { return EnumToString(v); }
std::string_view ToString(Motion v) { return EnumToString(v); }
std::string_view ToString(Background v) { return EnumToString(v); }
std::string_view ToString(Lighting v) { return EnumToString(v); }

template <typename E>
std::optional<E> ParseEnum(std::string_view s) {
  for (const auto& [value, name] : EnumNames<E>::kNames) {
    if (name == s) return value;
  }
  return std::nullopt;
}

template std::optional<Device> ParseEnum<Device>(std::string_view);
template std::optional<Distance> ParseEnum<Distance>(std::string_view);
template std::optional<Motion> ParseEnum<Motion>(std::string_view);
template std::optional<Background> ParseEnum<Background>(std::string_view);
template std::optional<Lighting> ParseEnum<Lighting>(std::string_view);

std::string_view ToString(LabelMode mode) {
  return mode == LabelMode::kCategory ? "category" : "instance";
}

Dataset::Dataset(std::vector<Category> categories,
                 std::vector<VideoMeta> videos,
                 std::vector<ImageRecord> images,
                 std::vector<BoxAnnotation> annotations)
    : categories_(std::move(categories)),
      videos_(std::move(videos)),
      images_(std::move(images)),
      annotations_(std::move(annotations)) {
  category_index_ = IndexById(categories_, "category");
  video_index_ = IndexById(videos_, "video");
  image_index_ = IndexById(images_, "image");
  annotation_index_ = IndexById(annotations_, "annotation");

  for (const auto& c : categories_) {
    if (c.parent_id && !category_index_.contains(*c.parent_id)) {
      IntegrityFail("category " + std::to_string(c.id) +
                    " references missing parent category " +
                    std::to_string(*c.parent_id));
    }
  }
  images_by_video_.resize(videos_.size());
  for (const auto& v : videos_) {
    if (!category_index_.contains(v.main_category_id)) {
      IntegrityFail("video " + std::to_string(v.id) +
                    " references missing main category " +
                    std::to_string(v.main_category_id));
    }
  }
  for (std::size_t i = 0; i < images_.size(); ++i) {
    auto& img = images_[i];
    auto vit = video_index_.find(img.video_id);
    if (vit == video_index_.end()) {
      IntegrityFail("image " + std::to_string(img.id) +
                    " references missing video " +
                    std::to_string(img.video_id));
    }
    images_by_video_[vit->second].push_back(i);
    std::sort(img.neg_category_ids.begin(), img.neg_category_ids.end());
    img.neg_category_ids.erase(
        std::unique(img.neg_category_ids.begin(), img.neg_category_ids.end()),
        img.neg_category_ids.end());
    for (Id c : img.neg_category_ids) {
      if (!category_index_.contains(c)) {
        IntegrityFail("image " + std::to_string(img.id) +
                      " lists missing negative category " + std::to_string(c));
      }
    }
  }
  annotations_by_image_.resize(images_.size());
  for (std::size_t i = 0; i < annotations_.size(); ++i) {
    const auto& a = annotations_[i];
    auto iit = image_index_.find(a.image_id);
    if (iit == image_index_.end()) {
      IntegrityFail("annotation " + std::to_string(a.id) +
                    " references missing image " + std::to_string(a.image_id));
    }
    if (!category_index_.contains(a.category_id)) {
      IntegrityFail("annotation " + std::to_string(a.id) +
                    " references missing category " +
                    std::to_string(a.category_id));
    }
    annotations_by_image_[iit->second].push_back(i);
    if (a.instance_id) {
      auto [it, inserted] =
          instance_category_.emplace(*a.instance_id, a.category_id);
      if (!inserted && it->second != a.category_id) {
        IntegrityFail("instance " + std::to_string(*a.instance_id) +
                      " has inconsistent category (" +
                      std::to_string(it->second) + " vs " +
                      std::to_string(a.category_id) + " in annotation " +
                      std::to_string(a.id) + ")");
      }
    }
  }
}

const Category* Dataset::FindCategory(Id id) const {
  auto it = category_index_.find(id);
  return it == category_index_.end() ? nullptr : &categories_[it->second];
}

const VideoMeta* Dataset::FindVideo(Id id) const {
  auto it = video_index_.find(id);
  return it == video_index_.end() ? nullptr : &videos_[it->second];
}

const ImageRecord* Dataset::FindImage(Id id) const {
  auto it = image_index_.find(id);
  return it == image_index_.end() ? nullptr : &images_[it->second];
}

const BoxAnnotation* Dataset::FindAnnotation(Id id) const {
  auto it = annotation_index_.find(id);
  return it == annotation_index_.end() ? nullptr : &annotations_[it->second];
}

std::span<const std::size_t> Dataset::AnnotationIndicesForImage(
    Id image_id) const {
  auto it = image_index_.find(image_id);
  if (it == image_index_.end()) return {};
  return annotations_by_image_[it->second];
}

std::span<const std::size_t> Dataset::ImageIndicesForVideo(Id video_id) const {
  auto it = video_index_.find(video_id);
  if (it == video_index_.end()) return {};
  return images_by_video_[it->second];
}

std::optional<Id> Dataset::CategoryOfInstance(Id instance_id) const {
  auto it = instance_category_.find(instance_id);
  if (it == instance_category_.end()) return std::nullopt;
  return it->second;
}

std::vector<Id> Dataset::InstanceIds() const {
  std::vector<Id> ids;
  ids.reserve(instance_category_.size());
  for (const auto& [id, cat] : instance_category_) ids.push_back(id);
  return ids;
}

const VideoMeta* Dataset::VideoOfImage(Id image_id) const {
  const ImageRecord* img = FindImage(image_id);
  return img ? FindVideo(img->video_id) : nullptr;
}

Dataset ParseDataset(const Json& j) {
  if (!j.is_object()) ParseFail("<root>", "expected a JSON object");

  std::vector<Category> categories;
  const Json& jc = RequireArray(j, "categories");
  for (std::size_t i = 0; i < jc.size(); ++i) {
    RecordReader r(jc[i], Indexed("categories", i));
    Category c;
    c.id = r.RequireId("id");
    c.name = r.RequireString("name");
    c.parent_id = r.OptionalId("parent_id");
    c.extra = r.Extra();
    categories.push_back(std::move(c));
  }

  std::vector<VideoMeta> videos;
  const Json& jv = RequireArray(j, "videos");
  for (std::size_t i = 0; i < jv.size(); ++i) {
    RecordReader r(jv[i], Indexed("videos", i));
    VideoMeta v;
    v.id = r.RequireId("id");
    v.participant_id = r.OptionalId("participant_id");
    v.device = r.OptionalEnum<Device>("device");
    v.main_instance_id = r.RequireId("main_instance_id");
    v.main_category_id = r.RequireId("main_category_id");
    v.distance = r.OptionalEnum<Distance>("distance");
    v.motion = r.OptionalEnum<Motion>("motion");
    v.background = r.OptionalEnum<Background>("background");
    v.lighting = r.OptionalEnum<Lighting>("lighting");
    v.location = r.OptionalString("location").value_or("");
    v.extra = r.Extra();
    videos.push_back(std::move(v));
  }

  std::vector<ImageRecord> images;
  const Json& ji = RequireArray(j, "images");
  for (std::size_t i = 0; i < ji.size(); ++i) {
    RecordReader r(ji[i], Indexed("images", i));
    ImageRecord img;
    img.id = r.RequireId("id");
    img.video_id = r.RequireId("video_id");
    img.width = static_cast<int>(r.RequireId("width"));
    img.height = static_cast<int>(r.RequireId("height"));
    img.frame_index = r.OptionalId("frame_index").value_or(0);
    if (img.frame_index < 0) {
      ParseFail(Sub(r.path(), "frame_index"), "must be non-negative");
    }
    img.neg_category_ids = r.OptionalIdList("neg_category_ids");
    img.extra = r.Extra();
    images.push_back(std::move(img));
  }

  std::vector<BoxAnnotation> annotations;
  const Json& ja = RequireArray(j, "annotations");
  for (std::size_t i = 0; i < ja.size(); ++i) {
    RecordReader r(ja[i], Indexed("annotations", i));
    BoxAnnotation a;
    a.id = r.RequireId("id");
    a.image_id = r.RequireId("image_id");
    a.category_id = r.RequireId("category_id");
    a.instance_id = r.OptionalId("instance_id");
    if (a.instance_id && *a.instance_id <= 0) {
      ParseFail(Sub(r.path(), "instance_id"), "must be positive");
    }
    a.bbox = r.RequireBox("bbox");
    a.is_main = r.OptionalBool("is_main").value_or(false);
    a.annotator_id = r.OptionalId("annotator_id");
    a.extra = r.Extra();
    annotations.push_back(std::move(a));
  }

  return Dataset(std::move(categories), std::move(videos), std::move(images),
                 std::move(annotations));
}

Dataset ParseDatasetText(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    // e.byte is 1-based; count newlines before it for a line number.
    std::size_t end = std::min<std::size_t>(e.byte, text.size());
    std::size_t line =
        1 + std::count(text.begin(), text.begin() + (end > 0 ? end - 1 : 0),
                       '\n');
    ParseFail("line " + std::to_string(line), e.what());
  }
  return ParseDataset(j);
}

Json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  }
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t end = std::min<std::size_t>(e.byte, text.size());
    std::size_t line =
        1 + std::count(text.begin(), text.begin() + (end > 0 ? end - 1 : 0),
                       '\n');
    ParseFail(path.string() + ":" + std::to_string(line), e.what());
  }
}

void WriteTextFile(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  }
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path.string());
}

Dataset LoadDataset(const std::filesystem::path& path) {
  return ParseDataset(ReadJsonFile(path));
}

Json DatasetToJson(const Dataset& dataset) {
  Json out = Json::object();
  Json cats = Json::array();
  for (const auto& c : dataset.categories()) {
    Json r = Json::object();
    MergeExtra(r, c);
    r["id"] = c.id;
    r["name"] = c.name;
    if (c.parent_id) r["parent_id"] = *c.parent_id;
    cats.push_back(std::move(r));
  }
  Json videos = Json::array();
  for (const auto& v : dataset.videos()) {
    Json r = Json::object();
    MergeExtra(r, v);
    r["id"] = v.id;
    if (v.participant_id) r["participant_id"] = *v.participant_id;
    if (v.device) r["device"] = ToString(*v.device);
    r["main_instance_id"] = v.main_instance_id;
    r["main_category_id"] = v.main_category_id;
    if (v.distance) r["distance"] = ToString(*v.distance);
    if (v.motion) r["motion"] = ToString(*v.motion);
    if (v.background) r["background"] = ToString(*v.background);
    if (v.lighting) r["lighting"] = ToString(*v.lighting);
    if (!v.location.empty()) r["location"] = v.location;
    videos.push_back(std::move(r));
  }
  Json images = Json::array();
  for (const auto& img : dataset.images()) {
    Json r = Json::object();
    MergeExtra(r, img);
    r["id"] = img.id;
    r["video_id"] = img.video_id;
    r["width"] = img.width;
    r["height"] = img.height;
    r["frame_index"] = img.frame_index;
    r["neg_category_ids"] = img.neg_category_ids;
    images.push_back(std::move(r));
  }
  Json anns = Json::array();
  for (const auto& a : dataset.annotations()) {
    Json r = Json::object();
    MergeExtra(r, a);
    r["id"] = a.id;
    r["image_id"] = a.image_id;
    r["category_id"] = a.category_id;
    if (a.instance_id) r["instance_id"] = *a.instance_id;
    r["bbox"] = {a.bbox.x, a.bbox.y, a.bbox.w, a.bbox.h};
    r["is_main"] = a.is_main;
    if (a.annotator_id) r["annotator_id"] = *a.annotator_id;
    anns.push_back(std::move(r));
  }
  out["categories"] = std::move(cats);
  out["videos"] = std::move(videos);
  out["images"] = std::move(images);
  out["annotations"] = std::move(anns);
  return out;
}

void SaveDataset(const Dataset& dataset, const std::filesystem::path& path) {
  WriteTextFile(path, DatasetToJson(dataset).dump(1) + "\n");
}

std::vector<Violation> Validate(const Dataset& dataset) {
  std::vector<Violation> out;
  auto add = [&out](std::string code, std::string msg) {
    out.push_back({std::move(code), std::move(msg)});
  };

  for (const auto& c : dataset.categories()) {
    if (c.name.empty()) {
      add("EMPTY_CATEGORY_NAME",
          "category " + std::to_string(c.id) + " has an empty name");
    }
    // Walk parents; a chain longer than the table size means a cycle.
    std::optional<Id> p = c.parent_id;
    std::size_t steps = 0;
    while (p && steps <= dataset.categories().size()) {
      if (*p == c.id) break;
      const Category* parent = dataset.FindCategory(*p);
      p = parent ? parent->parent_id : std::nullopt;
      ++steps;
    }
    if (p && (*p == c.id || steps > dataset.categories().size())) {
      add("CATEGORY_CYCLE",
          "category " + std::to_string(c.id) + " has a cyclic parent chain");
    }
  }

  for (const auto& v : dataset.videos()) {
    auto cat = dataset.CategoryOfInstance(v.main_instance_id);
    if (cat && *cat != v.main_category_id) {
      add("MAIN_CATEGORY_MISMATCH",
          "video " + std::to_string(v.id) + " main instance " +
              std::to_string(v.main_instance_id) + " is annotated as category " +
              std::to_string(*cat) + ", not " +
              std::to_string(v.main_category_id));
    }
  }

  for (const auto& img : dataset.images()) {
    if (img.width <= 0 || img.height <= 0) {
      add("INVALID_IMAGE_SIZE",
          "image " + std::to_string(img.id) + " has non-positive size");
    }
    for (std::size_t ai : dataset.AnnotationIndicesForImage(img.id)) {
      const auto& a = dataset.annotations()[ai];
      if (std::binary_search(img.neg_category_ids.begin(),
                             img.neg_category_ids.end(), a.category_id)) {
        add("NEG_CONTRADICTION",
            "image " + std::to_string(img.id) + " lists category " +
                std::to_string(a.category_id) +
                " as negative but annotation " + std::to_string(a.id) +
                " has it");
      }
    }
  }

  constexpr double kTolerance = 0.5;
  for (const auto& a : dataset.annotations()) {
    if (a.bbox.IsDegenerate()) {
      add("DEGENERATE_BOX",
          "annotation " + std::to_string(a.id) + " has non-positive w or h");
      continue;
    }
    const ImageRecord* img = dataset.FindImage(a.image_id);
    if (img->width > 0 && img->height > 0 &&
        (a.bbox.x < -kTolerance || a.bbox.y < -kTolerance ||
         a.bbox.Right() > img->width + kTolerance ||
         a.bbox.Bottom() > img->height + kTolerance)) {
      add("BOX_OUT_OF_BOUNDS", "annotation " + std::to_string(a.id) +
                                   " lies outside image " +
                                   std::to_string(img->id));
    }
  }
  return out;
}

std::vector<Prediction> ParsePredictions(const Json& j, LabelMode mode,
                                         const Dataset& dataset,
                                         const std::set<Id>* target_registry) {
  if (!j.is_array()) ParseFail("<root>", "expected an array of predictions");
  const std::string_view label_key =
      mode == LabelMode::kCategory ? "category_id" : "instance_id";
  std::set<Id> instances;
  if (mode == LabelMode::kInstance && target_registry == nullptr) {
    auto ids = dataset.InstanceIds();
    instances.insert(ids.begin(), ids.end());
    target_registry = &instances;
  }

  std::vector<Prediction> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string path = Indexed("predictions", i);
    RecordReader r(j[i], path);
    Prediction p;
    p.image_id = r.RequireId("image_id");
    p.label = r.RequireId(label_key);
    p.bbox = r.RequireBox("bbox");
    p.score = r.RequireNumber("score");
    if (!std::isfinite(p.score)) ParseFail(path, "non-finite score");
    if (p.score < 0.0 || p.score > 1.0) ParseFail(path, "score out of range");
    if (p.bbox.IsDegenerate()) ParseFail(path, "degenerate box");
    if (!dataset.FindImage(p.image_id)) {
      IntegrityFail(path + " references unknown image " +
                    std::to_string(p.image_id));
    }
    if (mode == LabelMode::kCategory) {
      if (!dataset.FindCategory(p.label)) {
        IntegrityFail(path + " has unknown category label " +
                      std::to_string(p.label));
      }
    } else if (!target_registry->contains(p.label)) {
      IntegrityFail(path + " has instance label " + std::to_string(p.label) +
                    " absent from the target registry");
    }
    out.push_back(p);
  }
  return out;
}

std::vector<Prediction> LoadPredictions(const std::filesystem::path& path,
                                        LabelMode mode, const Dataset& dataset,
                                        const std::set<Id>* target_registry) {
  return ParsePredictions(ReadJsonFile(path), mode, dataset, target_registry);
}

Json PredictionsToJson(std::span<const Prediction> preds, LabelMode mode) {
  const char* label_key =
      mode == LabelMode::kCategory ? "category_id" : "instance_id";
  Json out = Json::array();
  for (const auto& p : preds) {
    out.push_back({{"image_id", p.image_id},
                   {label_key, p.label},
                   {"bbox", {p.bbox.x, p.bbox.y, p.bbox.w, p.bbox.h}},
                   {"score", p.score}});
  }
  return out;
}

}  // namespace egobench
