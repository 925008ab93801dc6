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

#include "egobench/splits.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>

#include "egobench/error.h"
#include "egobench/stats.h"

namespace egobench {

namespace {

template <typename T>
void Shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = rng() % i;
    std::swap(v[i - 1], v[j]);
  }
}

struct VideoContent {
  Id id = 0;
  std::vector<std::size_t> images;  // indices into dataset.images()
  std::set<Id> instances;
  std::set<Id> categories;
};

std::vector<VideoContent> CollectVideos(const Dataset& ds) {
  std::vector<VideoContent> out;
  for (const auto& v : ds.videos()) {
    VideoContent vc;
    vc.id = v.id;
    for (std::size_t ii : ds.ImageIndicesForVideo(v.id)) {
      vc.images.push_back(ii);
      for (std::size_t ai : ds.AnnotationIndicesForImage(ds.images()[ii].id)) {
        const auto& a = ds.annotations()[ai];
        vc.categories.insert(a.category_id);
        if (a.instance_id) vc.instances.insert(*a.instance_id);
      }
    }
    if (!vc.images.empty()) out.push_back(std::move(vc));
  }
  std::sort(out.begin(), out.end(),
            [](const VideoContent& a, const VideoContent& b) { return a.id < b.id; });
  return out;
}

// Marks videos holding a withheld category as evaluation-only. Randomly
// drawn categories are skipped when they would leave no training video.
std::set<Id> WithholdCategories(const Dataset& ds, const SplitOptions& opt,
                                const std::vector<VideoContent>& videos,
                                std::vector<bool>& is_eval, std::mt19937_64& rng) {
  auto mark = [&videos](Id c, std::vector<bool>& flags) {
    for (std::size_t v = 0; v < videos.size(); ++v) {
      if (videos[v].categories.count(c)) flags[v] = true;
    }
  };
  std::set<Id> withheld;
  if (!opt.withheld_categories.empty()) {
    for (Id c : opt.withheld_categories) {
      if (!ds.FindCategory(c)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "withheld category " + std::to_string(c) + " does not exist");
      }
      withheld.insert(c);
      mark(c, is_eval);
    }
    return withheld;
  }
  std::set<Id> annotated;
  for (const auto& a : ds.annotations()) annotated.insert(a.category_id);
  std::vector<Id> cats(annotated.begin(), annotated.end());
  Shuffle(cats, rng);
  const auto n = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(opt.withheld_category_fraction *
                                               static_cast<double>(cats.size()))));
  for (Id c : cats) {
    if (withheld.size() >= n) break;
    std::vector<bool> next = is_eval;
    mark(c, next);
    if (std::find(next.begin(), next.end(), false) == next.end()) continue;
    is_eval = std::move(next);
    withheld.insert(c);
  }
  return withheld;
}

std::vector<Id> Sorted(std::vector<Id> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

std::set<Id> SplitSpec::TargetInstances() const {
  std::set<Id> out;
  for (const auto& t : targets) out.insert(t.instance_id);
  return out;
}

std::vector<Id> SplitSpec::EvaluationImages() const {
  std::vector<Id> out = val_images;
  out.insert(out.end(), test_images.begin(), test_images.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool SplitSpec::IsUnseen(Id instance_id) const {
  return std::find(unseen_instance_ids.begin(), unseen_instance_ids.end(),
                   instance_id) != unseen_instance_ids.end();
}

SplitSpec BuildSplits(const Dataset& dataset, SplitMode mode, std::uint64_t seed,
                      const SplitOptions& options) {
  if (!(options.eval_instance_fraction > 0.0 &&
        options.eval_instance_fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "eval_instance_fraction must be in (0, 1]");
  }
  std::mt19937_64 rng(seed);
  const std::vector<VideoContent> videos = CollectVideos(dataset);
  std::vector<bool> is_eval(videos.size(), false);

  std::set<Id> withheld;
  if (mode == SplitMode::kInstDet) {
    withheld = WithholdCategories(dataset, options, videos, is_eval, rng);
  }

  std::vector<Id> candidates;
  std::size_t forced = 0;
  for (Id inst : dataset.InstanceIds()) {
    if (withheld.count(*dataset.CategoryOfInstance(inst))) {
      ++forced;
    } else {
      candidates.push_back(inst);
    }
  }
  const std::size_t total = forced + candidates.size();
  const std::size_t wanted = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(options.eval_instance_fraction *
                                               static_cast<double>(total))));
  Shuffle(candidates, rng);
  std::size_t chosen = forced;
  for (Id inst : candidates) {
    if (chosen >= wanted) break;
    std::vector<bool> next = is_eval;
    for (std::size_t v = 0; v < videos.size(); ++v) {
      if (videos[v].instances.count(inst)) next[v] = true;
    }
    if (std::find(next.begin(), next.end(), false) == next.end()) continue;
    is_eval = std::move(next);
    ++chosen;
  }

  std::set<Id> train_instances;
  std::set<Id> train_categories;
  std::vector<std::size_t> eval_videos;
  bool has_train = false;
  for (std::size_t v = 0; v < videos.size(); ++v) {
    if (is_eval[v]) {
      eval_videos.push_back(v);
      continue;
    }
    has_train = true;
    train_instances.insert(videos[v].instances.begin(), videos[v].instances.end());
    train_categories.insert(videos[v].categories.begin(),
                            videos[v].categories.end());
  }
  if (!has_train) {
    throw Error(ErrorCode::kInvalidArgument,
                "dataset too small: no video is left for training");
  }

  // Best reference per evaluation instance: largest relative size, then
  // lowest annotation id.
  std::map<Id, const BoxAnnotation*> best;
  std::map<Id, double> best_size;
  for (std::size_t v : eval_videos) {
    for (std::size_t ii : videos[v].images) {
      const ImageRecord& img = dataset.images()[ii];
      for (std::size_t ai : dataset.AnnotationIndicesForImage(img.id)) {
        const BoxAnnotation& a = dataset.annotations()[ai];
        if (!a.instance_id || train_instances.count(*a.instance_id)) continue;
        const double size = RelativeSize(a.bbox, img);
        auto it = best.find(*a.instance_id);
        if (it == best.end() || size > best_size[*a.instance_id] ||
            (size == best_size[*a.instance_id] && a.id < it->second->id)) {
          best[*a.instance_id] = &a;
          best_size[*a.instance_id] = size;
        }
      }
    }
  }
  if (best.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "dataset too small: no instance can be held out of training");
  }

  SplitSpec spec;
  std::set<Id> reference_images;
  for (const auto& [inst, a] : best) {
    spec.targets.push_back({inst, a->image_id, a->id});
    reference_images.insert(a->image_id);
    if (!train_categories.count(a->category_id)) {
      spec.unseen_instance_ids.push_back(inst);
    }
  }

  for (std::size_t v = 0; v < videos.size(); ++v) {
    if (is_eval[v]) continue;
    for (std::size_t ii : videos[v].images) {
      spec.train_images.push_back(dataset.images()[ii].id);
    }
  }
  Shuffle(eval_videos, rng);
  const std::size_t num_val = (eval_videos.size() + 1) / 2;
  for (std::size_t k = 0; k < eval_videos.size(); ++k) {
    auto& dest = k < num_val ? spec.val_images : spec.test_images;
    for (std::size_t ii : videos[eval_videos[k]].images) {
      const Id id = dataset.images()[ii].id;
      if (!reference_images.count(id)) dest.push_back(id);
    }
  }
  spec.train_images = Sorted(std::move(spec.train_images));
  spec.val_images = Sorted(std::move(spec.val_images));
  spec.test_images = Sorted(std::move(spec.test_images));
  return spec;
}

std::set<Id> SeenCategories(const Dataset& dataset, const SplitSpec& spec) {
  std::set<Id> out;
  for (Id img : spec.train_images) {
    if (!dataset.FindImage(img)) continue;
    for (std::size_t ai : dataset.AnnotationIndicesForImage(img)) {
      out.insert(dataset.annotations()[ai].category_id);
    }
  }
  return out;
}

std::vector<Violation> VerifySplits(const Dataset& dataset,
                                    const SplitSpec& spec) {
  std::vector<Violation> out;
  auto add = [&out](const char* code, std::string msg) {
    out.push_back({code, std::move(msg)});
  };
  const std::string img_s = "image ";
  const std::string inst_s = "instance ";

  // Image membership. 0 train, 1 val, 2 test.
  std::map<Id, int> split_of;
  const std::vector<Id>* lists[] = {&spec.train_images, &spec.val_images,
                                    &spec.test_images};
  const char* names[] = {"train", "val", "test"};
  for (int s = 0; s < 3; ++s) {
    for (Id img : *lists[s]) {
      if (!dataset.FindImage(img)) {
        add("UNKNOWN_ID", img_s + std::to_string(img) + " in " + names[s] +
                              " does not exist");
        continue;
      }
      auto [it, inserted] = split_of.emplace(img, s);
      if (!inserted) {
        add("SPLIT_OVERLAP", img_s + std::to_string(img) + " is in both " +
                                 names[it->second] + " and " + names[s]);
      }
    }
  }

  std::set<Id> known_instances;
  for (Id i : dataset.InstanceIds()) known_instances.insert(i);

  // Instances per split.
  std::map<Id, Id> train_hit;  // instance -> first train image
  std::set<Id> eval_instances;
  for (const auto& [img, s] : split_of) {
    for (std::size_t ai : dataset.AnnotationIndicesForImage(img)) {
      const auto& a = dataset.annotations()[ai];
      if (!a.instance_id) continue;
      if (s == 0) {
        train_hit.emplace(*a.instance_id, img);
      } else {
        eval_instances.insert(*a.instance_id);
      }
    }
  }
  const std::set<Id> seen = SeenCategories(dataset, spec);

  std::set<Id> targets;
  for (const TargetRef& t : spec.targets) {
    const std::string who = inst_s + std::to_string(t.instance_id);
    if (!known_instances.count(t.instance_id)) {
      add("UNKNOWN_ID", who + " in targets does not exist");
      continue;
    }
    if (!targets.insert(t.instance_id).second) {
      add("DUPLICATE_REFERENCE", who + " has more than one reference");
      continue;
    }
    if (auto it = train_hit.find(t.instance_id); it != train_hit.end()) {
      add("LEAKED_INSTANCE", who + " is annotated in train image " +
                                 std::to_string(it->second));
    }
    const BoxAnnotation* a = dataset.FindAnnotation(t.annotation_id);
    if (!dataset.FindImage(t.image_id) || !a) {
      add("UNKNOWN_ID", who + " references missing image " +
                            std::to_string(t.image_id) + " or annotation " +
                            std::to_string(t.annotation_id));
      continue;
    }
    if (a->instance_id != t.instance_id || a->image_id != t.image_id) {
      add("BAD_REFERENCE", who + ": annotation " + std::to_string(a->id) +
                               " is not this instance on image " +
                               std::to_string(t.image_id));
    }
    if (auto it = split_of.find(t.image_id); it != split_of.end()) {
      if (it->second == 0) {
        add("BAD_REFERENCE", who + ": reference image " +
                                 std::to_string(t.image_id) + " is a train image");
      } else {
        add("REFERENCE_IN_EVAL", who + ": reference image " +
                                     std::to_string(t.image_id) + " is in " +
                                     names[it->second]);
      }
    }
    const bool expect_unseen =
        !seen.count(*dataset.CategoryOfInstance(t.instance_id));
    if (spec.IsUnseen(t.instance_id) != expect_unseen) {
      add("BAD_UNSEEN_FLAG", who + (expect_unseen
                                        ? " has an untrained category but is not flagged unseen"
                                        : " has a trained category but is flagged unseen"));
    }
  }

  for (Id inst : eval_instances) {
    if (!train_hit.count(inst) && !targets.count(inst)) {
      add("MISSING_REFERENCE", inst_s + std::to_string(inst) +
                                   " is evaluated but has no target reference");
    }
  }
  for (Id inst : spec.unseen_instance_ids) {
    if (!targets.count(inst)) {
      add("BAD_UNSEEN_FLAG",
          inst_s + std::to_string(inst) + " is flagged unseen but is not a target");
    }
  }
  return out;
}

std::optional<SplitMode> ParseSplitMode(std::string_view s) {
  if (s == "unified") return SplitMode::kUnified;
  if (s == "instdet") return SplitMode::kInstDet;
  return std::nullopt;
}

std::string_view ToString(SplitMode mode) {
  return mode == SplitMode::kUnified ? "unified" : "instdet";
}

Json SplitsToJson(const SplitSpec& spec) {
  Json targets = Json::array();
  for (const auto& t : spec.targets) {
    targets.push_back({{"instance_id", t.instance_id},
                       {"image_id", t.image_id},
                       {"annotation_id", t.annotation_id}});
  }
  return Json{{"train_images", spec.train_images},
              {"val_images", spec.val_images},
              {"test_images", spec.test_images},
              {"targets", std::move(targets)},
              {"unseen_instance_ids", spec.unseen_instance_ids}};
}

namespace {

std::vector<Id> IdArray(const Json& j, const char* key) {
  if (!j.contains(key)) return {};
  const Json& a = j[key];
  if (!a.is_array()) {
    throw Error(ErrorCode::kParseError,
                std::string("splits.") + key + ": expected an id array");
  }
  std::vector<Id> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number_integer()) {
      throw Error(ErrorCode::kParseError, std::string("splits.") + key + "[" +
                                              std::to_string(i) +
                                              "]: expected an integer id");
    }
    out.push_back(a[i].get<Id>());
  }
  return out;
}

}  // namespace

SplitSpec ParseSplits(const Json& j) {
  if (!j.is_object()) {
    throw Error(ErrorCode::kParseError, "splits: expected a JSON object");
  }
  SplitSpec spec;
  spec.train_images = IdArray(j, "train_images");
  spec.val_images = IdArray(j, "val_images");
  spec.test_images = IdArray(j, "test_images");
  spec.unseen_instance_ids = IdArray(j, "unseen_instance_ids");
  if (j.contains("targets")) {
    const Json& t = j["targets"];
    if (!t.is_array()) {
      throw Error(ErrorCode::kParseError, "splits.targets: expected an array");
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
      const Json& r = t[i];
      for (const char* key : {"instance_id", "image_id", "annotation_id"}) {
        if (!r.is_object() || !r.contains(key) || !r[key].is_number_integer()) {
          throw Error(ErrorCode::kParseError, "splits.targets[" +
                                                  std::to_string(i) + "]." +
                                                  key + ": expected an integer id");
        }
      }
      spec.targets.push_back({r["instance_id"].get<Id>(), r["image_id"].get<Id>(),
                              r["annotation_id"].get<Id>()});
    }
  }
  return spec;
}

SplitSpec LoadSplits(const std::filesystem::path& path) {
  return ParseSplits(ReadJsonFile(path));
}

void SaveSplits(const SplitSpec& spec, const std::filesystem::path& path) {
  WriteTextFile(path, SplitsToJson(spec).dump(2) + "\n");
}

}  // namespace egobench
