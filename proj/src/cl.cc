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

#include <map>
#include <set>

#include "egobench/error.h"
#include "egobench/eval.h"

namespace egobench {

namespace {

std::vector<Id> IdList(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) return {};
  const Json& a = j[key];
  if (!a.is_array()) {
    throw Error(ErrorCode::kParseError, where + "." + key + ": expected an id array");
  }
  std::vector<Id> out;
  for (const auto& v : a) {
    if (!v.is_number_integer()) {
      throw Error(ErrorCode::kParseError, where + "." + key + ": expected integer ids");
    }
    out.push_back(v.get<Id>());
  }
  return out;
}

std::filesystem::path Resolve(const Json& v, const std::filesystem::path& base,
                              const std::string& where) {
  if (!v.is_string()) {
    throw Error(ErrorCode::kParseError, where + ": expected a path string");
  }
  std::filesystem::path p = v.get<std::string>();
  return p.is_absolute() || base.empty() ? p : base / p;
}

void CheckDisjoint(const ExperienceStream& stream,
                   std::vector<Id> Experience::*field, const char* what) {
  std::map<Id, std::size_t> owner;
  for (std::size_t i = 0; i < stream.experiences.size(); ++i) {
    for (Id id : stream.experiences[i].*field) {
      auto [it, inserted] = owner.emplace(id, i);
      if (!inserted && it->second != i) {
        throw Error(ErrorCode::kInvalidArgument,
                    std::string(what) + " " + std::to_string(id) +
                        " appears in experiences " + std::to_string(it->second) +
                        " and " + std::to_string(i));
      }
    }
  }
}

}  // namespace

std::string_view ToString(StreamMode mode) {
  return mode == StreamMode::kClassIncrementalInstance
             ? "class_incremental_instance"
             : "data_incremental_category";
}

std::optional<StreamMode> ParseStreamMode(std::string_view s) {
  if (s == "class_incremental_instance") return StreamMode::kClassIncrementalInstance;
  if (s == "data_incremental_category") return StreamMode::kDataIncrementalCategory;
  return std::nullopt;
}

void ValidateStream(const ExperienceStream& stream) {
  if (stream.experiences.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "stream has no experiences");
  }
  if (stream.mode == StreamMode::kClassIncrementalInstance) {
    CheckDisjoint(stream, &Experience::instance_ids, "instance");
  } else {
    CheckDisjoint(stream, &Experience::image_ids, "image");
  }
}

ExperienceStream ParseStream(const Json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) {
    throw Error(ErrorCode::kParseError, "stream: expected a JSON object");
  }
  ExperienceStream s;
  if (!j.contains("mode") || !j["mode"].is_string()) {
    throw Error(ErrorCode::kParseError, "stream.mode: expected a string");
  }
  const auto mode = ParseStreamMode(j["mode"].get<std::string>());
  if (!mode) {
    throw Error(ErrorCode::kParseError,
                "stream.mode: unknown mode '" + j["mode"].get<std::string>() + "'");
  }
  s.mode = *mode;
  if (j.contains("dataset")) s.dataset = Resolve(j["dataset"], base_dir, "stream.dataset");
  if (j.contains("splits")) s.splits = Resolve(j["splits"], base_dir, "stream.splits");
  if (j.contains("test_images")) s.test_images = IdList(j, "test_images", "stream");
  if (!j.contains("experiences") || !j["experiences"].is_array()) {
    throw Error(ErrorCode::kParseError, "stream.experiences: expected an array");
  }
  const Json& exps = j["experiences"];
  for (std::size_t i = 0; i < exps.size(); ++i) {
    const std::string where = "stream.experiences[" + std::to_string(i) + "]";
    const Json& e = exps[i];
    if (!e.is_object()) {
      throw Error(ErrorCode::kParseError, where + ": expected an object");
    }
    Experience x;
    x.image_ids = IdList(e, "image_ids", where);
    x.instance_ids = IdList(e, "instance_ids", where);
    x.category_ids = IdList(e, "category_ids", where);
    if (e.contains("map")) {
      if (!e["map"].is_number()) {
        throw Error(ErrorCode::kParseError, where + ".map: expected a number");
      }
      x.map = e["map"].get<double>();
    }
    if (e.contains("predictions")) {
      x.predictions = Resolve(e["predictions"], base_dir, where + ".predictions");
    }
    s.experiences.push_back(std::move(x));
  }
  return s;
}

ExperienceStream LoadStream(const std::filesystem::path& path) {
  return ParseStream(ReadJsonFile(path), path.parent_path());
}

double ExperienceAveragePrecision(std::span<const double> maps) {
  if (maps.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "EAP needs at least one experience");
  }
  double sum = 0.0;
  for (double m : maps) sum += m;
  return sum / static_cast<double>(maps.size());
}

ClResult ClEvaluate(const ExperienceStream& stream,
                    std::span<const std::optional<std::vector<Prediction>>> predictions,
                    const Dataset* dataset, const SplitSpec* spec,
                    const EvalConfig& cfg) {
  ValidateStream(stream);
  EvalConfig test_cfg = cfg;
  if (stream.test_images) {
    test_cfg.image_subset = stream.test_images;
  } else if (spec) {
    test_cfg.image_subset = spec->test_images;
  }

  ClResult r;
  for (std::size_t i = 0; i < stream.experiences.size(); ++i) {
    const Experience& e = stream.experiences[i];
    if (e.map) {
      r.map.push_back(*e.map);
      continue;
    }
    if (i >= predictions.size() || !predictions[i]) {
      throw Error(ErrorCode::kInvalidArgument,
                  "experience " + std::to_string(i) +
                      " has neither a map value nor predictions");
    }
    if (!dataset) {
      throw Error(ErrorCode::kInvalidArgument,
                  "scoring predictions requires a dataset");
    }
    EvalReport report;
    if (stream.mode == StreamMode::kClassIncrementalInstance) {
      if (!spec) {
        throw Error(ErrorCode::kInvalidArgument,
                    "instance streams require a split spec");
      }
      report = InstanceAp(*dataset, *predictions[i], *spec, test_cfg);
    } else {
      report = FederatedApCategory(*dataset, *predictions[i], test_cfg);
    }
    r.map.push_back(100.0 * report.ap);
  }
  r.eap = ExperienceAveragePrecision(r.map);
  return r;
}

Json ClResultToJson(const ClResult& r, StreamMode mode) {
  return Json{{"mode", std::string(ToString(mode))}, {"map", r.map}, {"EAP", r.eap}};
}

}  // namespace egobench
