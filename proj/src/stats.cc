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

#include "egobench/stats.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "egobench/error.h"
#include "text_util.h"

namespace egobench {

using internal::CsvField;
using internal::FormatDouble;

namespace {

void CheckImage(const ImageRecord& image) {
  if (image.width <= 0 || image.height <= 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "image " + std::to_string(image.id) + " has no positive size");
  }
}

int Bin(double v, int bins) {
  const int b = static_cast<int>(std::floor(v * bins));
  return std::clamp(b, 0, bins - 1);
}

Histogram2D MakeHistogram(int bins) {
  Histogram2D h;
  h.bins = bins;
  h.counts.assign(static_cast<std::size_t>(bins) * bins, 0);
  return h;
}

}  // namespace

double RelativeSize(const Box& box, const ImageRecord& image) {
  CheckImage(image);
  return std::sqrt(box.Area() / (static_cast<double>(image.width) * image.height));
}

double RelativeScale(const Box& box, const ImageRecord& image) {
  CheckImage(image);
  return std::max(box.w, box.h) / std::min(image.width, image.height);
}

std::int64_t Histogram2D::Total() const {
  return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

StatsReport ComputeStats(const Dataset& dataset, const StatsOptions& options) {
  if (options.center_bins <= 0 || options.size_bins <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "histogram bins must be positive");
  }
  StatsReport r;
  r.num_images = static_cast<std::int64_t>(dataset.images().size());
  r.num_annotations = static_cast<std::int64_t>(dataset.annotations().size());
  r.centers_all = MakeHistogram(options.center_bins);
  r.centers_main = MakeHistogram(options.center_bins);
  r.size_hist.assign(options.size_bins, 0);
  for (const auto& c : dataset.categories()) r.per_category[c.id];

  std::set<Id> main_ids;
  for (const auto& v : dataset.videos()) main_ids.insert(v.main_instance_id);

  std::map<Id, std::set<Id>> images_of_instance;
  std::map<Id, std::set<Id>> images_of_category;
  for (const auto& img : dataset.images()) {
    std::set<Id> instances_here;
    for (std::size_t ai : dataset.AnnotationIndicesForImage(img.id)) {
      const BoxAnnotation& a = dataset.annotations()[ai];
      CategoryCounts& cc = r.per_category[a.category_id];
      ++cc.annotations;
      images_of_category[a.category_id].insert(img.id);
      if (a.instance_id) {
        instances_here.insert(*a.instance_id);
        images_of_instance[*a.instance_id].insert(img.id);
      }

      const double cx = a.bbox.CenterX() / img.width;
      const double cy = a.bbox.CenterY() / img.height;
      const int row = Bin(cy, options.center_bins);
      const int col = Bin(cx, options.center_bins);
      ++r.centers_all.counts[row * options.center_bins + col];
      if (a.is_main) {
        ++r.centers_main.counts[row * options.center_bins + col];
        ++r.main_annotations;
      } else {
        ++r.secondary_annotations;
      }
      ++r.size_hist[Bin(RelativeSize(a.bbox, img), options.size_bins)];
    }
    r.image_instance_pairs += static_cast<std::int64_t>(instances_here.size());
  }

  for (const auto& [cat, imgs] : images_of_category) {
    r.per_category[cat].images = static_cast<std::int64_t>(imgs.size());
  }
  std::int64_t instance_image_pairs = 0;
  for (const auto& [inst, imgs] : images_of_instance) {
    ++r.per_category[*dataset.CategoryOfInstance(inst)].instances;
    instance_image_pairs += static_cast<std::int64_t>(imgs.size());
    if (main_ids.count(inst)) {
      ++r.main_instances;
    } else {
      ++r.secondary_instances;
    }
  }
  r.num_instances = static_cast<std::int64_t>(images_of_instance.size());
  if (r.num_images > 0) {
    r.mean_instances_per_image =
        static_cast<double>(r.image_instance_pairs) / r.num_images;
  }
  if (r.num_instances > 0) {
    r.mean_images_per_instance =
        static_cast<double>(instance_image_pairs) / r.num_instances;
  }

  auto tag = [&r](const char* field, auto value) {
    ++r.metadata[field][value ? std::string(ToString(*value)) : "unknown"];
  };
  for (const auto& v : dataset.videos()) {
    tag("device", v.device);
    tag("distance", v.distance);
    tag("motion", v.motion);
    tag("background", v.background);
    tag("lighting", v.lighting);
    ++r.metadata["location"][v.location.empty() ? "unknown" : v.location];
  }
  return r;
}

std::string CategoryCountsCsv(const Dataset& dataset, const StatsReport& r) {
  std::ostringstream out;
  out << "category_id,name,instances,annotations,images\n";
  for (const auto& [id, cc] : r.per_category) {
    const Category* c = dataset.FindCategory(id);
    out << id << ',' << CsvField(c ? c->name : "") << ',' << cc.instances << ','
        << cc.annotations << ',' << cc.images << '\n';
  }
  return out.str();
}

std::string CentersCsv(const Histogram2D& h) {
  std::ostringstream out;
  out << "y_bin,x_bin,y_center,x_center,count\n";
  for (int row = 0; row < h.bins; ++row) {
    for (int col = 0; col < h.bins; ++col) {
      out << row << ',' << col << ',' << FormatDouble((row + 0.5) / h.bins)
          << ',' << FormatDouble((col + 0.5) / h.bins) << ',' << h.at(row, col)
          << '\n';
    }
  }
  return out.str();
}

std::string SizeHistogramCsv(const StatsReport& r) {
  std::ostringstream out;
  const auto bins = static_cast<int>(r.size_hist.size());
  out << "bin,lo,hi,count\n";
  for (int b = 0; b < bins; ++b) {
    out << b << ',' << FormatDouble(static_cast<double>(b) / bins) << ','
        << FormatDouble(static_cast<double>(b + 1) / bins) << ','
        << r.size_hist[b] << '\n';
  }
  return out.str();
}

std::string MetadataCsv(const StatsReport& r) {
  std::ostringstream out;
  out << "field,value,videos\n";
  for (const auto& [field, values] : r.metadata) {
    for (const auto& [value, n] : values) {
      out << field << ',' << CsvField(value) << ',' << n << '\n';
    }
  }
  return out.str();
}

std::string SummaryCsv(const StatsReport& r) {
  std::ostringstream out;
  out << "metric,value\n"
      << "images," << r.num_images << '\n'
      << "annotations," << r.num_annotations << '\n'
      << "instances," << r.num_instances << '\n'
      << "main_instances," << r.main_instances << '\n'
      << "secondary_instances," << r.secondary_instances << '\n'
      << "main_annotations," << r.main_annotations << '\n'
      << "secondary_annotations," << r.secondary_annotations << '\n'
      << "image_instance_pairs," << r.image_instance_pairs << '\n'
      << "mean_instances_per_image," << FormatDouble(r.mean_instances_per_image)
      << '\n'
      << "mean_images_per_instance," << FormatDouble(r.mean_images_per_instance)
      << '\n';
  return out.str();
}

void WriteStatsCsv(const Dataset& dataset, const StatsReport& r,
                   const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw Error(ErrorCode::kIoError,
                "cannot create " + dir.string() + ": " + ec.message());
  }
  WriteTextFile(dir / "categories.csv", CategoryCountsCsv(dataset, r));
  WriteTextFile(dir / "centers_all.csv", CentersCsv(r.centers_all));
  WriteTextFile(dir / "centers_main.csv", CentersCsv(r.centers_main));
  WriteTextFile(dir / "sizes.csv", SizeHistogramCsv(r));
  WriteTextFile(dir / "metadata.csv", MetadataCsv(r));
  WriteTextFile(dir / "summary.csv", SummaryCsv(r));
}

}  // namespace egobench
