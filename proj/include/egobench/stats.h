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

#ifndef EGOBENCH_STATS_H_
#define EGOBENCH_STATS_H_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "egobench/schema.h"

namespace egobench {

// sqrt(box area / image area). Throws Error(kInvalidArgument) for an image
// without positive size.
double RelativeSize(const Box& box, const ImageRecord& image);

// Longer box side over shorter image edge; the quantity behind the distance
// tags and the size buckets.
double RelativeScale(const Box& box, const ImageRecord& image);

struct StatsOptions {
  int center_bins = 50;  // per axis
  int size_bins = 40;    // over [0, 1]; larger sizes land in the last bin
};

// Row-major center_bins x center_bins counts; cell [row][col] covers
// normalized y in row, x in col.
struct Histogram2D {
  int bins = 0;
  std::vector<std::int64_t> counts;

  std::int64_t at(int row, int col) const { return counts[row * bins + col]; }
  std::int64_t Total() const;
};

struct CategoryCounts {
  std::int64_t instances = 0;
  std::int64_t annotations = 0;
  std::int64_t images = 0;
};

struct StatsReport {
  std::int64_t num_images = 0;
  std::int64_t num_annotations = 0;
  std::int64_t num_instances = 0;
  std::int64_t main_instances = 0;       // instances that are some video's main object
  std::int64_t secondary_instances = 0;  // every other annotated instance
  std::int64_t main_annotations = 0;
  std::int64_t secondary_annotations = 0;
  // Distinct instances per image, averaged over all images.
  double mean_instances_per_image = 0.0;
  // Distinct images per instance, averaged over annotated instances.
  double mean_images_per_instance = 0.0;
  // Sum over images of distinct annotated instances.
  std::int64_t image_instance_pairs = 0;

  std::map<Id, CategoryCounts> per_category;  // every category, even empty ones
  Histogram2D centers_all;
  Histogram2D centers_main;
  std::vector<std::int64_t> size_hist;  // relative size
  // "field" -> value -> number of videos, e.g. "lighting" -> "dim" -> 4.
  std::map<std::string, std::map<std::string, std::int64_t>> metadata;
};

StatsReport ComputeStats(const Dataset& dataset, const StatsOptions& options = {});

std::string CategoryCountsCsv(const Dataset& dataset, const StatsReport& r);
std::string CentersCsv(const Histogram2D& h);
std::string SizeHistogramCsv(const StatsReport& r);
std::string MetadataCsv(const StatsReport& r);
std::string SummaryCsv(const StatsReport& r);

// Writes categories.csv, centers_all.csv, centers_main.csv, sizes.csv,
// metadata.csv and summary.csv into `dir`, creating it if needed.
void WriteStatsCsv(const Dataset& dataset, const StatsReport& r,
                   const std::filesystem::path& dir);

}  // namespace egobench

#endif  // EGOBENCH_STATS_H_
