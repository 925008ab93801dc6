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

#include "test_util.h"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>

namespace egobench::testing {

Category& DatasetBuilder::AddCategory(Id id) {
  Category c;
  c.id = id;
  c.name = "category_" + std::to_string(id);
  categories.push_back(c);
  return categories.back();
}

VideoMeta& DatasetBuilder::AddVideo(Id id, Id main_instance, Id main_category) {
  VideoMeta v;
  v.id = id;
  v.main_instance_id = main_instance;
  v.main_category_id = main_category;
  videos.push_back(v);
  return videos.back();
}

ImageRecord& DatasetBuilder::AddImage(Id id, Id video_id, int width, int height) {
  ImageRecord img;
  img.id = id;
  img.video_id = video_id;
  img.width = width;
  img.height = height;
  images.push_back(img);
  return images.back();
}

BoxAnnotation& DatasetBuilder::AddBox(Id image_id, Id category_id, const Box& box,
                                      std::optional<Id> instance_id) {
  BoxAnnotation a;
  a.id = static_cast<Id>(annotations.size()) + 1;
  a.image_id = image_id;
  a.category_id = category_id;
  a.bbox = box;
  a.instance_id = instance_id;
  annotations.push_back(a);
  return annotations.back();
}

Dataset DatasetBuilder::Build() const {
  return Dataset(categories, videos, images, annotations);
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  std::random_device rd;
  const auto base = std::filesystem::temp_directory_path();
  for (;;) {
    path_ = base / ("egobench_test_" + std::to_string(rd()) + "_" +
                    std::to_string(counter++));
    if (std::filesystem::create_directory(path_)) break;
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::filesystem::path TestData(const std::string& name) {
  return std::filesystem::path(EGOBENCH_TESTDATA_DIR) / name;
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

namespace {

int Uniform(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

bool Coin(std::mt19937_64& rng, double p) {
  return std::bernoulli_distribution(p)(rng);
}

double Quarter(std::mt19937_64& rng, int lo, int hi) {
  return Uniform(rng, lo * 4, hi * 4) / 4.0;
}

Box QuarterBox(std::mt19937_64& rng) {
  return Box{Quarter(rng, 0, 60), Quarter(rng, 0, 60), Quarter(rng, 4, 40),
             Quarter(rng, 4, 40)};
}

Box Jitter(std::mt19937_64& rng, const Box& b) {
  Box out = b;
  out.x += Quarter(rng, -3, 3);
  out.y += Quarter(rng, -3, 3);
  out.w = std::max(1.0, out.w + Quarter(rng, -3, 3));
  out.h = std::max(1.0, out.h + Quarter(rng, -3, 3));
  return out;
}

}  // namespace

MicroCase RandomMicroCase(std::mt19937_64& rng) {
  const int num_images = Uniform(rng, 1, 5);
  const int num_categories = Uniform(rng, 1, 4);
  DatasetBuilder b;
  for (int c = 1; c <= num_categories; ++c) b.AddCategory(c);
  b.AddVideo(1, 1, 1);
  for (int i = 1; i <= num_images; ++i) {
    b.AddImage(i, 1, 100, 100);
    for (int c = 1; c <= num_categories; ++c) {
      if (Coin(rng, 0.4)) {
        const int n = Uniform(rng, 1, 2);
        for (int k = 0; k < n; ++k) b.AddBox(i, c, QuarterBox(rng));
      }
    }
  }
  if (b.annotations.empty()) {
    b.AddBox(Uniform(rng, 1, num_images), Uniform(rng, 1, num_categories),
             QuarterBox(rng));
  }
  for (auto& img : b.images) {
    for (int c = 1; c <= num_categories; ++c) {
      const bool annotated = std::any_of(
          b.annotations.begin(), b.annotations.end(), [&](const BoxAnnotation& a) {
            return a.image_id == img.id && a.category_id == c;
          });
      if (!annotated && Coin(rng, 0.3)) img.neg_category_ids.push_back(c);
    }
  }

  MicroCase mc;
  const int num_preds = Uniform(rng, 0, 6);
  for (int p = 0; p < num_preds; ++p) {
    Prediction pred;
    pred.image_id = Uniform(rng, 1, num_images);
    std::vector<const BoxAnnotation*> here;
    for (const auto& a : b.annotations) {
      if (a.image_id == pred.image_id) here.push_back(&a);
    }
    if (!here.empty() && Coin(rng, 0.6)) {
      const BoxAnnotation* a = here[Uniform(rng, 0, static_cast<int>(here.size()) - 1)];
      pred.label = Coin(rng, 0.85) ? a->category_id : Uniform(rng, 1, num_categories);
      pred.bbox = Coin(rng, 0.3) ? a->bbox : Jitter(rng, a->bbox);
    } else {
      pred.label = Uniform(rng, 1, num_categories);
      pred.bbox = QuarterBox(rng);
    }
    pred.score = Uniform(rng, 1, 19) / 20.0;
    mc.predictions.push_back(pred);
  }
  mc.dataset = b.Build();
  return mc;
}

Dataset RandomToyDataset(std::mt19937_64& rng) {
  const int num_categories = Uniform(rng, 2, 4);
  const int num_instances = Uniform(rng, 3, 8);
  const int num_videos = num_instances + Uniform(rng, 1, 4);
  DatasetBuilder b;
  for (int c = 1; c <= num_categories; ++c) b.AddCategory(c);
  std::vector<Id> category_of(num_instances + 1);
  for (int i = 1; i <= num_instances; ++i) {
    category_of[i] = Uniform(rng, 1, num_categories);
  }
  auto box = [&rng] {
    const double w = Uniform(rng, 20, 300);
    const double h = Uniform(rng, 20, 200);
    return Box{static_cast<double>(Uniform(rng, 0, 640 - static_cast<int>(w))),
               static_cast<double>(Uniform(rng, 0, 480 - static_cast<int>(h))), w, h};
  };
  Id next_image = 1;
  for (int v = 1; v <= num_videos; ++v) {
    const int main = (v - 1) % num_instances + 1;
    b.AddVideo(v, main, category_of[main]);
    const int frames = Uniform(rng, 1, 3);
    for (int f = 0; f < frames; ++f) {
      const Id img = next_image++;
      b.AddImage(img, v, 640, 480).frame_index = f;
      b.AddBox(img, category_of[main], box(), main).is_main = true;
      for (int i = 1; i <= num_instances; ++i) {
        if (i != main && Coin(rng, 0.15)) b.AddBox(img, category_of[i], box(), i);
      }
    }
  }
  return b.Build();
}

MicroCase RandomLargeCase(std::uint64_t seed, int images, int categories,
                          int predictions_per_image) {
  std::mt19937_64 rng(seed);
  DatasetBuilder b;
  for (int c = 1; c <= categories; ++c) b.AddCategory(c);
  const int num_videos = std::max(1, images / 10);
  for (int v = 1; v <= num_videos; ++v) b.AddVideo(v, v, (v - 1) % categories + 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto box = [&] {
    const double w = 10.0 + 300.0 * unit(rng);
    const double h = 10.0 + 300.0 * unit(rng);
    return Box{(640.0 - w) * unit(rng), (480.0 - h) * unit(rng), w, h};
  };
  MicroCase mc;
  for (int i = 1; i <= images; ++i) {
    auto& img = b.AddImage(i, (i - 1) % num_videos + 1, 640, 480);
    std::vector<int> present;
    const int num_gt = Uniform(rng, 0, 4);
    std::vector<Box> gts;
    std::vector<Id> labels;
    for (int k = 0; k < num_gt; ++k) {
      const Id c = Uniform(rng, 1, categories);
      gts.push_back(box());
      labels.push_back(c);
    }
    for (int c = 1; c <= categories; ++c) {
      if (std::find(labels.begin(), labels.end(), c) == labels.end() &&
          Coin(rng, 0.2)) {
        img.neg_category_ids.push_back(c);
      }
    }
    for (int k = 0; k < num_gt; ++k) b.AddBox(i, labels[k], gts[k]);
    for (int p = 0; p < predictions_per_image; ++p) {
      Prediction pred;
      pred.image_id = i;
      if (num_gt > 0 && Coin(rng, 0.5)) {
        const int k = Uniform(rng, 0, num_gt - 1);
        pred.label = Coin(rng, 0.8) ? labels[k] : Uniform(rng, 1, categories);
        const Box& g = gts[k];
        pred.bbox = Box{g.x + 20.0 * (unit(rng) - 0.5), g.y + 20.0 * (unit(rng) - 0.5),
                        std::max(1.0, g.w * (0.8 + 0.4 * unit(rng))),
                        std::max(1.0, g.h * (0.8 + 0.4 * unit(rng)))};
      } else {
        pred.label = Uniform(rng, 1, categories);
        pred.bbox = box();
      }
      pred.score = unit(rng);
      mc.predictions.push_back(pred);
    }
  }
  mc.dataset = b.Build();
  return mc;
}

}  // namespace egobench::testing
