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

#ifndef EGOBENCH_TENSOR_H_
#define EGOBENCH_TENSOR_H_

#include <cstddef>
#include <span>
#include <vector>

namespace egobench {

// Dense C x H x W tensor of doubles, row-major with channel outermost.
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(int channels, int height, int width, double fill = 0.0);

  int channels() const { return channels_; }
  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return data_.size(); }
  std::size_t plane() const {
    return static_cast<std::size_t>(height_) * width_;
  }

  double& at(int c, int y, int x) { return data_[Offset(c, y, x)]; }
  double at(int c, int y, int x) const { return data_[Offset(c, y, x)]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  bool SameShape(const Tensor3& o) const {
    return channels_ == o.channels_ && height_ == o.height_ &&
           width_ == o.width_;
  }
  bool AllFinite() const;

 private:
  std::size_t Offset(int c, int y, int x) const {
    return (static_cast<std::size_t>(c) * height_ + y) * width_ + x;
  }

  int channels_ = 0;
  int height_ = 0;
  int width_ = 0;
  std::vector<double> data_;
};

using FeatureMap = Tensor3;

}  // namespace egobench

#endif  // EGOBENCH_TENSOR_H_
