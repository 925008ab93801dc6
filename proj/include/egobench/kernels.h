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

#ifndef EGOBENCH_KERNELS_H_
#define EGOBENCH_KERNELS_H_

#include <array>
#include <span>
#include <vector>

#include "egobench/geometry.h"
#include "egobench/tensor.h"

// Forward and backward passes of the target-aware instance detection head.
// Every function is pure: parameters are passed in explicitly and nothing is
// cached between calls. Backward functions return vector-Jacobian products
// with respect to the inputs for a given upstream gradient.

namespace egobench {

// ---------------------------------------------------------------------------
// Feature modulation: out[c,y,x] = (sum_k t_loc[k] * f[k,y,x]) * f[c,y,x].

Tensor3 Modulate(const Tensor3& f, std::span<const double> t_loc);

struct ModulateGrad {
  Tensor3 d_f;
  std::vector<double> d_t_loc;
};
ModulateGrad ModulateBackward(const Tensor3& f, std::span<const double> t_loc,
                              const Tensor3& d_out);

// ---------------------------------------------------------------------------
// Score module: a stack of 3x3 convolutions (zero padding 1, stride 1) with
// ReLU between layers and none after the last. Reduces channels to 1.

struct ConvLayer {
  int in_channels = 0;
  int out_channels = 0;
  std::vector<double> weights;  // [out][in][3][3]
  std::vector<double> bias;     // [out]

  static ConvLayer Zeros(int in_channels, int out_channels);
  double& W(int o, int i, int ky, int kx) {
    return weights[((static_cast<std::size_t>(o) * in_channels + i) * 3 + ky) *
                       3 + kx];
  }
  double W(int o, int i, int ky, int kx) const {
    return weights[((static_cast<std::size_t>(o) * in_channels + i) * 3 + ky) *
                       3 + kx];
  }
};

struct ScoreStack {
  std::vector<ConvLayer> layers;

  // Channel counts from input to output, e.g. {256, 128, 64, 32, 1}.
  static ScoreStack Zeros(std::span<const int> schedule);
  std::vector<int> Schedule() const;
};

inline constexpr std::array<int, 5> kDefaultScoreSchedule{256, 128, 64, 32, 1};

// Returns a 1 x H x W score map.
Tensor3 ScoreForward(const Tensor3& f_mod, const ScoreStack& stack);

// Gradient with respect to f_mod for an upstream 1 x H x W gradient.
Tensor3 ScoreBackward(const Tensor3& f_mod, const ScoreStack& stack,
                      const Tensor3& d_score);

// Signs of every hidden pre-activation, flattened. Identifies which linear
// piece of the network an input falls on.
std::vector<int> ScoreActivationPattern(const Tensor3& f_mod,
                                        const ScoreStack& stack);

// ---------------------------------------------------------------------------
// Softmax over the flattened score map and the expected grid coordinate.

struct CenterPrediction {
  int height = 0;
  int width = 0;
  std::vector<double> p;  // row-major, sums to 1
  double c_y = 0.0;
  double c_x = 0.0;
};

CenterPrediction SoftmaxCenter(const Tensor3& score_map);

// Gradient with respect to the score map given upstream gradients on c_y,
// c_x and (optionally, may be empty) on p.
Tensor3 SoftmaxCenterBackward(const CenterPrediction& forward, double d_cy,
                              double d_cx, std::span<const double> d_p = {});

// ---------------------------------------------------------------------------
// Bilinear sampling at continuous grid coordinates, 0 <= y <= H-1 and
// 0 <= x <= W-1, where integer coordinates hit grid values exactly.

std::vector<double> BilinearSample(const Tensor3& f, double y, double x);

struct SampleGrad {
  Tensor3 d_f;
  double d_y = 0.0;
  double d_x = 0.0;
};
SampleGrad BilinearSampleBackward(const Tensor3& f, double y, double x,
                                  std::span<const double> d_out);

// ---------------------------------------------------------------------------
// Box refinement MLP: C -> hidden -> hidden -> 4 with ReLU on both hidden
// layers and on the two size outputs.

struct DenseLayer {
  int in_features = 0;
  int out_features = 0;
  std::vector<double> weights;  // [out][in]
  std::vector<double> bias;     // [out]

  static DenseLayer Zeros(int in_features, int out_features);
};

struct RefineMlp {
  DenseLayer hidden1;
  DenseLayer hidden2;
  DenseLayer output;

  static RefineMlp Zeros(int channels, int hidden = 256);
};

struct BoxPrediction {
  double delta_cy = 0.0;
  double delta_cx = 0.0;
  double s_y = 0.0;
  double s_x = 0.0;
  double confidence = 0.0;
  // Refined center: sampled center plus offsets, grid coordinates.
  double center_y = 0.0;
  double center_x = 0.0;
};

// Raw MLP outputs (delta_cy, delta_cx, s_y, s_x) before the size ReLU.
std::array<double, 4> RefineMlpRaw(std::span<const double> feature,
                                   const RefineMlp& mlp);

BoxPrediction RefineBox(const Tensor3& f, double c_y, double c_x,
                        const RefineMlp& mlp);
BoxPrediction RefineBox(const Tensor3& f, const CenterPrediction& center,
                        const RefineMlp& mlp);

struct BoxPredictionGrad {
  double d_delta_cy = 0.0;
  double d_delta_cx = 0.0;
  double d_s_y = 0.0;
  double d_s_x = 0.0;
  double d_center_y = 0.0;
  double d_center_x = 0.0;
};

struct RefineGrad {
  Tensor3 d_f;
  double d_c_y = 0.0;
  double d_c_x = 0.0;
};
RefineGrad RefineBoxBackward(const Tensor3& f, double c_y, double c_x,
                             const RefineMlp& mlp,
                             const BoxPredictionGrad& upstream);

// Hidden-unit and size-output signs plus the bilinear cell; the piece of the
// piecewise-smooth refinement an input falls on.
std::vector<int> RefineActivationPattern(const Tensor3& f, double c_y,
                                         double c_x, const RefineMlp& mlp);

// ---------------------------------------------------------------------------
// ROIAlign. `box` is in grid units where cell (i, j) covers [j, j+1) x
// [i, i+1), so its value sits at (i + 0.5, j + 0.5). Each of the s x s bins
// averages sampling_ratio^2 bilinear samples at the regular sub-grid points.
// Samples more than one cell outside the map contribute 0; others clamp to
// the border.

Tensor3 RoiAlign(const Tensor3& f, const Box& box, int out_size,
                 int sampling_ratio = 2);

// Box (grid units, as RoiAlign expects) around a refined prediction.
Box PredictedGridBox(const BoxPrediction& pred);

// ---------------------------------------------------------------------------
// Classification confidence: sigmoid(sum(roi_feat * t_cls)).

double ClsConfidence(const Tensor3& roi_feat, const Tensor3& t_cls);

struct ClsGrad {
  Tensor3 d_roi_feat;
  Tensor3 d_t_cls;
};
ClsGrad ClsConfidenceBackward(const Tensor3& roi_feat, const Tensor3& t_cls,
                              double d_confidence);

// ---------------------------------------------------------------------------
// Target registration.

struct TargetDescriptor {
  std::vector<double> t_loc;  // C (1 x 1 resolution)
  Tensor3 t_cls;              // C x S x S, S odd

  int resolution() const { return t_cls.height(); }
};

struct ReferenceFeatures {
  std::vector<double> f_loc;
  Tensor3 f_cls;
};

inline constexpr int kDefaultClsResolution = 5;

// Element-wise mean over the references.
TargetDescriptor RegisterTarget(std::span<const ReferenceFeatures> refs);

// ---------------------------------------------------------------------------
// Full head on one query feature map.

struct TargetHead {
  ScoreStack score;
  RefineMlp refine;
};

struct Detection {
  CenterPrediction center;
  BoxPrediction box;  // confidence filled in
  Box grid_box;       // region pooled for classification
};

// Sizes under one grid cell are widened to one cell for pooling.
Detection DetectTarget(const Tensor3& f, const TargetDescriptor& target,
                       const TargetHead& head);

}  // namespace egobench

#endif  // EGOBENCH_KERNELS_H_
