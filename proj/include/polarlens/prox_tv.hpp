// Copyright 2026 The polarlens Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "polarlens/tensor.hpp"

namespace polarlens {

/// Regularization strengths of the anisotropic 3-D TV prior. `lambda` weighs
/// the two spatial axes and `lambda_w` the polarization axis, so the angle
/// axis threshold is scaled by lambda_w / lambda relative to the spatial ones.
struct TvWeights {
  double lambda = 0.0;
  double lambda_w = 0.0;

  /// Relative weight of the angle axis (spatial axes have weight 1). Falls
  /// back to lambda_w itself when lambda is zero.
  double angle_weight() const;
  void validate() const;
};

enum class TvAxis { kRow, kColumn, kAngle };

/// Cycle-spun level-1 Haar shrinkage approximating the prox of tau * TV_w.
/// For each axis and each circular shift in {0,1}, adjacent pairs (a,b) get
/// their orthonormal detail (a-b)/sqrt(2) soft-thresholded by tau * w_axis;
/// the output is the plain average of the six estimates. Colour channels are
/// processed independently. tau = 0 returns the input bit-for-bit.
PolarizationStack haar_tv_prox(const PolarizationStack& x, double tau, const TvWeights& weights);

/// 0.5 * (max(x, 0) + haar_tv_prox(x, tau, weights)).
PolarizationStack fista_prox(const PolarizationStack& x, double tau, const TvWeights& weights);

/// Sum of |forward differences| along one axis with circular wrap, matching
/// the pair structure the Haar prox shrinks. Axes of length 1 contribute 0.
double axis_total_variation(const PolarizationStack& x, TvAxis axis);

/// Row + column TV plus angle_weight() times angle-axis TV.
double weighted_total_variation(const PolarizationStack& x, const TvWeights& weights);

}  // namespace polarlens
