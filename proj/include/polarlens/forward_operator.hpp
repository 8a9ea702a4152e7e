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

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "polarlens/tensor.hpp"

namespace polarlens {

struct SceneDims {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
  std::size_t angles = 0;

  std::size_t size() const { return height * width * channels * angles; }
  bool operator==(const SceneDims&) const = default;
};

/// Multiplexing lensless forward model
///
///   y(:,:,c) = sum_p S_p .* crop(x(:,:,c,p) * k_c)
///
/// with zero-padded linear convolution evaluated by FFT and a centred crop
/// that starts floor((Hk-1)/2) rows and floor((Wk-1)/2) columns into the full
/// (H+Hk-1) x (W+Wk-1) result. The adjoint zero-pads the masked measurement
/// at the same offset and correlates with k_c.
///
/// The PSF is used as given; callers normalize it with `normalize_psf`.
/// Immutable after construction and safe to share between threads.
class ForwardOperator {
 public:
  ForwardOperator(const Psf& psf, const PolarizationMask& mask);

  const SceneDims& scene_dims() const { return dims_; }
  std::size_t pad_height() const;
  std::size_t pad_width() const;
  std::size_t crop_row_offset() const;
  std::size_t crop_col_offset() const;
  const Psf& psf() const;
  const PolarizationMask& mask() const;

  /// Zero stack / image with the operator's domain and range shapes.
  PolarizationStack make_scene() const;
  Image make_measurement() const;

  Image apply(const PolarizationStack& x) const;
  PolarizationStack adjoint(const Image& y) const;
  /// A^T A x.
  PolarizationStack normal(const PolarizationStack& x) const;

 private:
  struct Impl;
  SceneDims dims_;
  std::shared_ptr<const Impl> impl_;
};

/// A x as a measurement with noise_sigma = 0.
Measurement forward_apply(const ForwardOperator& op, const PolarizationStack& x);
/// A^T y.
PolarizationStack adjoint_apply(const ForwardOperator& op, const Measurement& y);

/// Largest stack size accepted by `build_dense_operator`.
inline constexpr std::size_t kDenseOperatorLimit = 65536;

/// Explicit (H*W*C) x (H*W*C*P) matrix whose column j is A applied to the j-th
/// basis stack. Rows follow Image layout, columns follow PolarizationStack
/// layout.
Eigen::MatrixXd build_dense_operator(const ForwardOperator& op);

/// Largest eigenvalue of A^T A by power iteration from a seeded uniform [0,1)
/// start, i.e. the Lipschitz constant of the gradient of 0.5*||Ax - y||^2.
double estimate_lipschitz(const ForwardOperator& op, std::size_t iters = 50,
                          std::uint64_t seed = 0);

/// Memoizes `estimate_lipschitz` per (psf, mask, iters, seed) fingerprint.
class LipschitzCache {
 public:
  double get(const ForwardOperator& op, std::size_t iters, std::uint64_t seed);

 private:
  std::mutex mutex_;
  std::map<std::tuple<std::uint64_t, std::size_t, std::uint64_t>, double> values_;
};

}  // namespace polarlens
