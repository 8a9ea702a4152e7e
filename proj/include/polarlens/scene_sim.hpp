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

#include <cstddef>
#include <cstdint>
#include <vector>

#include "polarlens/forward_operator.hpp"
#include "polarlens/png_io.hpp"
#include "polarlens/tensor.hpp"

namespace polarlens {

/// Vertical stripe layout of the polarizer mask.
struct MaskSpec {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<int> angles{0, 45, 90, 135};
  std::size_t repeats = 4;
};

struct SimConfig {
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
};

/// Splits the width into angles*repeats stripes of floor(W / (P*repeats))
/// columns, the remainder going to the rightmost stripe. Stripe i selects
/// angle index i mod P.
PolarizationMask generate_stripe_mask(const MaskSpec& spec);

/// y = A x + e with e ~ N(0, noise_sigma^2) drawn from a generator seeded by
/// cfg.seed. With noise_sigma = 0 the result is exactly forward_apply(op, x).
Measurement simulate_measurement(const ForwardOperator& op, const PolarizationStack& x,
                                 const SimConfig& cfg);
/// Builds the operator from a normalized PSF and the mask, then simulates.
Measurement simulate_measurement(const PolarizationStack& x, const Psf& psf,
                                 const PolarizationMask& mask, const SimConfig& cfg);

/// Unpolarized-equivalent image 0.5 * (I0 + I45 + I90 + I135), per channel.
Image compute_rgb_guide(const PolarizationStack& x);

/// Divides codes by 2^bit_depth - 1. With white_balance on a 3-channel image,
/// red and blue are scaled so their means match green.
Measurement preprocess_raw(const RawImage& raw, int bit_depth, bool white_balance);

/// Speckle-like synthetic diffuser PSF: Gaussian caustic spots scattered in a
/// disk, each channel slightly displaced. Normalized per channel.
Psf make_speckle_psf(std::size_t size, std::size_t channels, std::uint64_t seed);

/// Smooth synthetic polarization scene following Malus' law,
/// I(theta) = 0.5 * s0 * (1 + dolp * cos(2 * (theta - aolp))), with
/// low-frequency s0/dolp/aolp fields.
PolarizationStack make_smooth_scene(std::size_t height, std::size_t width, std::size_t channels,
                                    std::size_t angles, std::uint64_t seed);

}  // namespace polarlens
