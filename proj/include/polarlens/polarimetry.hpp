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

#include <cstdint>
#include <filesystem>
#include <vector>

#include "polarlens/tensor.hpp"

namespace polarlens {

/// Pixels whose s0 does not exceed this get dolp = aolp = 0 and are flagged.
inline constexpr double kStokesEpsilon = 1e-8;

/// Linear Stokes description, one plane per colour channel. aolp is in
/// degrees within [-90, 90).
struct StokesMap {
  Image s0;
  Image s1;
  Image s2;
  Image dolp;
  Image aolp;
  /// 1 where s0 <= kStokesEpsilon, laid out like the images.
  std::vector<std::uint8_t> degenerate;
};

/// s0 = 0.5 (I0 + I45 + I90 + I135), s1 = I0 - I90, s2 = I45 - I135,
/// dolp = sqrt(s1^2 + s2^2) / s0, aolp = 0.5 * atan2(s2, s1).
StokesMap stokes_from_intensities(const PolarizationStack& x);

/// Maps an angle in degrees onto [-90, 90).
double wrap_aolp_degrees(double degrees);

/// Composite of a grayscale stack: I0 -> red, I45 -> green, I90 -> blue.
Image composite_rgb(const PolarizationStack& x);

/// Writes `composite_rgb(x)` as an 8-bit RGB PNG.
void composite_rgb_viz(const PolarizationStack& x, const std::filesystem::path& out);

}  // namespace polarlens
