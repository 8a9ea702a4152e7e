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

#include "polarlens/polarimetry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "polarlens/png_io.hpp"

namespace polarlens {

double wrap_aolp_degrees(double degrees) {
  double wrapped = std::fmod(degrees + 90.0, 180.0);
  if (wrapped < 0.0) wrapped += 180.0;
  return wrapped - 90.0;
}

StokesMap stokes_from_intensities(const PolarizationStack& x) {
  if (x.angles() != 4 || x.angle_labels() != default_angle_labels(4)) {
    throw Error("Stokes estimation requires the four angles 0/45/90/135");
  }
  const std::size_t H = x.height();
  const std::size_t W = x.width();
  const std::size_t C = x.channels();
  StokesMap m{Image(H, W, C), Image(H, W, C), Image(H, W, C), Image(H, W, C), Image(H, W, C),
              std::vector<std::uint8_t>(C * H * W, 0)};

  for (std::size_t c = 0; c < C; ++c) {
    const auto i0 = x.plane(0, c);
    const auto i45 = x.plane(1, c);
    const auto i90 = x.plane(2, c);
    const auto i135 = x.plane(3, c);
    auto s0 = m.s0.plane(c);
    auto s1 = m.s1.plane(c);
    auto s2 = m.s2.plane(c);
    auto dolp = m.dolp.plane(c);
    auto aolp = m.aolp.plane(c);
    for (std::size_t i = 0; i < H * W; ++i) {
      s0[i] = 0.5 * (i0[i] + i45[i] + i90[i] + i135[i]);
      s1[i] = i0[i] - i90[i];
      s2[i] = i45[i] - i135[i];
      if (s0[i] <= kStokesEpsilon) {
        m.degenerate[c * H * W + i] = 1;
        continue;
      }
      // Noisy estimates can exceed full polarization slightly; clamp to the
      // physical range.
      dolp[i] = std::min(std::hypot(s1[i], s2[i]) / s0[i], 1.0);
      const double half_angle = 0.5 * std::atan2(s2[i], s1[i]) * 180.0 / std::numbers::pi;
      aolp[i] = wrap_aolp_degrees(half_angle);
    }
  }
  return m;
}

Image composite_rgb(const PolarizationStack& x) {
  if (x.channels() != 1) throw Error("RGB composite requires a grayscale stack");
  const int i0 = x.angle_index(0);
  const int i45 = x.angle_index(45);
  const int i90 = x.angle_index(90);
  if (i0 < 0 || i45 < 0 || i90 < 0) throw Error("RGB composite requires the 0/45/90 planes");
  Image rgb(x.height(), x.width(), 3);
  const int sources[] = {i0, i45, i90};
  for (std::size_t k = 0; k < 3; ++k) {
    const auto src = x.plane(static_cast<std::size_t>(sources[k]), 0);
    auto dst = rgb.plane(k);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = std::clamp(src[i], 0.0, 1.0);
  }
  return rgb;
}

void composite_rgb_viz(const PolarizationStack& x, const std::filesystem::path& out) {
  write_png(composite_rgb(x), out, 8);
}

}  // namespace polarlens
