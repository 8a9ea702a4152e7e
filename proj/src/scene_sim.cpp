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

#include "polarlens/scene_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

namespace polarlens {

PolarizationMask generate_stripe_mask(const MaskSpec& spec) {
  const std::size_t P = spec.angles.size();
  if (P == 0 || P > 4) throw Error("mask spec needs 1 to 4 angles");
  if (spec.angles != default_angle_labels(P)) {
    throw Error("mask angles must be a prefix of 0/45/90/135");
  }
  if (spec.repeats < 1) throw Error("mask spec repeats must be >= 1");
  if (spec.height == 0 || spec.width == 0) throw Error("zero-sized tensor dimension");
  const std::size_t stripes = P * spec.repeats;
  if (stripes > spec.width) {
    throw Error("mask spec needs " + std::to_string(stripes) + " stripes but width is " +
                std::to_string(spec.width));
  }
  const std::size_t stripe_width = spec.width / stripes;

  std::vector<std::uint8_t> row(spec.width);
  for (std::size_t col = 0; col < spec.width; ++col) {
    const std::size_t stripe = std::min(col / stripe_width, stripes - 1);
    row[col] = static_cast<std::uint8_t>(stripe % P);
  }
  std::vector<std::uint8_t> selection;
  selection.reserve(spec.height * spec.width);
  for (std::size_t r = 0; r < spec.height; ++r) selection.insert(selection.end(), row.begin(), row.end());
  return PolarizationMask(spec.height, spec.width, P, std::move(selection));
}

Measurement simulate_measurement(const ForwardOperator& op, const PolarizationStack& x,
                                 const SimConfig& cfg) {
  if (!std::isfinite(cfg.noise_sigma) || cfg.noise_sigma < 0.0) {
    throw Error("noise_sigma must be finite and >= 0");
  }
  Measurement y = forward_apply(op, x);
  y.noise_sigma = cfg.noise_sigma;
  if (cfg.noise_sigma > 0.0) {
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> noise(0.0, cfg.noise_sigma);
    for (double& v : y.image.values()) v += noise(rng);
  }
  return y;
}

Measurement simulate_measurement(const PolarizationStack& x, const Psf& psf,
                                 const PolarizationMask& mask, const SimConfig& cfg) {
  for (std::size_t c = 0; c < psf.channels(); ++c) {
    const auto k = psf.channel(c);
    const double sum = std::accumulate(k.begin(), k.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-6) throw Error("simulate_measurement expects a normalized PSF");
  }
  return simulate_measurement(ForwardOperator(psf, mask), x, cfg);
}

Image compute_rgb_guide(const PolarizationStack& x) {
  if (x.angles() != 4 || x.angle_labels() != default_angle_labels(4)) {
    throw Error("RGB guide requires the four angles 0/45/90/135");
  }
  Image guide(x.height(), x.width(), x.channels());
  for (std::size_t c = 0; c < x.channels(); ++c) {
    auto dst = guide.plane(c);
    const auto i0 = x.plane(0, c);
    const auto i45 = x.plane(1, c);
    const auto i90 = x.plane(2, c);
    const auto i135 = x.plane(3, c);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = 0.5 * (i0[i] + i45[i] + i90[i] + i135[i]);
  }
  return guide;
}

Measurement preprocess_raw(const RawImage& raw, int bit_depth, bool white_balance) {
  if (bit_depth != 8 && bit_depth != 16) throw Error("bit depth must be 8 or 16");
  const std::uint32_t max_code = (1U << bit_depth) - 1U;
  Image img(raw.height, raw.width, raw.channels);
  if (raw.codes.size() != img.size()) throw Error("raw image data length does not match dims");
  auto values = img.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (raw.codes[i] > max_code) {
      throw Error("raw code " + std::to_string(raw.codes[i]) + " exceeds " +
                  std::to_string(bit_depth) + "-bit range");
    }
    values[i] = static_cast<double>(raw.codes[i]) / static_cast<double>(max_code);
  }

  if (white_balance && img.channels() == 3) {
    auto mean = [&img](std::size_t c) {
      const auto p = img.plane(c);
      return std::accumulate(p.begin(), p.end(), 0.0) / static_cast<double>(p.size());
    };
    const double r = mean(0);
    const double g = mean(1);
    const double b = mean(2);
    if (r == 0.0 || b == 0.0) throw Error("degenerate channel");
    for (double& v : img.plane(0)) v *= g / r;
    for (double& v : img.plane(2)) v *= g / b;
  }
  return {std::move(img), 0.0};
}

Psf make_speckle_psf(std::size_t size, std::size_t channels, std::uint64_t seed) {
  if (size < 3) throw Error("speckle PSF size must be >= 3");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double centre = 0.5 * static_cast<double>(size - 1);
  const double radius = 0.45 * static_cast<double>(size);
  const std::size_t spots = std::max<std::size_t>(4, size / 2);
  constexpr double kSpotSigma = 0.8;

  struct Spot {
    double row, col, weight;
  };
  std::vector<Spot> layout;
  while (layout.size() < spots) {
    const double r = centre + radius * (2.0 * unit(rng) - 1.0);
    const double c = centre + radius * (2.0 * unit(rng) - 1.0);
    if (std::hypot(r - centre, c - centre) > radius) continue;
    layout.push_back({r, c, 0.5 + 0.5 * unit(rng)});
  }

  Image kernel(size, size, channels);
  for (std::size_t ch = 0; ch < channels; ++ch) {
    // Mild per-channel scaling about the centre mimics dispersion.
    const double zoom = 1.0 + 0.03 * (static_cast<double>(ch) - 0.5 * static_cast<double>(channels - 1));
    auto plane = kernel.plane(ch);
    for (const Spot& s : layout) {
      const double sr = centre + (s.row - centre) * zoom;
      const double sc = centre + (s.col - centre) * zoom;
      for (std::size_t r = 0; r < size; ++r) {
        for (std::size_t c = 0; c < size; ++c) {
          const double dr = static_cast<double>(r) - sr;
          const double dc = static_cast<double>(c) - sc;
          plane[r * size + c] += s.weight * std::exp(-(dr * dr + dc * dc) / (2 * kSpotSigma * kSpotSigma));
        }
      }
    }
  }
  return normalize_psf(Psf(std::move(kernel)));
}

PolarizationStack make_smooth_scene(std::size_t height, std::size_t width, std::size_t channels,
                                    std::size_t angles, std::uint64_t seed) {
  PolarizationStack x(height, width, channels, angles);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr double kPi = std::numbers::pi;

  // Sum of a few low-frequency cosines, rescaled to [lo, hi].
  struct Field {
    double fy[3], fx[3], phase[3];
  };
  auto draw = [&] {
    Field f{};
    for (int k = 0; k < 3; ++k) {
      f.fy[k] = 0.5 + 1.5 * unit(rng);
      f.fx[k] = 0.5 + 1.5 * unit(rng);
      f.phase[k] = 2 * kPi * unit(rng);
    }
    return f;
  };
  auto eval = [&](const Field& f, double u, double v, double lo, double hi) {
    double s = 0.0;
    for (int k = 0; k < 3; ++k) s += std::cos(2 * kPi * (f.fy[k] * u + f.fx[k] * v) + f.phase[k]);
    return lo + (hi - lo) * (s / 3.0 + 1.0) * 0.5;
  };

  std::vector<Field> intensity;
  for (std::size_t c = 0; c < channels; ++c) intensity.push_back(draw());
  const Field dolp_field = draw();
  const Field aolp_field = draw();

  for (std::size_t r = 0; r < height; ++r) {
    const double u = static_cast<double>(r) / static_cast<double>(height);
    for (std::size_t col = 0; col < width; ++col) {
      const double v = static_cast<double>(col) / static_cast<double>(width);
      const double dolp = eval(dolp_field, u, v, 0.05, 0.7);
      const double aolp = eval(aolp_field, u, v, 0.0, kPi);
      for (std::size_t c = 0; c < channels; ++c) {
        const double s0 = eval(intensity[c], u, v, 0.2, 1.0);
        for (std::size_t p = 0; p < angles; ++p) {
          const double theta = x.angle_labels()[p] * kPi / 180.0;
          x.at(p, c, r, col) = 0.5 * s0 * (1.0 + dolp * std::cos(2.0 * (theta - aolp)));
        }
      }
    }
  }
  return x;
}

}  // namespace polarlens
