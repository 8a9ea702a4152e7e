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

// Test-only reference implementations. They share no code paths with the
// library beyond the data containers.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "polarlens/tensor.hpp"

namespace polarlens::testing {

inline PolarizationStack random_stack(std::size_t h, std::size_t w, std::size_t c, std::size_t p,
                                      std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
  PolarizationStack x(h, w, c, p);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  for (double& v : x.values()) v = dist(rng);
  return x;
}

inline Image random_image(std::size_t h, std::size_t w, std::size_t c, std::uint64_t seed,
                          double lo = 0.0, double hi = 1.0) {
  Image img(h, w, c);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  for (double& v : img.values()) v = dist(rng);
  return img;
}

inline Psf random_psf(std::size_t kh, std::size_t kw, std::size_t c, std::uint64_t seed) {
  return Psf(random_image(kh, kw, c, seed));
}

inline Psf delta_psf(std::size_t kh, std::size_t kw, std::size_t c, double value = 1.0) {
  Image k(kh, kw, c);
  for (std::size_t ch = 0; ch < c; ++ch) k.at(ch, (kh - 1) / 2, (kw - 1) / 2) = value;
  return Psf(std::move(k));
}

inline PolarizationMask uniform_mask(std::size_t h, std::size_t w, std::size_t angles = 1) {
  return PolarizationMask(h, w, angles, std::vector<std::uint8_t>(h * w, 0));
}

/// Column-striped mask: column j selects angle j mod P.
inline PolarizationMask column_mask(std::size_t h, std::size_t w, std::size_t angles) {
  std::vector<std::uint8_t> sel(h * w);
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t c = 0; c < w; ++c) sel[r * w + c] = static_cast<std::uint8_t>(c % angles);
  return PolarizationMask(h, w, angles, std::move(sel));
}

/// Random partition mask.
inline PolarizationMask random_mask(std::size_t h, std::size_t w, std::size_t angles,
                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dist(0, static_cast<int>(angles) - 1);
  std::vector<std::uint8_t> sel(h * w);
  for (auto& s : sel) s = static_cast<std::uint8_t>(dist(rng));
  return PolarizationMask(h, w, angles, std::move(sel));
}

/// Spatial-domain evaluation of y = sum_p S_p .* crop(x_p * k) with explicit
/// loops over the kernel support.
inline Image direct_forward(const PolarizationStack& x, const Psf& psf, const PolarizationMask& mask) {
  const std::size_t H = x.height(), W = x.width();
  const long kh = static_cast<long>(psf.height()), kw = static_cast<long>(psf.width());
  const long oy = (kh - 1) / 2, ox = (kw - 1) / 2;
  Image y(H, W, x.channels());
  for (std::size_t c = 0; c < x.channels(); ++c) {
    for (std::size_t i = 0; i < H; ++i) {
      for (std::size_t j = 0; j < W; ++j) {
        const std::size_t p = mask.selected(i, j);
        double s = 0.0;
        for (long a = 0; a < kh; ++a) {
          for (long b = 0; b < kw; ++b) {
            const long si = static_cast<long>(i) + oy - a;
            const long sj = static_cast<long>(j) + ox - b;
            if (si < 0 || sj < 0 || si >= static_cast<long>(H) || sj >= static_cast<long>(W)) continue;
            s += x.at(p, c, si, sj) * psf.kernel().at(c, a, b);
          }
        }
        y.at(c, i, j) = s;
      }
    }
  }
  return y;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline Eigen::VectorXd to_eigen(std::span<const double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

/// Non-negative least squares min ||A x - y|| s.t. x >= 0 by projected
/// gradient with step 1/||A||^2, run for a fixed long budget.
inline Eigen::VectorXd nnls_projected_gradient(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                                               int iterations) {
  const Eigen::MatrixXd ata = a.transpose() * a;
  const Eigen::VectorXd aty = a.transpose() * y;
  const double lipschitz = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(ata).eigenvalues().maxCoeff();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(a.cols());
  Eigen::VectorXd prev = x;
  double t = 1.0;
  // Accelerated projected gradient; monotone restart keeps it robust.
  Eigen::VectorXd v = x;
  double best = (a * x - y).squaredNorm();
  for (int k = 0; k < iterations; ++k) {
    Eigen::VectorXd next = (v - (ata * v - aty) / lipschitz).cwiseMax(0.0);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double f = (a * next - y).squaredNorm();
    if (f > best) {
      t = 1.0;
      v = x;
      continue;
    }
    best = f;
    v = next + ((t - 1.0) / t_next) * (next - x);
    x = next;
    t = t_next;
  }
  return x;
}

}  // namespace polarlens::testing
