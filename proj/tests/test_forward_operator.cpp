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

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

#include "polarlens/forward_operator.hpp"
#include "polarlens/parallel.hpp"
#include "support/oracles.hpp"

using namespace polarlens;
namespace t = polarlens::testing;

namespace {

Eigen::VectorXd vec(std::span<const double> v) { return t::to_eigen(v); }

}  // namespace

TEST_CASE("delta PSF with a single-angle mask is the identity") {
  const ForwardOperator op(t::delta_psf(3, 3, 1), t::uniform_mask(5, 4));
  const PolarizationStack x = t::random_stack(5, 4, 1, 1, 1);
  const Image y = op.apply(x);
  CHECK(t::max_abs_diff(y.values(), x.values()) <= 1e-14);
  const Image r = t::random_image(5, 4, 1, 2);
  CHECK(t::max_abs_diff(op.adjoint(r).values(), r.values()) <= 1e-14);
}

TEST_CASE("even-sized kernels use the floor((k-1)/2) centre") {
  // A 4x4 delta at (1,1) is the centre, so the operator is still the identity.
  const ForwardOperator op(t::delta_psf(4, 4, 1), t::uniform_mask(6, 6));
  CHECK(op.crop_row_offset() == 1);
  CHECK(op.crop_col_offset() == 1);
  const PolarizationStack x = t::random_stack(6, 6, 1, 1, 3);
  CHECK(t::max_abs_diff(op.apply(x).values(), x.values()) <= 1e-14);
}

TEST_CASE("zero in, zero out") {
  const ForwardOperator op(t::random_psf(3, 3, 3, 1), t::column_mask(6, 6, 4));
  const PolarizationStack x(6, 6, 3, 4);
  const Image ax = op.apply(x);
  for (double v : ax.values()) CHECK(v == 0.0);
  const PolarizationStack aty = op.adjoint(Image(6, 6, 3));
  for (double v : aty.values()) CHECK(v == 0.0);
}

TEST_CASE("pad sizes are 2-3-5 smooth and large enough") {
  const ForwardOperator op(t::random_psf(7, 5, 1, 1), t::uniform_mask(61, 37));
  auto smooth = [](std::size_t n) {
    for (std::size_t f : {2u, 3u, 5u})
      while (n % f == 0) n /= f;
    return n == 1;
  };
  CHECK(op.pad_height() >= 61 + 7 - 1);
  CHECK(op.pad_width() >= 37 + 5 - 1);
  CHECK(smooth(op.pad_height()));
  CHECK(smooth(op.pad_width()));
}

TEST_CASE("FFT path matches direct spatial convolution") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    std::uniform_int_distribution<std::size_t> dim(1, 16), kdim(1, 5), ang(1, 4);
    const std::size_t h = dim(rng), w = dim(rng), p = ang(rng);
    const std::size_t c = trial % 2 == 0 ? 1 : 3;
    const Psf psf = t::random_psf(kdim(rng), kdim(rng), c, rng());
    const PolarizationMask mask = t::random_mask(h, w, p, rng());
    const PolarizationStack x = t::random_stack(h, w, c, p, rng(), -1.0, 1.0);
    const ForwardOperator op(psf, mask);
    const Image fast = op.apply(x);
    const Image slow = t::direct_forward(x, psf, mask);
    CHECK(t::max_abs_diff(fast.values(), slow.values()) <= 1e-10);
  }
}

TEST_CASE("4x4 striped instance matches the dense matrix product") {
  const Psf psf = t::random_psf(3, 3, 1, 8);
  const ForwardOperator op(psf, t::column_mask(4, 4, 2));
  const Eigen::MatrixXd a = build_dense_operator(op);
  REQUIRE(a.rows() == 16);
  REQUIRE(a.cols() == 32);
  const PolarizationStack x = t::random_stack(4, 4, 1, 2, 9);
  const Eigen::VectorXd dense = a * vec(x.values());
  CHECK(t::max_abs_diff(op.apply(x).values(), std::span<const double>(dense.data(), dense.size())) <= 1e-12);

  // The dense oracle is itself checked against the spatial loop.
  const Image direct = t::direct_forward(x, psf, op.mask());
  CHECK(t::max_abs_diff(direct.values(), std::span<const double>(dense.data(), dense.size())) <= 1e-12);

  const Image y = t::random_image(4, 4, 1, 10);
  const Eigen::VectorXd back = a.transpose() * vec(y.values());
  CHECK(t::max_abs_diff(op.adjoint(y).values(), std::span<const double>(back.data(), back.size())) <= 1e-12);
}

TEST_CASE("dense operator of the identity") {
  const ForwardOperator op(t::delta_psf(3, 3, 1), t::uniform_mask(3, 3));
  const Eigen::MatrixXd a = build_dense_operator(op);
  CHECK((a - Eigen::MatrixXd::Identity(9, 9)).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("dense column sums equal the in-crop PSF mass") {
  // Normalized uniform 3x3 PSF: column (p,i,j) spreads 1/9 to each in-bounds
  // neighbour of (i,j) that selects angle p.
  Image k(3, 3, 1);
  for (double& v : k.values()) v = 1.0 / 9.0;
  const PolarizationMask mask = t::column_mask(5, 5, 2);
  const ForwardOperator op(Psf(k), mask);
  const Eigen::MatrixXd a = build_dense_operator(op);
  for (std::size_t p = 0; p < 2; ++p) {
    for (long i = 0; i < 5; ++i) {
      for (long j = 0; j < 5; ++j) {
        double mass = 0.0;
        for (long di = -1; di <= 1; ++di)
          for (long dj = -1; dj <= 1; ++dj) {
            const long r = i + di, c = j + dj;
            if (r >= 0 && c >= 0 && r < 5 && c < 5 && mask.selected(r, c) == p) mass += 1.0 / 9.0;
          }
        CHECK(a.col(static_cast<Eigen::Index>((p * 5 + i) * 5 + j)).sum() == doctest::Approx(mass).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("dense operator size guard") {
  const ForwardOperator op(t::delta_psf(1, 1, 3), t::uniform_mask(100, 100, 4));
  CHECK_THROWS_AS(build_dense_operator(op), Error);
}

TEST_CASE("adjoint dot test on random instances") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<std::size_t> dim(1, 16), ang(1, 4);
    const std::size_t h = dim(rng), w = dim(rng), c = trial % 3 == 0 ? 3 : 1, p = ang(rng);
    const ForwardOperator op(t::random_psf(5, 5, c, rng()), t::random_mask(h, w, p, rng()));
    const PolarizationStack x = t::random_stack(h, w, c, p, rng(), -1.0, 1.0);
    const Image y = t::random_image(h, w, c, rng(), -1.0, 1.0);
    const Image ax = op.apply(x);
    const double lhs = t::dot(ax.values(), y.values());
    const double rhs = t::dot(x.values(), op.adjoint(y).values());
    CHECK(std::abs(lhs - rhs) <= 1e-10 * t::norm(ax.values()) * t::norm(y.values()));
  }
}

TEST_CASE("linearity") {
  const ForwardOperator op(t::random_psf(5, 3, 3, 1), t::random_mask(9, 11, 4, 2));
  const PolarizationStack x1 = t::random_stack(9, 11, 3, 4, 3, -1, 1);
  const PolarizationStack x2 = t::random_stack(9, 11, 3, 4, 4, -1, 1);
  const double alpha = 0.7, beta = -2.5;
  PolarizationStack mix = op.make_scene();
  for (std::size_t i = 0; i < mix.size(); ++i) mix.values()[i] = alpha * x1.values()[i] + beta * x2.values()[i];
  const Image y1 = op.apply(x1), y2 = op.apply(x2), ym = op.apply(mix);
  for (std::size_t i = 0; i < ym.size(); ++i) {
    CHECK(std::abs(ym.values()[i] - (alpha * y1.values()[i] + beta * y2.values()[i])) <= 1e-12);
  }
}

TEST_CASE("dimension mismatches are rejected") {
  const ForwardOperator op(t::random_psf(3, 3, 1, 1), t::uniform_mask(4, 4, 3));
  CHECK_THROWS_AS(op.apply(PolarizationStack(4, 5, 1, 3)), Error);
  CHECK_THROWS_AS(op.apply(PolarizationStack(4, 4, 3, 3)), Error);
  CHECK_THROWS_AS(op.adjoint(Image(4, 4, 3)), Error);
}

TEST_CASE("estimate_lipschitz") {
  SUBCASE("identity has L = 1") {
    const ForwardOperator op(t::delta_psf(3, 3, 1), t::uniform_mask(8, 8));
    CHECK(estimate_lipschitz(op, 50, 0) == doctest::Approx(1.0).epsilon(1e-3));
  }
  SUBCASE("scaling the PSF by 2 scales L by 4") {
    const Psf k = t::random_psf(3, 3, 1, 5);
    Image k2 = k.kernel();
    for (double& v : k2.values()) v *= 2.0;
    const PolarizationMask m = t::column_mask(8, 8, 3);
    const double l1 = estimate_lipschitz(ForwardOperator(k, m), 200, 1);
    const double l2 = estimate_lipschitz(ForwardOperator(Psf(k2), m), 200, 1);
    CHECK(l2 == doctest::Approx(4.0 * l1).epsilon(1e-12));
  }
  SUBCASE("matches the dense top eigenvalue") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const ForwardOperator op(t::random_psf(3, 3, 1, seed), t::column_mask(4, 4, 3));
      const Eigen::MatrixXd a = build_dense_operator(op);
      const Eigen::MatrixXd ata = a.transpose() * a;
      const double top = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(ata).eigenvalues().maxCoeff();
      CHECK(std::abs(estimate_lipschitz(op, 500, seed) - top) <= 1e-6 * top);
    }
  }
  SUBCASE("deterministic for a fixed seed") {
    const ForwardOperator op(t::random_psf(5, 5, 3, 2), t::random_mask(12, 12, 4, 3));
    CHECK(estimate_lipschitz(op, 30, 9) == estimate_lipschitz(op, 30, 9));
  }
  SUBCASE("cache returns the estimated value") {
    const ForwardOperator op(t::random_psf(5, 5, 1, 2), t::random_mask(12, 12, 3, 3));
    LipschitzCache cache;
    const double first = cache.get(op, 40, 2);
    CHECK(first == estimate_lipschitz(op, 40, 2));
    CHECK(cache.get(op, 40, 2) == first);
  }
}

TEST_CASE("results do not depend on the worker count") {
  const ForwardOperator op(t::random_psf(5, 5, 3, 11), t::random_mask(16, 16, 4, 12));
  const PolarizationStack x = t::random_stack(16, 16, 3, 4, 13);
  setenv("POLARLENS_THREADS", "1", 1);
  const Image y1 = op.apply(x);
  const PolarizationStack b1 = op.adjoint(y1);
  setenv("POLARLENS_THREADS", "4", 1);
  const Image y4 = op.apply(x);
  const PolarizationStack b4 = op.adjoint(y1);
  unsetenv("POLARLENS_THREADS");
  for (std::size_t i = 0; i < y1.size(); ++i) CHECK(y1.values()[i] == y4.values()[i]);
  for (std::size_t i = 0; i < b1.size(); ++i) CHECK(b1.values()[i] == b4.values()[i]);
}
