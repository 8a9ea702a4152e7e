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

#include <cmath>
#include <cstring>
#include <numeric>

#include "polarlens/scene_sim.hpp"
#include "support/oracles.hpp"

using namespace polarlens;
namespace t = polarlens::testing;

namespace {

std::vector<std::size_t> column_angles(const PolarizationMask& m) {
  std::vector<std::size_t> out(m.width());
  for (std::size_t j = 0; j < m.width(); ++j) {
    out[j] = m.selected(0, j);
    for (std::size_t i = 1; i < m.height(); ++i) REQUIRE(m.selected(i, j) == out[j]);
  }
  return out;
}

double channel_mean(const Image& img, std::size_t c) {
  const auto p = img.plane(c);
  return std::accumulate(p.begin(), p.end(), 0.0) / static_cast<double>(p.size());
}

}  // namespace

TEST_CASE("stripe masks with exact division") {
  SUBCASE("W=12, P=3, repeats=4") {
    const auto cols = column_angles(generate_stripe_mask({3, 12, {0, 45, 90}, 4}));
    for (std::size_t j = 0; j < 12; ++j) CHECK(cols[j] == j % 3);
  }
  SUBCASE("W=16, P=4, repeats=4") {
    const auto cols = column_angles(generate_stripe_mask({2, 16, {0, 45, 90, 135}, 4}));
    for (std::size_t j = 0; j < 16; ++j) CHECK(cols[j] == j % 4);
  }
}

TEST_CASE("stripe mask W=250, P=4, repeats=4") {
  const PolarizationMask m = generate_stripe_mask({5, 250, {0, 45, 90, 135}, 4});
  CHECK(m.is_partition());
  const auto cols = column_angles(m);
  // Independent construction: run-length encode the columns.
  std::vector<std::pair<std::size_t, std::size_t>> runs;  // (angle, width)
  for (std::size_t a : cols) {
    if (runs.empty() || runs.back().first != a) runs.push_back({a, 0});
    ++runs.back().second;
  }
  REQUIRE(runs.size() == 16);
  for (std::size_t i = 0; i < 16; ++i) {
    CHECK(runs[i].first == i % 4);
    CHECK(runs[i].second == (i == 15 ? 25u : 15u));
  }
}

TEST_CASE("stripe masks are always partitions") {
  for (std::size_t w = 4; w < 60; w += 3) {
    for (std::size_t p : {3u, 4u}) {
      for (std::size_t r = 1; r * p <= w && r <= 5; ++r) {
        const std::vector<int> labels = default_angle_labels(p);
        const PolarizationMask m = generate_stripe_mask({2, w, labels, r});
        CHECK(m.is_partition());
        CHECK(m.angles() == p);
      }
    }
  }
}

TEST_CASE("stripe mask errors") {
  CHECK_THROWS_AS(generate_stripe_mask({4, 10, {0, 45, 90, 135}, 4}), Error);
  CHECK_THROWS_AS(generate_stripe_mask({4, 16, {0, 45, 90}, 0}), Error);
  CHECK_THROWS_AS(generate_stripe_mask({4, 16, {0, 90, 135}, 1}), Error);
}

TEST_CASE("noise-free simulation is exactly the forward operator") {
  const Psf psf = normalize_psf(t::random_psf(5, 5, 3, 1));
  const PolarizationMask mask = generate_stripe_mask({12, 16, {0, 45, 90, 135}, 2});
  const PolarizationStack x = t::random_stack(12, 16, 3, 4, 2);
  const ForwardOperator op(psf, mask);
  const Measurement y = simulate_measurement(x, psf, mask, {0.0, 5});
  const Image ax = op.apply(x);
  CHECK(y.noise_sigma == 0.0);
  CHECK(std::memcmp(y.image.values().data(), ax.values().data(), ax.size() * sizeof(double)) == 0);
}

TEST_CASE("pure noise field has the requested spread") {
  const Psf psf = normalize_psf(t::random_psf(3, 3, 1, 1));
  const PolarizationMask mask = generate_stripe_mask({250, 250, {0, 45, 90}, 4});
  const PolarizationStack x(250, 250, 1, 3);
  const Measurement y = simulate_measurement(x, psf, mask, {0.1, 42});
  const auto v = y.image.values();
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double ss = 0.0;
  for (double e : v) ss += (e - m) * (e - m);
  const double sd = std::sqrt(ss / (v.size() - 1));
  CHECK(std::abs(sd - 0.1) <= 0.005);
  CHECK(y.noise_sigma == 0.1);
}

TEST_CASE("simulation is deterministic per seed") {
  const Psf psf = normalize_psf(t::random_psf(3, 3, 1, 1));
  const PolarizationMask mask = generate_stripe_mask({8, 12, {0, 45, 90}, 4});
  const PolarizationStack x = t::random_stack(8, 12, 1, 3, 3);
  const Measurement a = simulate_measurement(x, psf, mask, {0.05, 7});
  const Measurement b = simulate_measurement(x, psf, mask, {0.05, 7});
  const Measurement c = simulate_measurement(x, psf, mask, {0.05, 8});
  CHECK(std::memcmp(a.image.values().data(), b.image.values().data(), a.image.size() * sizeof(double)) == 0);
  CHECK(t::max_abs_diff(a.image.values(), c.image.values()) > 0.0);
}

TEST_CASE("simulation rejects unnormalized PSFs and mismatched dims") {
  const Psf raw = t::random_psf(3, 3, 1, 1);
  const PolarizationMask mask = generate_stripe_mask({8, 12, {0, 45, 90}, 4});
  CHECK_THROWS_AS(simulate_measurement(t::random_stack(8, 12, 1, 3, 3), raw, mask, {}), Error);
  CHECK_THROWS_AS(simulate_measurement(t::random_stack(8, 11, 1, 3, 3), normalize_psf(raw), mask, {}), Error);
  CHECK_THROWS_AS(simulate_measurement(t::random_stack(8, 12, 1, 3, 3), normalize_psf(raw), mask, {-1.0, 0}), Error);
}

TEST_CASE("RGB guide") {
  SUBCASE("constant angle images give twice the value") {
    PolarizationStack x(3, 3, 3, 4);
    for (double& v : x.values()) v = 0.3;
    const Image g = compute_rgb_guide(x);
    for (double v : g.values()) CHECK(v == doctest::Approx(0.6).epsilon(1e-15));
  }
  SUBCASE("unpolarized scene recovers the intensity") {
    const Image intensity = t::random_image(4, 5, 3, 1);
    PolarizationStack x(4, 5, 3, 4);
    for (std::size_t p = 0; p < 4; ++p)
      for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t k = 0; k < 20; ++k) x.plane(p, c)[k] = intensity.plane(c)[k] / 2.0;
    const Image g = compute_rgb_guide(x);
    CHECK(t::max_abs_diff(g.values(), intensity.values()) <= 1e-15);
  }
  SUBCASE("random stack is the elementwise half-sum and linear") {
    const PolarizationStack x = t::random_stack(4, 6, 3, 4, 8);
    const Image g = compute_rgb_guide(x);
    for (std::size_t c = 0; c < 3; ++c)
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 6; ++j) {
          const double s = 0.5 * (x.at(0, c, i, j) + x.at(1, c, i, j) + x.at(2, c, i, j) + x.at(3, c, i, j));
          CHECK(std::abs(g.at(c, i, j) - s) <= 1e-15);
        }
    PolarizationStack x3 = x;
    for (double& v : x3.values()) v *= 3.0;
    const Image g3 = compute_rgb_guide(x3);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(g3.values()[k] == doctest::Approx(3.0 * g.values()[k]).epsilon(1e-14));
  }
  SUBCASE("three angles are rejected") { CHECK_THROWS_AS(compute_rgb_guide(PolarizationStack(2, 2, 1, 3)), Error); }
}

TEST_CASE("preprocess_raw") {
  SUBCASE("full-scale 16-bit code maps to one") {
    RawImage raw{1, 2, 1, 16, {65535, 0}};
    const Measurement m = preprocess_raw(raw, 16, true);
    CHECK(m.image.values()[0] == 1.0);
    CHECK(m.image.values()[1] == 0.0);
  }
  SUBCASE("white balance matches red and blue means to green") {
    // Codes chosen so the normalized channel means are 0.2, 0.4 and 0.1.
    RawImage raw{1, 2, 3, 8, {}};
    raw.codes = {41, 61, 92, 112, 20, 31};
    const Measurement off = preprocess_raw(raw, 8, false);
    const double r = channel_mean(off.image, 0), g = channel_mean(off.image, 1), b = channel_mean(off.image, 2);
    CHECK(r == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(g == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(b == doctest::Approx(0.1).epsilon(1e-15));
    const Measurement on = preprocess_raw(raw, 8, true);
    for (std::size_t c = 0; c < 3; ++c) CHECK(channel_mean(on.image, c) == doctest::Approx(0.4).epsilon(1e-14));
    for (std::size_t k = 0; k < 2; ++k) {
      CHECK(on.image.plane(0)[k] == doctest::Approx(2.0 * off.image.plane(0)[k]).epsilon(1e-14));
      CHECK(on.image.plane(2)[k] == doctest::Approx(4.0 * off.image.plane(2)[k]).epsilon(1e-14));
    }
  }
  SUBCASE("grayscale ignores white balance") {
    RawImage raw{2, 2, 1, 8, {0, 51, 102, 255}};
    const Measurement m = preprocess_raw(raw, 8, true);
    for (std::size_t k = 0; k < 4; ++k) CHECK(m.image.values()[k] == raw.codes[k] / 255.0);
  }
  SUBCASE("zero red channel is degenerate") {
    RawImage raw{1, 2, 3, 8, {0, 0, 10, 10, 5, 5}};
    try {
      preprocess_raw(raw, 8, true);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("degenerate channel") != std::string::npos);
    }
  }
  SUBCASE("codes above the bit depth are rejected") {
    RawImage raw{1, 1, 1, 16, {300}};
    CHECK_THROWS_AS(preprocess_raw(raw, 8, false), Error);
  }
  SUBCASE("output range bounds") {
    RawImage raw{2, 3, 3, 16, {}};
    std::mt19937_64 rng(4);
    for (int i = 0; i < 18; ++i) raw.codes.push_back(static_cast<std::uint16_t>(1 + rng() % 65535));
    const Measurement off = preprocess_raw(raw, 16, false);
    for (double v : off.image.values()) CHECK((v >= 0.0 && v <= 1.0));
    const Measurement on = preprocess_raw(raw, 16, true);
    const double bound = channel_mean(off.image, 1) / std::min(channel_mean(off.image, 0), channel_mean(off.image, 2));
    for (double v : on.image.values()) CHECK((v >= 0.0 && v <= std::max(1.0, bound) + 1e-12));
  }
}

TEST_CASE("bundled synthetic generators") {
  const Psf psf = make_speckle_psf(32, 3, 7);
  for (std::size_t c = 0; c < 3; ++c) {
    const auto p = psf.channel(c);
    CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  }
  const PolarizationStack x = make_smooth_scene(16, 16, 1, 3, 11);
  CHECK(x.is_acquisition_config());
  for (double v : x.values()) CHECK((v >= 0.0 && v <= 1.0));
  // Malus' law: I0 + I90 equals I45 + I135 for four-angle scenes.
  const PolarizationStack x4 = make_smooth_scene(8, 8, 3, 4, 3);
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t k = 0; k < 64; ++k)
      CHECK(x4.plane(0, c)[k] + x4.plane(2, c)[k] == doctest::Approx(x4.plane(1, c)[k] + x4.plane(3, c)[k]).epsilon(1e-12));
}
