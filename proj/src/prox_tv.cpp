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

#include "polarlens/prox_tv.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace polarlens {
namespace {

/// Addressing of the 1-D lines along one axis of a stack.
struct LineLayout {
  std::size_t length;  // elements per line
  std::size_t stride;  // distance between consecutive elements
  std::vector<std::size_t> starts;
};

LineLayout lines_along(const PolarizationStack& x, TvAxis axis) {
  const std::size_t H = x.height();
  const std::size_t W = x.width();
  const std::size_t C = x.channels();
  const std::size_t P = x.angles();
  LineLayout layout{};
  switch (axis) {
    case TvAxis::kRow:
      layout.length = H;
      layout.stride = W;
      for (std::size_t plane = 0; plane < P * C; ++plane) {
        for (std::size_t col = 0; col < W; ++col) layout.starts.push_back(plane * H * W + col);
      }
      break;
    case TvAxis::kColumn:
      layout.length = W;
      layout.stride = 1;
      for (std::size_t plane = 0; plane < P * C; ++plane) {
        for (std::size_t row = 0; row < H; ++row) layout.starts.push_back((plane * H + row) * W);
      }
      break;
    case TvAxis::kAngle:
      layout.length = P;
      layout.stride = C * H * W;
      for (std::size_t i = 0; i < C * H * W; ++i) layout.starts.push_back(i);
      break;
  }
  return layout;
}

/// Adds to `delta` the change one shifted Haar shrinkage makes along `layout`.
/// Shrinking detail d to soft(d, t) moves a and b by -/+ clamp(d, -t, t)/sqrt2,
/// which leaves pairs with zero detail (or t = 0) exactly untouched.
void accumulate_haar_shrink(std::span<const double> x, const LineLayout& layout,
                            std::size_t shift, double threshold, std::vector<double>& delta) {
  const std::size_t n = layout.length;
  if (n < 2 || threshold <= 0.0) return;
  constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;
  for (std::size_t start : layout.starts) {
    for (std::size_t m = 0; 2 * m + 1 < n; ++m) {
      const std::size_t ia = start + ((2 * m + shift) % n) * layout.stride;
      const std::size_t ib = start + ((2 * m + 1 + shift) % n) * layout.stride;
      const double detail = (x[ia] - x[ib]) * kInvSqrt2;
      const double moved = std::clamp(detail, -threshold, threshold) * kInvSqrt2;
      delta[ia] -= moved;
      delta[ib] += moved;
    }
  }
}

}  // namespace

double TvWeights::angle_weight() const { return lambda > 0.0 ? lambda_w / lambda : lambda_w; }

void TvWeights::validate() const {
  if (!std::isfinite(lambda) || !std::isfinite(lambda_w) || lambda < 0.0 || lambda_w < 0.0) {
    throw Error("TV weights must be finite and >= 0");
  }
}

PolarizationStack haar_tv_prox(const PolarizationStack& x, double tau, const TvWeights& weights) {
  if (!std::isfinite(tau) || tau < 0.0) throw Error("prox threshold tau must be finite and >= 0");
  weights.validate();
  if (tau == 0.0) return x;

  const auto in = x.values();
  std::vector<double> delta(in.size(), 0.0);
  const struct {
    TvAxis axis;
    double threshold;
  } axes[] = {{TvAxis::kRow, tau}, {TvAxis::kColumn, tau}, {TvAxis::kAngle, tau * weights.angle_weight()}};
  constexpr double kEstimates = 6.0;  // 3 axes x 2 shifts

  for (const auto& a : axes) {
    const LineLayout layout = lines_along(x, a.axis);
    for (std::size_t shift = 0; shift < 2; ++shift) {
      accumulate_haar_shrink(in, layout, shift, a.threshold, delta);
    }
  }

  PolarizationStack out = x;
  auto values = out.values();
  for (std::size_t i = 0; i < values.size(); ++i) values[i] += delta[i] / kEstimates;
  return out;
}

PolarizationStack fista_prox(const PolarizationStack& x, double tau, const TvWeights& weights) {
  PolarizationStack out = haar_tv_prox(x, tau, weights);
  const auto in = x.values();
  auto values = out.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = 0.5 * (std::max(in[i], 0.0) + values[i]);
  }
  return out;
}

double axis_total_variation(const PolarizationStack& x, TvAxis axis) {
  const LineLayout layout = lines_along(x, axis);
  const std::size_t n = layout.length;
  if (n < 2) return 0.0;
  const auto v = x.values();
  double total = 0.0;
  for (std::size_t start : layout.starts) {
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t next = (k + 1) % n;
      total += std::abs(v[start + next * layout.stride] - v[start + k * layout.stride]);
    }
  }
  return total;
}

double weighted_total_variation(const PolarizationStack& x, const TvWeights& weights) {
  return axis_total_variation(x, TvAxis::kRow) + axis_total_variation(x, TvAxis::kColumn) +
         weights.angle_weight() * axis_total_variation(x, TvAxis::kAngle);
}

}  // namespace polarlens
