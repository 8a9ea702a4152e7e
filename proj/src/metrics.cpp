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

#include "polarlens/metrics.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

namespace polarlens {
namespace {

constexpr int kWindow = 11;
constexpr int kRadius = kWindow / 2;
constexpr double kSigma = 1.5;
constexpr double kK1 = 0.01;
constexpr double kK2 = 0.03;

void require_same(PlaneView a, PlaneView b) {
  if (a.height != b.height || a.width != b.width || a.values.size() != b.values.size() ||
      a.values.size() != a.height * a.width) {
    throw Error("metric inputs differ in dimensions");
  }
}

std::array<double, kWindow> gaussian_taps() {
  std::array<double, kWindow> taps{};
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - kRadius;
    taps[i] = std::exp(-d * d / (2 * kSigma * kSigma));
    sum += taps[i];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

/// Half-sample symmetric extension: ... b a | a b c ... x y | y x ...
std::size_t reflect(long i, long n) {
  if (i < 0) i = -i - 1;
  if (i >= n) i = 2 * n - i - 1;
  return static_cast<std::size_t>(i);
}

/// Separable Gaussian blur with symmetric boundaries.
std::vector<double> blur(const std::vector<double>& in, std::size_t h, std::size_t w) {
  static const auto taps = gaussian_taps();
  std::vector<double> tmp(in.size());
  std::vector<double> out(in.size());
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      double s = 0.0;
      for (int k = -kRadius; k <= kRadius; ++k) {
        s += taps[k + kRadius] * in[r * w + reflect(static_cast<long>(c) + k, static_cast<long>(w))];
      }
      tmp[r * w + c] = s;
    }
  }
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      double s = 0.0;
      for (int k = -kRadius; k <= kRadius; ++k) {
        s += taps[k + kRadius] * tmp[reflect(static_cast<long>(r) + k, static_cast<long>(h)) * w + c];
      }
      out[r * w + c] = s;
    }
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

double psnr(PlaneView a, PlaneView b, double peak) {
  require_same(a, b);
  if (!(peak > 0.0)) throw Error("PSNR peak must be > 0");
  double sse = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double d = a.values[i] - b.values[i];
    sse += d * d;
  }
  const double mse = sse / static_cast<double>(a.values.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

double capped_psnr(PlaneView a, PlaneView b, double peak) {
  const double v = psnr(a, b, peak);
  return std::isinf(v) ? kPsnrCapDb : std::min(v, kPsnrCapDb);
}

double ssim(PlaneView a, PlaneView b, double peak) {
  require_same(a, b);
  if (!(peak > 0.0)) throw Error("SSIM peak must be > 0");
  if (a.height < kWindow || a.width < kWindow) {
    throw Error("image smaller than the 11x11 SSIM window");
  }
  const std::size_t n = a.values.size();
  std::vector<double> va(a.values.begin(), a.values.end());
  std::vector<double> vb(b.values.begin(), b.values.end());
  std::vector<double> aa(n), bb(n), ab(n);
  for (std::size_t i = 0; i < n; ++i) {
    aa[i] = va[i] * va[i];
    bb[i] = vb[i] * vb[i];
    ab[i] = va[i] * vb[i];
  }
  const auto mu_a = blur(va, a.height, a.width);
  const auto mu_b = blur(vb, a.height, a.width);
  const auto e_aa = blur(aa, a.height, a.width);
  const auto e_bb = blur(bb, a.height, a.width);
  const auto e_ab = blur(ab, a.height, a.width);

  const double c1 = (kK1 * peak) * (kK1 * peak);
  const double c2 = (kK2 * peak) * (kK2 * peak);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ma = mu_a[i];
    const double mb = mu_b[i];
    const double var_a = e_aa[i] - ma * ma;
    const double var_b = e_bb[i] - mb * mb;
    const double cov = e_ab[i] - ma * mb;
    total += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
  }
  return total / static_cast<double>(n);
}

MetricReport evaluate_stack(const PolarizationStack& pred, const PolarizationStack& gt, double peak) {
  if (!pred.same_shape(gt)) throw Error("evaluate: prediction and ground truth differ in dimensions");
  MetricReport report;
  report.peak = peak;
  for (std::size_t p = 0; p < gt.angles(); ++p) {
    for (std::size_t c = 0; c < gt.channels(); ++c) {
      const PlaneView a{pred.plane(p, c), gt.height(), gt.width()};
      const PlaneView b{gt.plane(p, c), gt.height(), gt.width()};
      std::string name = "I" + std::to_string(gt.angle_labels()[p]);
      if (gt.channels() == 3) name += std::string("_") + "RGB"[c];
      report.planes.push_back({std::move(name), capped_psnr(a, b, peak), ssim(a, b, peak)});
    }
  }
  for (const auto& m : report.planes) {
    report.psnr_db += m.psnr_db;
    report.ssim += m.ssim;
  }
  report.psnr_db /= static_cast<double>(report.planes.size());
  report.ssim /= static_cast<double>(report.planes.size());
  return report;
}

std::string metric_csv(const MetricReport& report) {
  std::string out = "plane,psnr_db,ssim\n";
  for (const auto& m : report.planes) {
    out += m.name + ',' + format_double(m.psnr_db) + ',' + format_double(m.ssim) + '\n';
  }
  out += "aggregate," + format_double(report.psnr_db) + ',' + format_double(report.ssim) + '\n';
  return out;
}

void write_metric_csv(const MetricReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(path.string() + ": cannot open for writing");
  out << metric_csv(report);
  if (!out) throw Error(path.string() + ": write failed");
}

}  // namespace polarlens
