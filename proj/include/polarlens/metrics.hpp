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

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "polarlens/tensor.hpp"

namespace polarlens {

/// Reported PSNR for identical planes (true PSNR is +inf).
inline constexpr double kPsnrCapDb = 100.0;

/// Read-only view of one image plane.
struct PlaneView {
  std::span<const double> values;
  std::size_t height = 0;
  std::size_t width = 0;
};

/// 10 log10(peak^2 / MSE). Returns +inf when MSE is zero.
double psnr(PlaneView a, PlaneView b, double peak = 1.0);

/// `psnr` with +inf replaced by kPsnrCapDb.
double capped_psnr(PlaneView a, PlaneView b, double peak = 1.0);

/// Mean SSIM over an 11x11 Gaussian window (sigma 1.5), K1 = 0.01,
/// K2 = 0.03, dynamic range `peak`, half-sample symmetric boundary extension.
double ssim(PlaneView a, PlaneView b, double peak = 1.0);

struct PlaneMetric {
  std::string name;
  double psnr_db = 0.0;  // capped
  double ssim = 0.0;
};

struct MetricReport {
  std::vector<PlaneMetric> planes;
  double psnr_db = 0.0;
  double ssim = 0.0;
  double peak = 1.0;
};

/// Per-(angle, channel) PSNR/SSIM and their arithmetic means: 3 planes for the
/// three-angle grayscale case, 12 for four-angle colour.
MetricReport evaluate_stack(const PolarizationStack& pred, const PolarizationStack& gt,
                            double peak = 1.0);

/// CSV with header "plane,psnr_db,ssim" and a final "aggregate" row.
void write_metric_csv(const MetricReport& report, const std::filesystem::path& path);
std::string metric_csv(const MetricReport& report);

}  // namespace polarlens
