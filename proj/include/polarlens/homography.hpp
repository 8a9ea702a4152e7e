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

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <vector>

#include "polarlens/tensor.hpp"

namespace polarlens {

struct Point2 {
  double x = 0.0;  // column
  double y = 0.0;  // row
};

/// 3x3 projective map normalized so that H(2,2) = 1.
class Homography {
 public:
  Homography();
  /// Normalizes `m` by its bottom-right entry; throws if that entry is ~0 or
  /// the matrix is singular.
  explicit Homography(const Eigen::Matrix3d& m);

  const Eigen::Matrix3d& matrix() const { return m_; }
  Point2 apply(Point2 p) const;
  Homography inverse() const;

 private:
  Eigen::Matrix3d m_;
};

struct Correspondence {
  Point2 src;
  Point2 dst;
};

/// Normalized DLT: Hartley-normalize both point sets, take the right singular
/// vector of the 2n x 9 constraint matrix with the smallest singular value,
/// then undo the normalization. No outlier rejection.
Homography estimate_homography(const std::vector<Point2>& src, const std::vector<Point2>& dst);
Homography estimate_homography(const std::vector<Correspondence>& pairs);

/// Reads `sx sy dx dy` lines; blank lines and '#' comments are skipped.
std::vector<Correspondence> read_correspondences(const std::filesystem::path& path);

struct WarpResult {
  Image image;
  /// 1 where the output pixel maps inside the source, per pixel (row-major).
  std::vector<std::uint8_t> coverage;
};

/// Inverse-maps every output pixel centre through h^-1 and samples the source
/// bilinearly. Samples outside the source are 0 with coverage 0.
WarpResult warp_image(const Image& img, const Homography& h, std::size_t out_height,
                      std::size_t out_width);

}  // namespace polarlens
