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

#include "polarlens/homography.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

namespace polarlens {
namespace {

constexpr double kSingularTolerance = 1e-12;
constexpr double kRankTolerance = 1e-10;

/// Similarity that moves the centroid to the origin and the mean distance to
/// sqrt(2).
Eigen::Matrix3d hartley_normalization(const std::vector<Point2>& pts) {
  double cx = 0.0;
  double cy = 0.0;
  for (const auto& p : pts) {
    cx += p.x;
    cy += p.y;
  }
  cx /= static_cast<double>(pts.size());
  cy /= static_cast<double>(pts.size());
  double mean_dist = 0.0;
  for (const auto& p : pts) mean_dist += std::hypot(p.x - cx, p.y - cy);
  mean_dist /= static_cast<double>(pts.size());
  if (!(mean_dist > 0.0)) throw Error("degenerate configuration: coincident points");
  const double s = std::sqrt(2.0) / mean_dist;
  Eigen::Matrix3d t;
  t << s, 0, -s * cx, 0, s, -s * cy, 0, 0, 1;
  return t;
}

std::vector<Point2> transform(const Eigen::Matrix3d& t, const std::vector<Point2>& pts) {
  std::vector<Point2> out;
  out.reserve(pts.size());
  for (const auto& p : pts) {
    const Eigen::Vector3d q = t * Eigen::Vector3d(p.x, p.y, 1.0);
    out.push_back({q.x() / q.z(), q.y() / q.z()});
  }
  return out;
}

bool has_collinear_triple(const std::vector<Point2>& pts) {
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      for (std::size_t k = j + 1; k < pts.size(); ++k) {
        const double cross = (pts[j].x - pts[i].x) * (pts[k].y - pts[i].y) -
                             (pts[j].y - pts[i].y) * (pts[k].x - pts[i].x);
        if (std::abs(cross) < 1e-9) return true;
      }
    }
  }
  return false;
}

}  // namespace

Homography::Homography() : m_(Eigen::Matrix3d::Identity()) {}

Homography::Homography(const Eigen::Matrix3d& m) {
  if (std::abs(m(2, 2)) < kSingularTolerance) {
    throw Error("homography bottom-right entry is zero; cannot normalize");
  }
  m_ = m / m(2, 2);
  if (std::abs(m_.determinant()) <= kSingularTolerance) throw Error("singular homography");
}

Point2 Homography::apply(Point2 p) const {
  const Eigen::Vector3d q = m_ * Eigen::Vector3d(p.x, p.y, 1.0);
  return {q.x() / q.z(), q.y() / q.z()};
}

Homography Homography::inverse() const { return Homography(m_.inverse()); }

Homography estimate_homography(const std::vector<Point2>& src, const std::vector<Point2>& dst) {
  if (src.size() != dst.size()) throw Error("correspondence lists differ in length");
  if (src.size() < 4) {
    throw Error("homography needs at least 4 correspondences, got " + std::to_string(src.size()));
  }
  const Eigen::Matrix3d t_src = hartley_normalization(src);
  const Eigen::Matrix3d t_dst = hartley_normalization(dst);
  const auto ns = transform(t_src, src);
  const auto nd = transform(t_dst, dst);
  if (src.size() == 4 && (has_collinear_triple(ns) || has_collinear_triple(nd))) {
    throw Error("degenerate configuration: three collinear points");
  }

  const Eigen::Index n = static_cast<Eigen::Index>(src.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, 9);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = ns[i].x;
    const double y = ns[i].y;
    const double u = nd[i].x;
    const double v = nd[i].y;
    a.row(2 * i) << -x, -y, -1, 0, 0, 0, u * x, u * y, u;
    a.row(2 * i + 1) << 0, 0, 0, -x, -y, -1, v * x, v * y, v;
  }

  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  // A unique solution needs rank 8: the eighth singular value must be clear of zero.
  if (sv.size() < 8 || sv(7) <= kRankTolerance * sv(0)) {
    throw Error("degenerate configuration: rank-deficient constraint matrix");
  }
  const Eigen::VectorXd h = svd.matrixV().col(8);
  Eigen::Matrix3d hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  return Homography(t_dst.inverse() * hn * t_src);
}

Homography estimate_homography(const std::vector<Correspondence>& pairs) {
  std::vector<Point2> src;
  std::vector<Point2> dst;
  for (const auto& c : pairs) {
    src.push_back(c.src);
    dst.push_back(c.dst);
  }
  return estimate_homography(src, dst);
}

std::vector<Correspondence> read_correspondences(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(path.string() + ": cannot open for reading");
  std::vector<Correspondence> out;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    fields.imbue(std::locale::classic());
    Correspondence c;
    if (!(fields >> c.src.x)) continue;  // blank or comment-only
    std::string extra;
    if (!(fields >> c.src.y >> c.dst.x >> c.dst.y) || (fields >> extra)) {
      throw Error(path.string() + ":" + std::to_string(lineno) +
                  ": expected four numbers 'sx sy dx dy'");
    }
    out.push_back(c);
  }
  return out;
}

WarpResult warp_image(const Image& img, const Homography& h, std::size_t out_height,
                      std::size_t out_width) {
  const Homography inv = h.inverse();
  const std::size_t H = img.height();
  const std::size_t W = img.width();
  constexpr double kEdge = 1e-9;

  WarpResult result{Image(out_height, out_width, img.channels()),
                    std::vector<std::uint8_t>(out_height * out_width, 0)};
  for (std::size_t r = 0; r < out_height; ++r) {
    for (std::size_t c = 0; c < out_width; ++c) {
      const Point2 s = inv.apply({static_cast<double>(c), static_cast<double>(r)});
      if (!(s.x >= -kEdge && s.x <= static_cast<double>(W - 1) + kEdge && s.y >= -kEdge &&
            s.y <= static_cast<double>(H - 1) + kEdge)) {
        continue;
      }
      const double sx = std::clamp(s.x, 0.0, static_cast<double>(W - 1));
      const double sy = std::clamp(s.y, 0.0, static_cast<double>(H - 1));
      const auto x0 = static_cast<std::size_t>(std::floor(sx));
      const auto y0 = static_cast<std::size_t>(std::floor(sy));
      const std::size_t x1 = std::min(x0 + 1, W - 1);
      const std::size_t y1 = std::min(y0 + 1, H - 1);
      const double fx = sx - static_cast<double>(x0);
      const double fy = sy - static_cast<double>(y0);
      for (std::size_t ch = 0; ch < img.channels(); ++ch) {
        const double top = (1.0 - fx) * img.at(ch, y0, x0) + fx * img.at(ch, y0, x1);
        const double bottom = (1.0 - fx) * img.at(ch, y1, x0) + fx * img.at(ch, y1, x1);
        result.image.at(ch, r, c) = (1.0 - fy) * top + fy * bottom;
      }
      result.coverage[r * out_width + c] = 1;
    }
  }
  return result;
}

}  // namespace polarlens
