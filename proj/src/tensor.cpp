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

#include "polarlens/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

namespace polarlens {
namespace {

void require_nonzero(std::size_t height, std::size_t width, std::size_t channels) {
  if (height == 0 || width == 0 || channels == 0) {
    throw Error("zero-sized tensor dimension");
  }
}

void check_labels(const std::vector<int>& labels) {
  if (labels.empty() || labels.size() > 4) {
    throw Error("angle count must be between 1 and 4, got " + std::to_string(labels.size()));
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (std::find(std::begin(kSupportedAngles), std::end(kSupportedAngles), labels[i]) ==
        std::end(kSupportedAngles)) {
      throw Error("unsupported angle label " + std::to_string(labels[i]));
    }
    if (i > 0 && labels[i] <= labels[i - 1]) {
      throw Error("angle labels must be strictly increasing");
    }
  }
}

}  // namespace

std::vector<int> default_angle_labels(std::size_t angles) {
  if (angles == 0 || angles > 4) {
    throw Error("angle count must be between 1 and 4, got " + std::to_string(angles));
  }
  return {std::begin(kSupportedAngles), std::begin(kSupportedAngles) + angles};
}

PolarizationStack::PolarizationStack(std::size_t height, std::size_t width,
                                     std::size_t channels, std::size_t angles)
    : PolarizationStack(height, width, channels, default_angle_labels(angles)) {}

PolarizationStack::PolarizationStack(std::size_t height, std::size_t width,
                                     std::size_t channels, std::vector<int> angle_labels)
    : height_(height), width_(width), channels_(channels), angle_labels_(std::move(angle_labels)) {
  require_nonzero(height, width, channels);
  if (channels != 1 && channels != 3) {
    throw Error("channel count must be 1 or 3, got " + std::to_string(channels));
  }
  check_labels(angle_labels_);
  data_.assign(angle_labels_.size() * channels * height * width, 0.0);
}

PolarizationStack::PolarizationStack(std::size_t height, std::size_t width,
                                     std::size_t channels, std::vector<int> angle_labels,
                                     std::vector<double> data)
    : PolarizationStack(height, width, channels, std::move(angle_labels)) {
  if (data.size() != data_.size()) {
    throw Error("stack data length " + std::to_string(data.size()) + " does not match dims");
  }
  data_ = std::move(data);
  require_finite("stack");
}

int PolarizationStack::angle_index(int degrees) const {
  const auto it = std::find(angle_labels_.begin(), angle_labels_.end(), degrees);
  return it == angle_labels_.end() ? -1 : static_cast<int>(it - angle_labels_.begin());
}

std::span<double> PolarizationStack::plane(std::size_t angle, std::size_t channel) {
  return std::span<double>(data_).subspan((angle * channels_ + channel) * plane_size(),
                                          plane_size());
}

std::span<const double> PolarizationStack::plane(std::size_t angle, std::size_t channel) const {
  return std::span<const double>(data_).subspan((angle * channels_ + channel) * plane_size(),
                                                plane_size());
}

bool PolarizationStack::same_shape(const PolarizationStack& other) const {
  return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_ &&
         angle_labels_ == other.angle_labels_;
}

bool PolarizationStack::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void PolarizationStack::require_finite(const std::string& what) const {
  if (!all_finite()) throw Error(what + " contains non-finite values");
}

void PolarizationStack::clamp_nonnegative() {
  for (double& v : data_) v = std::max(v, 0.0);
}

bool PolarizationStack::is_acquisition_config() const {
  return (channels_ == 1 || channels_ == 3) &&
         (angle_labels_ == default_angle_labels(3) || angle_labels_ == default_angle_labels(4));
}

Image::Image(std::size_t height, std::size_t width, std::size_t channels)
    : height_(height), width_(width), channels_(channels) {
  require_nonzero(height, width, channels);
  data_.assign(channels * height * width, 0.0);
}

Image::Image(std::size_t height, std::size_t width, std::size_t channels, std::vector<double> data)
    : Image(height, width, channels) {
  if (data.size() != data_.size()) {
    throw Error("image data length " + std::to_string(data.size()) + " does not match dims");
  }
  data_ = std::move(data);
  if (!all_finite()) throw Error("image contains non-finite values");
}

std::span<double> Image::plane(std::size_t channel) {
  return std::span<double>(data_).subspan(channel * plane_size(), plane_size());
}

std::span<const double> Image::plane(std::size_t channel) const {
  return std::span<const double>(data_).subspan(channel * plane_size(), plane_size());
}

bool Image::same_shape(const Image& other) const {
  return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_;
}

bool Image::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Psf::Psf(Image kernel) : kernel_(std::move(kernel)) {
  if (kernel_.size() == 0) throw Error("zero-sized tensor dimension");
  for (double v : kernel_.values()) {
    if (!std::isfinite(v) || v < 0.0) throw Error("PSF values must be finite and non-negative");
  }
}

Psf normalize_psf(const Psf& psf) {
  Image out = psf.kernel();
  for (std::size_t c = 0; c < out.channels(); ++c) {
    auto plane = out.plane(c);
    const double sum = std::accumulate(plane.begin(), plane.end(), 0.0);
    if (!(sum > 0.0)) throw Error("degenerate PSF");
    for (double& v : plane) v /= sum;
  }
  return Psf(std::move(out));
}

Psf psf_to_grayscale(const Psf& psf) {
  if (psf.channels() == 1) return psf;
  Image gray(psf.height(), psf.width(), 1);
  auto dst = gray.plane(0);
  for (std::size_t c = 0; c < psf.channels(); ++c) {
    const auto src = psf.channel(c);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }
  for (double& v : dst) v /= static_cast<double>(psf.channels());
  return Psf(std::move(gray));
}

PolarizationMask::PolarizationMask(std::size_t height, std::size_t width, std::size_t angles,
                                   std::vector<std::uint8_t> selection)
    : height_(height), width_(width), angles_(angles), selection_(std::move(selection)) {
  require_nonzero(height, width, angles);
  if (angles > 4) throw Error("mask supports at most 4 angles");
  if (selection_.size() != height * width) throw Error("mask selection length does not match dims");
  for (auto s : selection_) {
    if (s >= angles) throw Error("mask selects angle index out of range");
  }
}

PolarizationMask PolarizationMask::from_indicator(std::size_t height, std::size_t width,
                                                  std::size_t angles,
                                                  std::span<const double> indicator) {
  require_nonzero(height, width, angles);
  const std::size_t n = height * width;
  if (indicator.size() != angles * n) throw Error("mask indicator length does not match dims");
  std::vector<std::uint8_t> selection(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    int count = 0;
    for (std::size_t p = 0; p < angles; ++p) {
      const double v = indicator[p * n + i];
      if (v == 1.0) {
        ++count;
        selection[i] = static_cast<std::uint8_t>(p);
      } else if (v != 0.0) {
        throw Error("mask entries must be 0 or 1");
      }
    }
    if (count != 1) throw Error("mask is not a partition: pixel selects " + std::to_string(count) +
                                " angles");
  }
  return PolarizationMask(height, width, angles, std::move(selection));
}

std::vector<double> PolarizationMask::indicator() const {
  const std::size_t n = height_ * width_;
  std::vector<double> out(angles_ * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) out[selection_[i] * n + i] = 1.0;
  return out;
}

bool PolarizationMask::is_partition() const {
  const auto dense = indicator();
  const std::size_t n = height_ * width_;
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t p = 0; p < angles_; ++p) sum += dense[p * n + i];
    if (sum != 1.0) return false;
  }
  return true;
}

std::uint64_t PolarizationMask::checksum() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t byte) {
    h ^= byte;
    h *= 1099511628211ULL;
  };
  for (std::uint64_t d : {static_cast<std::uint64_t>(height_), static_cast<std::uint64_t>(width_),
                          static_cast<std::uint64_t>(angles_)}) {
    for (int b = 0; b < 8; ++b) mix((d >> (8 * b)) & 0xffU);
  }
  for (auto s : selection_) mix(s);
  return h;
}

PolarizationStack to_gray3(const PolarizationStack& stack) {
  std::vector<int> labels = default_angle_labels(3);
  PolarizationStack out(stack.height(), stack.width(), 1, labels);
  for (std::size_t p = 0; p < labels.size(); ++p) {
    const int src = stack.angle_index(labels[p]);
    if (src < 0) throw Error("stack lacks the " + std::to_string(labels[p]) + " degree plane");
    auto dst = out.plane(p, 0);
    for (std::size_t c = 0; c < stack.channels(); ++c) {
      const auto plane = stack.plane(static_cast<std::size_t>(src), c);
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += plane[i];
    }
    for (double& v : dst) v /= static_cast<double>(stack.channels());
  }
  return out;
}

}  // namespace polarlens
