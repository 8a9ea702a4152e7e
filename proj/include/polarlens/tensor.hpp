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

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace polarlens {

/// Base class for all errors raised by the library. `what()` is a single line.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Angles the optics can sample, in the order they appear in a stack.
inline constexpr int kSupportedAngles[] = {0, 45, 90, 135};

/// Default labels for a stack with `angles` planes: the first `angles` entries
/// of (0, 45, 90, 135).
std::vector<int> default_angle_labels(std::size_t angles);

/// Multi-angle intensity tensor, laid out (angle, channel, row, column)
/// row-major so each (angle, channel) plane is contiguous.
class PolarizationStack {
 public:
  PolarizationStack() = default;
  /// Zero-filled stack. Throws on zero-sized dims, channels outside {1,3} or
  /// more than four angles.
  PolarizationStack(std::size_t height, std::size_t width, std::size_t channels,
                    std::size_t angles);
  PolarizationStack(std::size_t height, std::size_t width, std::size_t channels,
                    std::vector<int> angle_labels);
  PolarizationStack(std::size_t height, std::size_t width, std::size_t channels,
                    std::vector<int> angle_labels, std::vector<double> data);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t channels() const { return channels_; }
  std::size_t angles() const { return angle_labels_.size(); }
  std::size_t plane_size() const { return height_ * width_; }
  std::size_t size() const { return data_.size(); }
  const std::vector<int>& angle_labels() const { return angle_labels_; }

  /// Index of the plane holding `degrees`, or -1.
  int angle_index(int degrees) const;

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  std::span<double> plane(std::size_t angle, std::size_t channel);
  std::span<const double> plane(std::size_t angle, std::size_t channel) const;

  double& at(std::size_t angle, std::size_t channel, std::size_t row, std::size_t col) {
    return data_[((angle * channels_ + channel) * height_ + row) * width_ + col];
  }
  double at(std::size_t angle, std::size_t channel, std::size_t row, std::size_t col) const {
    return data_[((angle * channels_ + channel) * height_ + row) * width_ + col];
  }

  bool same_shape(const PolarizationStack& other) const;
  bool all_finite() const;
  /// Throws unless every value is finite.
  void require_finite(const std::string& what) const;
  /// Clamps negatives to zero in place (the `nonneg` flag of reconstructions).
  void clamp_nonnegative();

  /// Channels in {1,3}, angles in {3,4} with canonical labels: the two
  /// acquisition configurations the pipeline accepts.
  bool is_acquisition_config() const;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::size_t channels_ = 0;
  std::vector<int> angle_labels_;
  std::vector<double> data_;
};

/// Planar image, laid out (channel, row, column).
class Image {
 public:
  Image() = default;
  Image(std::size_t height, std::size_t width, std::size_t channels);
  Image(std::size_t height, std::size_t width, std::size_t channels, std::vector<double> data);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t channels() const { return channels_; }
  std::size_t plane_size() const { return height_ * width_; }
  std::size_t size() const { return data_.size(); }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  std::span<double> plane(std::size_t channel);
  std::span<const double> plane(std::size_t channel) const;

  double& at(std::size_t channel, std::size_t row, std::size_t col) {
    return data_[(channel * height_ + row) * width_ + col];
  }
  double at(std::size_t channel, std::size_t row, std::size_t col) const {
    return data_[(channel * height_ + row) * width_ + col];
  }

  bool same_shape(const Image& other) const;
  bool all_finite() const;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::size_t channels_ = 0;
  std::vector<double> data_;
};

/// Sensor image plus the standard deviation of the additive noise used to
/// simulate it (0 for real captures).
struct Measurement {
  Image image;
  double noise_sigma = 0.0;
};

/// Per-channel diffuser point-spread function. Values are non-negative and
/// finite; construction enforces both.
class Psf {
 public:
  Psf() = default;
  explicit Psf(Image kernel);

  std::size_t height() const { return kernel_.height(); }
  std::size_t width() const { return kernel_.width(); }
  std::size_t channels() const { return kernel_.channels(); }
  const Image& kernel() const { return kernel_; }
  std::span<const double> channel(std::size_t c) const { return kernel_.plane(c); }

 private:
  Image kernel_;
};

/// Scales every channel to unit sum. Throws "degenerate PSF" when a channel
/// sums to zero.
Psf normalize_psf(const Psf& psf);

/// Averages the PSF channels into a single grayscale channel.
Psf psf_to_grayscale(const Psf& psf);

/// Binary per-pixel angle selector. Every pixel selects exactly one angle;
/// construction enforces the partition.
class PolarizationMask {
 public:
  PolarizationMask() = default;
  /// `selection[r * width + c]` is the angle index chosen at that pixel.
  PolarizationMask(std::size_t height, std::size_t width, std::size_t angles,
                   std::vector<std::uint8_t> selection);

  /// Builds from a dense indicator laid out (angle, row, column). Throws unless
  /// entries are in {0,1} and each pixel sums to exactly one.
  static PolarizationMask from_indicator(std::size_t height, std::size_t width,
                                         std::size_t angles,
                                         std::span<const double> indicator);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t angles() const { return angles_; }

  std::size_t selected(std::size_t row, std::size_t col) const {
    return selection_[row * width_ + col];
  }
  bool selects(std::size_t angle, std::size_t row, std::size_t col) const {
    return selected(row, col) == angle;
  }
  std::span<const std::uint8_t> selection() const { return selection_; }

  /// Dense 0/1 indicator laid out (angle, row, column).
  std::vector<double> indicator() const;
  /// Checks the per-pixel partition property on the dense indicator.
  bool is_partition() const;
  /// FNV-1a over dims and selection; printed by the CLI so runs can be compared.
  std::uint64_t checksum() const;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::size_t angles_ = 0;
  std::vector<std::uint8_t> selection_;
};

/// Drops the 135 degree plane and averages colour channels: the three-angle
/// grayscale configuration derived from a four-angle colour stack.
PolarizationStack to_gray3(const PolarizationStack& stack);

}  // namespace polarlens
