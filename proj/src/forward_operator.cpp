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

#include "polarlens/forward_operator.hpp"

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "fft.hpp"
#include "polarlens/parallel.hpp"

namespace polarlens {

using detail::Complex;
using detail::FftBuffer;
using detail::RealFft2d;

struct ForwardOperator::Impl {
  Psf psf;
  PolarizationMask mask;
  RealFft2d fft;
  std::size_t row_offset;
  std::size_t col_offset;
  std::vector<FftBuffer<Complex>> kernel_spectra;

  Impl(const Psf& k, const PolarizationMask& m, std::size_t pad_rows, std::size_t pad_cols)
      : psf(k),
        mask(m),
        fft(pad_rows, pad_cols),
        row_offset((k.height() - 1) / 2),
        col_offset((k.width() - 1) / 2) {
    for (std::size_t c = 0; c < psf.channels(); ++c) {
      auto real = fft.make_real();
      const auto kernel = psf.channel(c);
      for (std::size_t r = 0; r < psf.height(); ++r) {
        std::memcpy(real.data() + r * fft.cols(), kernel.data() + r * psf.width(),
                    psf.width() * sizeof(double));
      }
      auto spectrum = fft.make_spectrum();
      fft.forward(real, spectrum);
      kernel_spectra.push_back(std::move(spectrum));
    }
  }
};

ForwardOperator::ForwardOperator(const Psf& psf, const PolarizationMask& mask) {
  if (psf.channels() == 0 || mask.angles() == 0) throw Error("empty PSF or mask");
  if (psf.channels() != 1 && psf.channels() != 3) {
    throw Error("PSF must have 1 or 3 channels, got " + std::to_string(psf.channels()));
  }
  dims_ = {mask.height(), mask.width(), psf.channels(), mask.angles()};
  const std::size_t pad_rows = detail::next_fast_size(dims_.height + psf.height() - 1);
  const std::size_t pad_cols = detail::next_fast_size(dims_.width + psf.width() - 1);
  impl_ = std::make_shared<const Impl>(psf, mask, pad_rows, pad_cols);
}

std::size_t ForwardOperator::pad_height() const { return impl_->fft.rows(); }
std::size_t ForwardOperator::pad_width() const { return impl_->fft.cols(); }
std::size_t ForwardOperator::crop_row_offset() const { return impl_->row_offset; }
std::size_t ForwardOperator::crop_col_offset() const { return impl_->col_offset; }
const Psf& ForwardOperator::psf() const { return impl_->psf; }
const PolarizationMask& ForwardOperator::mask() const { return impl_->mask; }

PolarizationStack ForwardOperator::make_scene() const {
  return PolarizationStack(dims_.height, dims_.width, dims_.channels, dims_.angles);
}

Image ForwardOperator::make_measurement() const {
  return Image(dims_.height, dims_.width, dims_.channels);
}

Image ForwardOperator::apply(const PolarizationStack& x) const {
  if (x.height() != dims_.height || x.width() != dims_.width || x.channels() != dims_.channels ||
      x.angles() != dims_.angles) {
    throw Error("forward_apply: dimension mismatch between stack and operator");
  }
  const Impl& im = *impl_;
  const std::size_t H = dims_.height;
  const std::size_t W = dims_.width;
  const std::size_t P = dims_.angles;
  const std::size_t cols = im.fft.cols();
  const double scale = 1.0 / static_cast<double>(im.fft.real_size());

  // One cropped, unmasked convolution per (channel, angle) plane.
  std::vector<std::vector<double>> cropped(dims_.channels * P);
  parallel_for(cropped.size(), [&](std::size_t idx) {
    const std::size_t c = idx / P;
    const std::size_t p = idx % P;
    auto real = im.fft.make_real();
    const auto src = x.plane(p, c);
    for (std::size_t r = 0; r < H; ++r) {
      std::memcpy(real.data() + r * cols, src.data() + r * W, W * sizeof(double));
    }
    auto spectrum = im.fft.make_spectrum();
    im.fft.forward(real, spectrum);
    const auto& kernel = im.kernel_spectra[c];
    for (std::size_t i = 0; i < spectrum.size(); ++i) spectrum[i] *= kernel[i];
    im.fft.inverse(spectrum, real);
    auto& out = cropped[idx];
    out.resize(H * W);
    for (std::size_t r = 0; r < H; ++r) {
      const double* row = real.data() + (r + im.row_offset) * cols + im.col_offset;
      for (std::size_t col = 0; col < W; ++col) out[r * W + col] = row[col] * scale;
    }
  });

  // The mask is a partition, so each sensor pixel takes exactly one plane.
  Image y = make_measurement();
  const auto selection = im.mask.selection();
  for (std::size_t c = 0; c < dims_.channels; ++c) {
    auto dst = y.plane(c);
    for (std::size_t i = 0; i < H * W; ++i) dst[i] = cropped[c * P + selection[i]][i];
  }
  return y;
}

PolarizationStack ForwardOperator::adjoint(const Image& y) const {
  if (y.height() != dims_.height || y.width() != dims_.width || y.channels() != dims_.channels) {
    throw Error("adjoint_apply: dimension mismatch between measurement and operator");
  }
  const Impl& im = *impl_;
  const std::size_t H = dims_.height;
  const std::size_t W = dims_.width;
  const std::size_t P = dims_.angles;
  const std::size_t cols = im.fft.cols();
  const double scale = 1.0 / static_cast<double>(im.fft.real_size());
  const auto selection = im.mask.selection();

  PolarizationStack x = make_scene();
  parallel_for(dims_.channels * P, [&](std::size_t idx) {
    const std::size_t c = idx / P;
    const std::size_t p = idx % P;
    auto real = im.fft.make_real();
    const auto src = y.plane(c);
    for (std::size_t r = 0; r < H; ++r) {
      double* row = real.data() + (r + im.row_offset) * cols + im.col_offset;
      for (std::size_t col = 0; col < W; ++col) {
        if (selection[r * W + col] == p) row[col] = src[r * W + col];
      }
    }
    auto spectrum = im.fft.make_spectrum();
    im.fft.forward(real, spectrum);
    const auto& kernel = im.kernel_spectra[c];
    for (std::size_t i = 0; i < spectrum.size(); ++i) spectrum[i] *= std::conj(kernel[i]);
    im.fft.inverse(spectrum, real);
    auto dst = x.plane(p, c);
    for (std::size_t r = 0; r < H; ++r) {
      for (std::size_t col = 0; col < W; ++col) dst[r * W + col] = real[r * cols + col] * scale;
    }
  });
  return x;
}

PolarizationStack ForwardOperator::normal(const PolarizationStack& x) const {
  return adjoint(apply(x));
}

Measurement forward_apply(const ForwardOperator& op, const PolarizationStack& x) {
  return {op.apply(x), 0.0};
}

PolarizationStack adjoint_apply(const ForwardOperator& op, const Measurement& y) {
  return op.adjoint(y.image);
}

Eigen::MatrixXd build_dense_operator(const ForwardOperator& op) {
  const SceneDims& d = op.scene_dims();
  if (d.size() > kDenseOperatorLimit) {
    throw Error("dense operator size guard exceeded: " + std::to_string(d.size()) + " > " +
                std::to_string(kDenseOperatorLimit));
  }
  const std::size_t rows = d.height * d.width * d.channels;
  Eigen::MatrixXd dense(rows, d.size());
  PolarizationStack basis = op.make_scene();
  for (std::size_t j = 0; j < d.size(); ++j) {
    basis.values()[j] = 1.0;
    const Image column = op.apply(basis);
    basis.values()[j] = 0.0;
    for (std::size_t i = 0; i < rows; ++i) dense(i, j) = column.values()[i];
  }
  return dense;
}

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double e : v) s += e * e;
  return std::sqrt(s);
}

void fill_uniform(std::mt19937_64& rng, std::span<double> v) {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (double& e : v) e = dist(rng);
}

}  // namespace

double estimate_lipschitz(const ForwardOperator& op, std::size_t iters, std::uint64_t seed) {
  if (iters == 0) throw Error("estimate_lipschitz: iters must be >= 1");
  std::mt19937_64 rng(seed);
  PolarizationStack v = op.make_scene();
  fill_uniform(rng, v.values());
  double eigenvalue = 0.0;
  for (std::size_t k = 0; k < iters; ++k) {
    const double nv = norm2(v.values());
    for (double& e : v.values()) e /= nv;
    PolarizationStack w = op.normal(v);
    const double nw = norm2(w.values());
    if (nw == 0.0) {
      // Start landed in the null space; draw a fresh start.
      fill_uniform(rng, v.values());
      continue;
    }
    double rayleigh = 0.0;
    const auto vv = v.values();
    const auto ww = w.values();
    for (std::size_t i = 0; i < vv.size(); ++i) rayleigh += vv[i] * ww[i];
    eigenvalue = rayleigh;
    v = std::move(w);
  }
  return eigenvalue;
}

double LipschitzCache::get(const ForwardOperator& op, std::size_t iters, std::uint64_t seed) {
  std::uint64_t h = op.mask().checksum();
  const auto psf = op.psf().kernel().values();
  for (std::uint64_t dim : {op.psf().height(), op.psf().width(), op.psf().channels()}) {
    h = (h ^ dim) * 1099511628211ULL;
  }
  for (double v : psf) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof bits);
    h = (h ^ bits) * 1099511628211ULL;
  }
  const auto key = std::make_tuple(h, iters, seed);
  std::lock_guard lock(mutex_);
  if (auto it = values_.find(key); it != values_.end()) return it->second;
  const double value = estimate_lipschitz(op, iters, seed);
  values_.emplace(key, value);
  return value;
}

}  // namespace polarlens
