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

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <cstddef>
#include <memory>
#include <new>
#include <stdexcept>

namespace polarlens::detail {

/// Smallest n' >= n whose only prime factors are 2, 3 and 5.
std::size_t next_fast_size(std::size_t n);

/// SIMD-aligned buffer from fftw_malloc; every buffer handed to a plan must
/// come from here so new-array execution keeps the planned alignment.
template <typename T>
class FftBuffer {
 public:
  FftBuffer() = default;
  explicit FftBuffer(std::size_t n)
      : size_(n), data_(static_cast<T*>(fftw_malloc(sizeof(T) * n))) {
    if (data_ == nullptr) throw std::bad_alloc();
    std::fill(data_.get(), data_.get() + n, T{});
  }
  T* data() { return data_.get(); }
  const T* data() const { return data_.get(); }
  std::size_t size() const { return size_; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

 private:
  struct Free {
    void operator()(T* p) const { fftw_free(p); }
  };
  std::size_t size_ = 0;
  std::unique_ptr<T[], Free> data_;
};

using Complex = std::complex<double>;

/// Real 2-D FFT of a fixed rows x cols grid. Plans are created with
/// FFTW_ESTIMATE (deterministic) under a global lock; execution is
/// thread-safe and may be shared between copies.
class RealFft2d {
 public:
  RealFft2d(std::size_t rows, std::size_t cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t spectrum_cols() const { return cols_ / 2 + 1; }
  std::size_t real_size() const { return rows_ * cols_; }
  std::size_t spectrum_size() const { return rows_ * spectrum_cols(); }

  FftBuffer<double> make_real() const { return FftBuffer<double>(real_size()); }
  FftBuffer<Complex> make_spectrum() const { return FftBuffer<Complex>(spectrum_size()); }

  void forward(FftBuffer<double>& in, FftBuffer<Complex>& out) const;
  /// Unnormalized inverse; destroys `in`. Divide by real_size() to invert
  /// `forward`.
  void inverse(FftBuffer<Complex>& in, FftBuffer<double>& out) const;

 private:
  struct Plans;
  std::size_t rows_;
  std::size_t cols_;
  std::shared_ptr<const Plans> plans_;
};

}  // namespace polarlens::detail
