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

#include "fft.hpp"

#include <mutex>

namespace polarlens::detail {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

std::size_t next_fast_size(std::size_t n) {
  if (n <= 1) return 1;
  for (std::size_t candidate = n;; ++candidate) {
    std::size_t m = candidate;
    for (std::size_t f : {2U, 3U, 5U}) {
      while (m % f == 0) m /= f;
    }
    if (m == 1) return candidate;
  }
}

struct RealFft2d::Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (r2c != nullptr) fftw_destroy_plan(r2c);
    if (c2r != nullptr) fftw_destroy_plan(c2r);
  }
};

RealFft2d::RealFft2d(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
  auto real = make_real();
  auto spectrum = make_spectrum();
  auto plans = std::make_shared<Plans>();
  {
    std::lock_guard lock(planner_mutex());
    const int r = static_cast<int>(rows);
    const int c = static_cast<int>(cols);
    auto* spec = reinterpret_cast<fftw_complex*>(spectrum.data());
    plans->r2c = fftw_plan_dft_r2c_2d(r, c, real.data(), spec, FFTW_ESTIMATE);
    plans->c2r = fftw_plan_dft_c2r_2d(r, c, spec, real.data(), FFTW_ESTIMATE);
  }
  if (plans->r2c == nullptr || plans->c2r == nullptr) throw std::runtime_error("FFTW planning failed");
  plans_ = std::move(plans);
}

void RealFft2d::forward(FftBuffer<double>& in, FftBuffer<Complex>& out) const {
  fftw_execute_dft_r2c(plans_->r2c, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
}

void RealFft2d::inverse(FftBuffer<Complex>& in, FftBuffer<double>& out) const {
  fftw_execute_dft_c2r(plans_->c2r, reinterpret_cast<fftw_complex*>(in.data()), out.data());
}

}  // namespace polarlens::detail
