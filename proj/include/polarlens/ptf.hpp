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
#include <filesystem>
#include <vector>

#include "polarlens/tensor.hpp"

namespace polarlens {

/// In-memory image of a PTF file: "PTF1", u32 ndim, ndim u32 dims, then
/// float32 payload, everything little-endian and row-major.
struct Tensor {
  std::vector<std::size_t> dims;
  std::vector<float> values;

  std::size_t element_count() const;
};

void save_tensor(const Tensor& t, const std::filesystem::path& path);
/// Rejects bad magic, truncated payloads, trailing bytes and non-finite values.
Tensor load_tensor(const std::filesystem::path& path);

// Core types map onto PTF dims as follows:
//   PolarizationStack  (angles, channels, rows, cols)
//   Image/Measurement  (channels, rows, cols)
//   Psf                (channels, rows, cols)
//   PolarizationMask   (angles, rows, cols) as a 0/1 indicator
// Doubles are rounded to float32 on save.
Tensor to_tensor(const PolarizationStack& stack);
Tensor to_tensor(const Image& image);
Tensor to_tensor(const Psf& psf);
Tensor to_tensor(const PolarizationMask& mask);

PolarizationStack stack_from_tensor(const Tensor& t);
Image image_from_tensor(const Tensor& t);
Psf psf_from_tensor(const Tensor& t);
PolarizationMask mask_from_tensor(const Tensor& t);

template <typename T>
void save_tensor(const T& value, const std::filesystem::path& path) {
  save_tensor(to_tensor(value), path);
}

}  // namespace polarlens
