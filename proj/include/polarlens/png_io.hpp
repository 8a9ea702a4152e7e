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

#include <cstdint>
#include <filesystem>
#include <vector>

#include "polarlens/tensor.hpp"

namespace polarlens {

/// Integer sensor codes as stored in a PNG, planar (channel, row, column).
struct RawImage {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
  int bit_depth = 8;
  std::vector<std::uint16_t> codes;
};

/// Reads an 8- or 16-bit grayscale or RGB PNG. Alpha is dropped and palettes
/// are expanded.
RawImage read_png_raw(const std::filesystem::path& path);

/// Reads a PNG and maps codes to [0,1] by dividing by the maximum code value.
Image read_png(const std::filesystem::path& path);

/// Writes a 1- or 3-channel image. Values are clamped to [0,1] and quantized
/// with round-half-up: code = floor(v * max_code + 0.5).
void write_png(const Image& image, const std::filesystem::path& path, int bit_depth = 8);

/// Quantization rule used by `write_png`.
std::uint16_t quantize_unit(double value, int bit_depth);

}  // namespace polarlens
