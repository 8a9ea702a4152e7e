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

#include "polarlens/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <memory>
#include <string>

namespace polarlens {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f != nullptr) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

Error png_error(const std::filesystem::path& path, const std::string& msg) {
  return Error(path.string() + ": " + msg);
}

}  // namespace

RawImage read_png_raw(const std::filesystem::path& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw png_error(path, "cannot open for reading");

  png_byte header[8];
  if (std::fread(header, 1, 8, file.get()) != 8 || png_sig_cmp(header, 0, 8) != 0) {
    throw png_error(path, "not a PNG file");
  }

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) throw png_error(path, "libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw png_error(path, "libpng init failed");
  }

  RawImage raw;
  std::vector<png_byte> buffer;
  std::vector<png_bytep> rows;
  // libpng reports errors by longjmp; no objects with non-trivial destructors
  // are created between setjmp and the read calls below.
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw png_error(path, "corrupt PNG data");
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const png_byte color_type = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  raw.height = png_get_image_height(png, info);
  raw.width = png_get_image_width(png, info);
  raw.channels = png_get_channels(png, info);
  raw.bit_depth = png_get_bit_depth(png, info);
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  buffer.resize(rowbytes * raw.height);
  rows.resize(raw.height);
  for (std::size_t r = 0; r < raw.height; ++r) rows[r] = buffer.data() + r * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  if (raw.channels != 1 && raw.channels != 3) throw png_error(path, "unsupported channel layout");
  if (raw.bit_depth != 8 && raw.bit_depth != 16) throw png_error(path, "unsupported bit depth");

  const std::size_t bytes_per_sample = raw.bit_depth == 16 ? 2 : 1;
  raw.codes.resize(raw.channels * raw.height * raw.width);
  for (std::size_t r = 0; r < raw.height; ++r) {
    const png_byte* row = rows[r];
    for (std::size_t c = 0; c < raw.width; ++c) {
      for (std::size_t ch = 0; ch < raw.channels; ++ch) {
        const png_byte* s = row + (c * raw.channels + ch) * bytes_per_sample;
        const std::uint16_t code =
            bytes_per_sample == 2 ? static_cast<std::uint16_t>((s[0] << 8) | s[1]) : s[0];
        raw.codes[(ch * raw.height + r) * raw.width + c] = code;
      }
    }
  }
  return raw;
}

Image read_png(const std::filesystem::path& path) {
  const RawImage raw = read_png_raw(path);
  const double max_code = raw.bit_depth == 16 ? 65535.0 : 255.0;
  Image img(raw.height, raw.width, raw.channels);
  auto values = img.values();
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = raw.codes[i] / max_code;
  return img;
}

std::uint16_t quantize_unit(double value, int bit_depth) {
  const double max_code = bit_depth == 16 ? 65535.0 : 255.0;
  const double v = std::clamp(std::isfinite(value) ? value : 0.0, 0.0, 1.0);
  return static_cast<std::uint16_t>(std::floor(v * max_code + 0.5));
}

void write_png(const Image& image, const std::filesystem::path& path, int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) throw Error("PNG bit depth must be 8 or 16");
  if (image.channels() != 1 && image.channels() != 3) {
    throw Error("PNG export supports 1 or 3 channels, got " + std::to_string(image.channels()));
  }
  const std::size_t h = image.height();
  const std::size_t w = image.width();
  const std::size_t ch = image.channels();
  const std::size_t bytes_per_sample = bit_depth == 16 ? 2 : 1;

  std::vector<png_byte> buffer(h * w * ch * bytes_per_sample);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      for (std::size_t k = 0; k < ch; ++k) {
        const std::uint16_t code = quantize_unit(image.at(k, r, c), bit_depth);
        png_byte* d = buffer.data() + ((r * w + c) * ch + k) * bytes_per_sample;
        if (bytes_per_sample == 2) {
          d[0] = static_cast<png_byte>(code >> 8);
          d[1] = static_cast<png_byte>(code & 0xff);
        } else {
          d[0] = static_cast<png_byte>(code);
        }
      }
    }
  }
  std::vector<png_bytep> rows(h);
  for (std::size_t r = 0; r < h; ++r) rows[r] = buffer.data() + r * w * ch * bytes_per_sample;

  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw png_error(path, "cannot open for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) throw png_error(path, "libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    throw png_error(path, "libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw png_error(path, "PNG encode failed");
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), bit_depth,
               ch == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace polarlens
