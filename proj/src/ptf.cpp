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

#include "polarlens/ptf.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

namespace polarlens {
namespace {

constexpr std::array<char, 4> kMagic = {'P', 'T', 'F', '1'};

static_assert(std::numeric_limits<float>::is_iec559, "PTF payload requires IEEE-754 floats");

void put_u32(std::string& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xffU));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

Error io_error(const std::filesystem::path& path, const std::string& msg) {
  return Error(path.string() + ": " + msg);
}

std::vector<float> to_float(std::span<const double> values) {
  std::vector<float> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = static_cast<float>(values[i]);
  return out;
}

std::vector<double> to_double(const std::vector<float>& values) {
  return {values.begin(), values.end()};
}

void require_ndim(const Tensor& t, std::size_t ndim, const char* what) {
  if (t.dims.size() != ndim) {
    throw Error(std::string(what) + " expects a " + std::to_string(ndim) + "-D tensor, got " +
                std::to_string(t.dims.size()) + "-D");
  }
}

}  // namespace

std::size_t Tensor::element_count() const {
  if (dims.empty()) return 0;
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

void save_tensor(const Tensor& t, const std::filesystem::path& path) {
  if (t.dims.empty()) throw Error("zero-dimensional tensor");
  if (t.dims.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error("dimension overflow: too many dims");
  }
  for (auto d : t.dims) {
    if (d > std::numeric_limits<std::uint32_t>::max()) throw Error("dimension overflow beyond 2^32-1");
  }
  if (t.values.size() != t.element_count()) throw Error("tensor payload does not match dims");
  for (float v : t.values) {
    if (!std::isfinite(v)) throw Error("tensor contains non-finite values");
  }

  std::string bytes(kMagic.begin(), kMagic.end());
  put_u32(bytes, static_cast<std::uint32_t>(t.dims.size()));
  for (auto d : t.dims) put_u32(bytes, static_cast<std::uint32_t>(d));
  bytes.reserve(bytes.size() + 4 * t.values.size());
  for (float v : t.values) put_u32(bytes, std::bit_cast<std::uint32_t>(v));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error(path, "cannot open for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw io_error(path, "write failed");
}

Tensor load_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error(path, "cannot open for reading");
  const std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto* bytes = reinterpret_cast<const unsigned char*>(raw.data());

  if (raw.size() < 8 || std::memcmp(raw.data(), kMagic.data(), kMagic.size()) != 0) {
    throw io_error(path, "bad magic");
  }
  const std::uint32_t ndim = get_u32(bytes + 4);
  if (ndim == 0) throw io_error(path, "zero-dimensional tensor");
  std::size_t offset = 8;
  if (raw.size() < offset + 4ULL * ndim) throw io_error(path, "truncated header");

  Tensor t;
  t.dims.resize(ndim);
  // Overflow of the element count would wrap; bound it by the file size instead.
  long double expected = 1.0L;
  for (std::uint32_t i = 0; i < ndim; ++i) {
    t.dims[i] = get_u32(bytes + offset);
    expected *= static_cast<long double>(t.dims[i]);
    offset += 4;
  }
  const std::size_t available = raw.size() - offset;
  if (expected * 4.0L > static_cast<long double>(available)) {
    throw io_error(path, "truncated payload");
  }
  const std::size_t count = t.element_count();
  if (count * 4 != available) throw io_error(path, "trailing bytes after payload");

  t.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    t.values[i] = std::bit_cast<float>(get_u32(bytes + offset + 4 * i));
    if (!std::isfinite(t.values[i])) throw io_error(path, "non-finite value in payload");
  }
  return t;
}

Tensor to_tensor(const PolarizationStack& stack) {
  return {{stack.angles(), stack.channels(), stack.height(), stack.width()},
          to_float(stack.values())};
}

Tensor to_tensor(const Image& image) {
  return {{image.channels(), image.height(), image.width()}, to_float(image.values())};
}

Tensor to_tensor(const Psf& psf) { return to_tensor(psf.kernel()); }

Tensor to_tensor(const PolarizationMask& mask) {
  return {{mask.angles(), mask.height(), mask.width()}, to_float(mask.indicator())};
}

PolarizationStack stack_from_tensor(const Tensor& t) {
  require_ndim(t, 4, "polarization stack");
  return PolarizationStack(t.dims[2], t.dims[3], t.dims[1], default_angle_labels(t.dims[0]),
                           to_double(t.values));
}

Image image_from_tensor(const Tensor& t) {
  require_ndim(t, 3, "image");
  return Image(t.dims[1], t.dims[2], t.dims[0], to_double(t.values));
}

Psf psf_from_tensor(const Tensor& t) { return Psf(image_from_tensor(t)); }

PolarizationMask mask_from_tensor(const Tensor& t) {
  require_ndim(t, 3, "polarization mask");
  const auto dense = to_double(t.values);
  return PolarizationMask::from_indicator(t.dims[1], t.dims[2], t.dims[0], dense);
}

}  // namespace polarlens
