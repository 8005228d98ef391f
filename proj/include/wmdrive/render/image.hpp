// Copyright 2026 The wmdrive Authors
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

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "wmdrive/error.hpp"
#include "wmdrive/geometry.hpp"

namespace wmdrive::render {

/// Row-major 8-bit RGB raster.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  Image() = default;
  Image(int w, int h, Rgb fill = {}) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3) {
    if (w < 0 || h < 0) {
      throw Error(ErrorKind::invalid_argument, "negative image size");
    }
    for (std::size_t i = 0; i < rgb.size(); i += 3) {
      rgb[i] = fill.r;
      rgb[i + 1] = fill.g;
      rgb[i + 2] = fill.b;
    }
  }

  std::size_t offset(int x, int y) const {
    return (static_cast<std::size_t>(y) * width + x) * 3;
  }
  Rgb at(int x, int y) const {
    const auto o = offset(x, y);
    return {rgb[o], rgb[o + 1], rgb[o + 2]};
  }
  void set(int x, int y, Rgb c) {
    const auto o = offset(x, y);
    rgb[o] = c.r;
    rgb[o + 1] = c.g;
    rgb[o + 2] = c.b;
  }
  friend bool operator==(const Image&, const Image&) = default;
};

namespace detail {

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

inline std::uint32_t get_u32(const std::uint8_t* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) |
         std::uint32_t{p[3]};
}

inline void put_chunk(std::vector<std::uint8_t>& out, const char* type,
                      const std::vector<std::uint8_t>& data) {
  put_u32(out, static_cast<std::uint32_t>(data.size()));
  const std::size_t type_pos = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  const auto crc = crc32(0L, out.data() + type_pos, static_cast<uInt>(data.size() + 4));
  put_u32(out, static_cast<std::uint32_t>(crc));
}

inline constexpr std::array<std::uint8_t, 8> kPngSignature{137, 80, 78, 71, 13, 10, 26, 10};

}  // namespace detail

/// 8-bit RGB PNG, filter type 0 on every row. Output depends only on the pixels.
inline std::vector<std::uint8_t> encode_png(const Image& img, int level = 1) {
  if (img.width <= 0 || img.height <= 0) {
    throw Error(ErrorKind::invalid_argument, "cannot encode an empty image");
  }
  const std::size_t stride = static_cast<std::size_t>(img.width) * 3;
  std::vector<std::uint8_t> raw;
  raw.reserve((stride + 1) * img.height);
  for (int y = 0; y < img.height; ++y) {
    raw.push_back(0);
    const auto* row = img.rgb.data() + y * stride;
    raw.insert(raw.end(), row, row + stride);
  }
  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> z(bound);
  if (compress2(z.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), level) != Z_OK) {
    throw Error(ErrorKind::io, "zlib compression failed");
  }
  z.resize(bound);

  std::vector<std::uint8_t> out(detail::kPngSignature.begin(), detail::kPngSignature.end());
  std::vector<std::uint8_t> ihdr;
  detail::put_u32(ihdr, static_cast<std::uint32_t>(img.width));
  detail::put_u32(ihdr, static_cast<std::uint32_t>(img.height));
  ihdr.insert(ihdr.end(), {8, 2, 0, 0, 0});
  detail::put_chunk(out, "IHDR", ihdr);
  detail::put_chunk(out, "IDAT", z);
  detail::put_chunk(out, "IEND", {});
  return out;
}

/// Decodes the subset written by encode_png (8-bit RGB, non-interlaced,
/// filter 0). Anything else is rejected.
inline Image decode_png(const std::vector<std::uint8_t>& data) {
  auto fail = [](const std::string& m) { return Error(ErrorKind::invalid_argument, "png: " + m); };
  if (data.size() < 8 || !std::equal(detail::kPngSignature.begin(), detail::kPngSignature.end(), data.begin())) {
    throw fail("bad signature");
  }
  std::size_t pos = 8;
  int w = 0, h = 0;
  std::vector<std::uint8_t> z;
  while (pos + 12 <= data.size()) {
    const auto len = detail::get_u32(&data[pos]);
    if (pos + 12 + len > data.size()) throw fail("truncated chunk");
    const std::string type(reinterpret_cast<const char*>(&data[pos + 4]), 4);
    const std::uint8_t* body = &data[pos + 8];
    const auto crc = crc32(0L, &data[pos + 4], len + 4);
    if (crc != detail::get_u32(body + len)) throw fail("crc mismatch in " + type);
    if (type == "IHDR") {
      if (len != 13) throw fail("bad IHDR");
      w = static_cast<int>(detail::get_u32(body));
      h = static_cast<int>(detail::get_u32(body + 4));
      if (body[8] != 8 || body[9] != 2 || body[12] != 0) throw fail("unsupported format");
    } else if (type == "IDAT") {
      z.insert(z.end(), body, body + len);
    } else if (type == "IEND") {
      break;
    }
    pos += 12 + len;
  }
  if (w <= 0 || h <= 0) throw fail("missing IHDR");
  const std::size_t stride = static_cast<std::size_t>(w) * 3;
  std::vector<std::uint8_t> raw((stride + 1) * h);
  uLongf raw_len = static_cast<uLongf>(raw.size());
  if (uncompress(raw.data(), &raw_len, z.data(), static_cast<uLong>(z.size())) != Z_OK ||
      raw_len != raw.size()) {
    throw fail("bad image data");
  }
  Image img(w, h);
  for (int y = 0; y < h; ++y) {
    if (raw[y * (stride + 1)] != 0) throw fail("unsupported row filter");
    std::memcpy(img.rgb.data() + y * stride, raw.data() + y * (stride + 1) + 1, stride);
  }
  return img;
}

inline void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) {
    throw Error(ErrorKind::io, "cannot write " + path.string());
  }
}

inline std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw Error(ErrorKind::io, "cannot read " + path.string());
  }
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

inline void write_png(const std::filesystem::path& path, const Image& img) {
  write_bytes(path, encode_png(img));
}

inline Image read_png(const std::filesystem::path& path) { return decode_png(read_bytes(path)); }

}  // namespace wmdrive::render
