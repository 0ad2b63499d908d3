// Copyright 2026 The Meshfinish Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "meshfinish/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

#include "meshfinish/error.hpp"

namespace meshfinish {

float srgb_to_linear(float s) {
  return s <= 0.04045f ? s / 12.92f : std::pow((s + 0.055f) / 1.055f, 2.4f);
}

float linear_to_srgb(float l) {
  return l <= 0.0031308f ? l * 12.92f : 1.055f * std::pow(l, 1.0f / 2.4f) - 0.055f;
}

namespace {

struct CodeTables {
  std::array<float, 256> srgb_decode;
  // Linear thresholds between consecutive sRGB codes.
  std::array<float, 255> srgb_split;
  CodeTables() {
    for (int i = 0; i < 256; ++i) srgb_decode[i] = srgb_to_linear(i / 255.0f);
    for (int i = 0; i < 255; ++i) srgb_split[i] = srgb_to_linear((i + 0.5f) / 255.0f);
  }
};

const CodeTables& tables() {
  static const CodeTables t;
  return t;
}

struct WriteBuffer {
  std::vector<std::uint8_t>* out;
};

void write_cb(png_structp png, png_bytep data, png_size_t len) {
  auto* buf = static_cast<WriteBuffer*>(png_get_io_ptr(png));
  buf->out->insert(buf->out->end(), data, data + len);
}

void flush_cb(png_structp) {}

struct ReadBuffer {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;
};

void read_cb(png_structp png, png_bytep data, png_size_t len) {
  auto* buf = static_cast<ReadBuffer*>(png_get_io_ptr(png));
  if (buf->pos + len > buf->bytes.size()) png_error(png, "truncated PNG");
  std::memcpy(data, buf->bytes.data() + buf->pos, len);
  buf->pos += len;
}

// libpng reports errors by longjmp; the message is parked here and turned
// into an exception once control is back in C++ frames.
struct ErrorSlot {
  char message[256] = {0};
};

void error_cb(png_structp png, png_const_charp msg) {
  auto* slot = static_cast<ErrorSlot*>(png_get_error_ptr(png));
  std::snprintf(slot->message, sizeof(slot->message), "%s", msg);
  png_longjmp(png, 1);
}

void warning_cb(png_structp, png_const_charp) {}

}  // namespace

std::uint8_t encode_channel(float linear, bool srgb) {
  const float v = std::clamp(linear, 0.0f, 1.0f);
  if (!srgb) return static_cast<std::uint8_t>(std::lround(v * 255.0f));
  const auto& split = tables().srgb_split;
  return static_cast<std::uint8_t>(std::upper_bound(split.begin(), split.end(), v) - split.begin());
}

float decode_channel(std::uint8_t code, bool srgb) {
  return srgb ? tables().srgb_decode[code] : code / 255.0f;
}

std::vector<std::uint8_t> encode_png(const TextureImage& image, const PngOptions& options) {
  if (image.width <= 0 || image.height <= 0 || image.channels < 1 || image.channels > 4 ||
      image.data.size() != image.num_texels() * static_cast<std::size_t>(image.channels))
    throw ValidationError("png: invalid image");
  if (options.compression < 0 || options.compression > 9) throw ValidationError("png: compression must be 0-9");
  static constexpr int kColorTypes[] = {PNG_COLOR_TYPE_GRAY, PNG_COLOR_TYPE_GRAY_ALPHA, PNG_COLOR_TYPE_RGB,
                                        PNG_COLOR_TYPE_RGB_ALPHA};
  const int c = image.channels;
  const std::size_t stride = static_cast<std::size_t>(image.width) * c;
  std::vector<std::uint8_t> pixels(stride * image.height);
  // Alpha (4th channel of RGBA, 2nd of gray+alpha) is always linear.
  const int alpha_channel = (c == 2 || c == 4) ? c - 1 : -1;
  for (std::size_t i = 0; i < image.data.size(); ++i) {
    const int ch = static_cast<int>(i % c);
    pixels[i] = encode_channel(image.data[i], options.srgb && ch != alpha_channel);
  }

  std::vector<std::uint8_t> out;
  out.reserve(pixels.size() / 4);
  ErrorSlot slot;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &slot, error_cb, warning_cb);
  if (!png) throw IoError("png: out of memory");
  png_infop info = png_create_info_struct(png);
  WriteBuffer buf{&out};
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError(std::string("png: ") + slot.message);
  }
  {
    png_set_write_fn(png, &buf, write_cb, flush_cb);
    png_set_compression_level(png, options.compression);
    // The up filter is cheap and does well on baked atlases, which are
    // mostly flat runs and smooth ramps.
    png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_UP);
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), 8,
                 kColorTypes[c - 1], PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_BASE, PNG_FILTER_TYPE_BASE);
    if (options.srgb) png_set_sRGB(png, info, PNG_sRGB_INTENT_PERCEPTUAL);
    png_write_info(png, info);
    for (int y = 0; y < image.height; ++y) png_write_row(png, pixels.data() + stride * y);
    png_write_end(png, nullptr);
  }
  png_destroy_write_struct(&png, &info);
  return out;
}

TextureImage decode_png(std::span<const std::uint8_t> bytes, bool srgb) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) throw ParseError("png: bad signature");
  ErrorSlot slot;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &slot, error_cb, warning_cb);
  if (!png) throw IoError("png: out of memory");
  png_infop info = png_create_info_struct(png);
  ReadBuffer buf{bytes, 0};
  png_bytep volatile pixels = nullptr;
  png_bytepp volatile rows = nullptr;
  if (setjmp(png_jmpbuf(png))) {
    png_free(png, rows);
    png_free(png, pixels);
    png_destroy_read_struct(&png, &info, nullptr);
    throw ParseError(std::string("png: ") + slot.message);
  }
  png_set_read_fn(png, &buf, read_cb);
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (depth == 16) png_set_strip_16(png);
  png_read_update_info(png, info);
  const int w = static_cast<int>(png_get_image_width(png, info));
  const int h = static_cast<int>(png_get_image_height(png, info));
  const int c = png_get_channels(png, info);
  // Raw libpng allocations: nothing with a destructor may live in this frame
  // across a possible longjmp.
  pixels = static_cast<png_bytep>(png_malloc(png, static_cast<png_alloc_size_t>(w) * h * c));
  rows = static_cast<png_bytepp>(png_malloc(png, sizeof(png_bytep) * h));
  for (int y = 0; y < h; ++y) rows[y] = pixels + static_cast<std::size_t>(y) * w * c;
  png_read_image(png, rows);
  png_free(png, rows);
  rows = nullptr;
  TextureImage image(w, h, c);
  const int alpha_channel = (c == 2 || c == 4) ? c - 1 : -1;
  const std::size_t count = static_cast<std::size_t>(w) * h * c;
  for (std::size_t i = 0; i < count; ++i)
    image.data[i] = decode_channel(pixels[i], srgb && static_cast<int>(i % c) != alpha_channel);
  std::fill(image.occupancy.begin(), image.occupancy.end(), std::uint8_t{1});
  png_free(png, pixels);
  png_destroy_read_struct(&png, &info, nullptr);
  return image;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

void write_png(const std::filesystem::path& path, const TextureImage& image, const PngOptions& options) {
  write_file_bytes(path, encode_png(image, options));
}

TextureImage read_png(const std::filesystem::path& path, bool srgb) {
  return decode_png(read_file_bytes(path), srgb);
}

}  // namespace meshfinish
