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

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "meshfinish/texture.hpp"

namespace meshfinish {

float srgb_to_linear(float s);
float linear_to_srgb(float l);

// Linear value in [0,1] to the 8-bit code whose decoded value is nearest
// (sRGB transfer when `srgb`, plain rounding otherwise).
std::uint8_t encode_channel(float linear, bool srgb);
float decode_channel(std::uint8_t code, bool srgb);

struct PngOptions {
  bool srgb = false;     // apply the sRGB transfer and tag the file
  int compression = 6;  // zlib level 0-9
};

// 8-bit PNG with as many channels as the image (gray, gray+alpha, RGB, RGBA).
// Occupancy is not stored. Output bytes depend only on the inputs.
std::vector<std::uint8_t> encode_png(const TextureImage& image, const PngOptions& options = {});

// Decodes 8- or 16-bit gray/RGB(A) and palette PNGs. Every texel comes back
// occupied. `srgb` selects the transfer used to linearize.
TextureImage decode_png(std::span<const std::uint8_t> bytes, bool srgb = false);

void write_png(const std::filesystem::path& path, const TextureImage& image, const PngOptions& options = {});
TextureImage read_png(const std::filesystem::path& path, bool srgb = false);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace meshfinish
