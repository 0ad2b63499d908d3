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
#include <vector>

#include "meshfinish/vec.hpp"

namespace meshfinish {

// Float raster with a per-texel occupancy flag. Row 0 is the top of the
// image (atlas v = 1); texel (x, y) is centred at
// u = (x + 0.5) / width, v = 1 - (y + 0.5) / height.
struct TextureImage {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<float> data;             // width * height * channels
  std::vector<std::uint8_t> occupancy;  // width * height, 0 or 1

  TextureImage() = default;
  TextureImage(int w, int h, int c);

  std::size_t texel(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
  }
  std::size_t num_texels() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
  float* at(int x, int y) { return data.data() + texel(x, y) * channels; }
  const float* at(int x, int y) const { return data.data() + texel(x, y) * channels; }
  bool occupied(int x, int y) const { return occupancy[texel(x, y)] != 0; }
  std::size_t occupied_count() const;
};

// Throws ValidationError on bad dimensions, channel count, array sizes or
// non-finite values.
void validate(const TextureImage& image);

inline Vec2 texel_center_uv(int x, int y, int width, int height) {
  return {(x + 0.5) / width, 1.0 - (y + 0.5) / height};
}

// Bilinear lookup at an atlas coordinate, using only occupied texels (their
// weights renormalized). Returns false when none of the four is occupied.
bool sample_bilinear(const TextureImage& image, Vec2 uv, float* out);

}  // namespace meshfinish
