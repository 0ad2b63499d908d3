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

#include "meshfinish/texture.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "meshfinish/error.hpp"

namespace meshfinish {

TextureImage::TextureImage(int w, int h, int c) : width(w), height(h), channels(c) {
  if (w <= 0 || h <= 0 || c < 1 || c > 4) throw ValidationError("texture: bad dimensions or channel count");
  data.assign(num_texels() * static_cast<std::size_t>(c), 0.0f);
  occupancy.assign(num_texels(), 0);
}

std::size_t TextureImage::occupied_count() const {
  return static_cast<std::size_t>(std::count(occupancy.begin(), occupancy.end(), std::uint8_t{1}));
}

void validate(const TextureImage& image) {
  if (image.width <= 0 || image.height <= 0) throw ValidationError("texture: non-positive size");
  if (image.channels < 1 || image.channels > 4) throw ValidationError("texture: channels must be 1-4");
  if (image.data.size() != image.num_texels() * static_cast<std::size_t>(image.channels) ||
      image.occupancy.size() != image.num_texels())
    throw ValidationError("texture: array sizes do not match dimensions");
  for (float v : image.data)
    if (!std::isfinite(v)) throw ValidationError("texture: non-finite channel value");
  for (auto o : image.occupancy)
    if (o > 1) throw ValidationError("texture: occupancy must be 0 or 1");
}

bool sample_bilinear(const TextureImage& image, Vec2 uv, float* out) {
  const double fx = uv.x * image.width - 0.5;
  const double fy = (1.0 - uv.y) * image.height - 0.5;
  const int x0 = static_cast<int>(std::floor(fx));
  const int y0 = static_cast<int>(std::floor(fy));
  const double tx = fx - x0, ty = fy - y0;
  double acc[4] = {0, 0, 0, 0};
  double wsum = 0;
  for (int dy = 0; dy < 2; ++dy)
    for (int dx = 0; dx < 2; ++dx) {
      const int x = x0 + dx, y = y0 + dy;
      if (x < 0 || y < 0 || x >= image.width || y >= image.height || !image.occupied(x, y)) continue;
      const double w = (dx ? tx : 1 - tx) * (dy ? ty : 1 - ty);
      if (w <= 0) continue;
      const float* p = image.at(x, y);
      for (int c = 0; c < image.channels; ++c) acc[c] += w * p[c];
      wsum += w;
    }
  if (!(wsum > 0)) return false;
  for (int c = 0; c < image.channels; ++c) out[c] = static_cast<float>(acc[c] / wsum);
  return true;
}

}  // namespace meshfinish
