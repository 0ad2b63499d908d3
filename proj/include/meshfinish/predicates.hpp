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

#include <array>

#include "meshfinish/vec.hpp"

namespace meshfinish {

// Orientation of c relative to the directed line a->b. The sign is exact
// (positive: counter-clockwise); the magnitude is only an approximation of
// twice the signed area. Falls back to expansion arithmetic when the
// floating-point estimate is too close to zero to trust.
double orient2d(Vec2 a, Vec2 b, Vec2 c);

using Triangle2 = std::array<Vec2, 3>;

// True when the open interiors of two triangles intersect. Triangles that
// only share an edge or touch at points do not overlap. Degenerate
// (zero-area) triangles never overlap anything.
bool triangles_overlap_interior(const Triangle2& a, const Triangle2& b);

}  // namespace meshfinish
