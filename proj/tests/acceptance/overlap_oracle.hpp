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

#include <cstddef>
#include <span>
#include <vector>

#include "meshfinish/vec.hpp"

namespace oracle {

struct OverlapReport {
  std::size_t candidate_pairs = 0;
  std::size_t overlapping_pairs = 0;
  std::size_t exact_fallbacks = 0;
  // Triangles with zero or negative signed uv area.
  std::size_t non_positive = 0;
  // First offending pair, when any.
  std::size_t first_a = 0, first_b = 0;
};

// Every pair of triangles (3 uvs each) whose open interiors intersect.
// Shared edges and vertices are fine. Signs are decided exactly: a float
// filter first, rational arithmetic when the filter cannot tell.
OverlapReport find_interior_overlaps(std::span<const meshfinish::Vec2> corner_uvs);

// Exact sign of the 2D orientation determinant.
int exact_orient(meshfinish::Vec2 a, meshfinish::Vec2 b, meshfinish::Vec2 c, std::size_t* fallbacks = nullptr);

}  // namespace oracle
