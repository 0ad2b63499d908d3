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

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "meshfinish/tetra.hpp"

namespace meshfinish {

// Analytic signed distance functions (negative inside) built from a small
// expression language:
//   sphere(r) | sphere(r, cx, cy, cz)
//   box(hx, hy, hz)              axis-aligned, centered at the origin
//   torus(R, r)                  ring around the z axis
//   translate(x, y, z, shape)
//   union(shape, shape, ...)     min
//   intersect(shape, shape, ...) max
//   subtract(shape, shape)       max(a, -b)
class Sdf {
 public:
  static Sdf parse(std::string_view expr);

  double operator()(const Vec3& p) const;
  // Central-difference gradient.
  Vec3 gradient(const Vec3& p, double h = 1e-5) const;
  const std::string& expression() const { return expr_; }

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
  std::string expr_;
};

// Samples an SDF on a res^3 lattice over `bounds`. Extracted triangles face
// outward (toward positive distance).
DensityGrid sample_sdf(const Sdf& sdf, int res, const Bounds& bounds = {});

// Offsets projecting each point onto the zero set along the SDF gradient.
OffsetField sdf_projection_field(const Sdf& sdf);

}  // namespace meshfinish
