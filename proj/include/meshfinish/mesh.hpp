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
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "meshfinish/vec.hpp"

namespace meshfinish {

using Tri = std::array<std::uint32_t, 3>;

// Triangle mesh flowing through every stage. Triangles are wound
// counter-clockwise when seen from the side their normal points to.
struct IndexedMesh {
  std::vector<Vec3> positions;
  std::vector<Tri> indices;
  // Optional; either empty or one unit vector per position.
  std::vector<Vec3> vertex_normals;
  // Optional; either empty or three entries per triangle.
  std::vector<Vec2> corner_uvs;

  std::size_t num_vertices() const { return positions.size(); }
  std::size_t num_triangles() const { return indices.size(); }
  bool has_normals() const { return !vertex_normals.empty(); }
  bool has_uvs() const { return !corner_uvs.empty(); }
};

// Throws ValidationError describing the first violated invariant.
void validate(const IndexedMesh& mesh);

// Unnormalized face normal (length = twice the triangle area).
Vec3 face_normal_area(const IndexedMesh& mesh, std::size_t tri);
double triangle_area(const IndexedMesh& mesh, std::size_t tri);

// Area-weighted vertex normals. Zero-area triangles contribute nothing.
// Throws GeometryError("undefined normal ...") when a referenced vertex has
// no usable incident area. Unreferenced vertices get +Z.
IndexedMesh compute_geometry_normals(IndexedMesh mesh);

// Spherical linear interpolation between unit vectors. Throws
// GeometryError("ambiguous slerp plane") when a and b are antipodal.
Vec3 slerp_normals(Vec3 a, Vec3 b, double t);

// Regularizer values evaluated on a mesh. All fields are means, so they are
// comparable across resolutions.
struct MeshQualityReport {
  double laplacian = 0;
  double normal_consistency = 0;
  double offset_reg = 0;
  double normal_replication = 0;
  double normal_smoothness = 0;
  // Zero-area triangles skipped in the averages.
  std::size_t degenerate_triangles = 0;
};

using NormalField = std::function<Vec3(const Vec3&)>;

struct QualityInputs {
  // Per-vertex offsets applied during refinement.
  std::optional<std::span<const Vec3>> offsets;
  // Per-vertex predicted unit normals.
  std::optional<std::span<const Vec3>> predicted_normals;
  // Predicted normal field, compared at x and x + epsilon * (1,1,1)/sqrt(3).
  NormalField normal_field;
  double epsilon = 1e-3;
};

MeshQualityReport mesh_quality(const IndexedMesh& mesh, const QualityInputs& inputs = {});

// Loss weights, one per term. Defaults are the reference training weights.
struct MetricWeights {
  double mse = 10;
  double lpips = 2;
  double mask = 10;
  double laplacian = 0.01;
  double normal_consistency = 0.001;
  double offset = 0.1;
  double normal_replication = 0.2;
  double normal_smoothness = 0.02;
  double demodulation = 0.01;
};

// Weighted mesh and shading terms that can be evaluated without images.
double weighted_mesh_terms(const MeshQualityReport& report, const MetricWeights& w = {});
double weighted_shading_terms(const MeshQualityReport& report, double demodulation,
                              const MetricWeights& w = {});

// Edge -> incident triangles, with edges keyed by (min, max) vertex id.
struct EdgeKey {
  std::uint32_t lo, hi;
  friend constexpr bool operator==(const EdgeKey&, const EdgeKey&) = default;
  friend constexpr auto operator<=>(const EdgeKey&, const EdgeKey&) = default;
};
inline EdgeKey make_edge(std::uint32_t a, std::uint32_t b) {
  return a < b ? EdgeKey{a, b} : EdgeKey{b, a};
}

// For each triangle corner e (edge from corner e to e+1) the triangles
// sharing that edge, sorted by triangle index. Built by sorting, so the
// result is deterministic.
struct EdgeAdjacency {
  // Flattened: first_[t*3+e] .. first_[t*3+e+1] index into neighbors_.
  std::vector<std::uint32_t> offsets;
  std::vector<std::uint32_t> neighbors;

  std::span<const std::uint32_t> around(std::size_t tri, int edge) const {
    const std::size_t slot = tri * 3 + static_cast<std::size_t>(edge);
    return {neighbors.data() + offsets[slot], neighbors.data() + offsets[slot + 1]};
  }
};
EdgeAdjacency build_edge_adjacency(const IndexedMesh& mesh);

// Number of edges whose incident triangle count differs from two.
std::size_t count_non_manifold_or_boundary_edges(const IndexedMesh& mesh);
// V - E + F.
long euler_characteristic(const IndexedMesh& mesh);

}  // namespace meshfinish
