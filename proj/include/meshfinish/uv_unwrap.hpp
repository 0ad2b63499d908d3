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
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "meshfinish/mesh.hpp"

namespace meshfinish {

// Atlas layer of a triangle after occlusion resolution.
enum class Layer : std::uint8_t { Visible = 0, FirstOcclusion = 1, Remainder = 2 };

// Signed cube axes, in tie-break priority order.
enum class CubeFace : std::uint8_t { PosX = 0, NegX, PosY, NegY, PosZ, NegZ };

std::string_view to_string(Layer layer);
std::string_view to_string(CubeFace face);

// Axis-aligned rectangle in atlas coordinates (v grows upward, so y1 is the
// top edge).
struct Rect {
  double x0 = 0, y0 = 0, x1 = 1, y1 = 1;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  bool contains(Vec2 p, double tol = 0) const {
    return p.x >= x0 - tol && p.x <= x1 + tol && p.y >= y0 - tol && p.y <= y1 + tol;
  }
};

struct UnwrapConfig {
  // Faces whose unit normal has max |n . axis| below this go straight to the
  // remainder grid. 0 disables the filter.
  double normal_threshold = 0.0;
  Rect visible_region{0.0, 1.0 / 3.0, 1.0, 1.0};
  Rect first_occlusion_region{0.0, 0.0, 1.0 / 3.0, 1.0 / 3.0};
  Rect remainder_region{1.0 / 3.0, 0.0, 1.0, 1.0 / 3.0};
  // Gap between islands, as a fraction of the atlas width.
  double island_padding = 4.0 / 1024.0;
  // Candidate pairs need centroid distance <= slack * (r1 + r2), r being the
  // centroid-to-farthest-vertex radius. Infinity tests every pair.
  double proximity_slack = 1.05;
  // Smallest admissible remainder grid cell edge.
  double min_remainder_cell = 1.0 / 4096.0;
  // By default all triangles sharing a layer and cube face form one island;
  // they cannot overlap in projection. When set, islands are further split
  // into edge-connected pieces, which pads every fragment separately.
  bool split_connected_islands = false;
};

// Throws ValidationError when regions leave [0,1]^2, overlap, or knobs are
// out of range.
void validate(const UnwrapConfig& config);

struct UnwrapDiagnostics {
  bool isotropic_alignment = false;
  std::size_t visible = 0;
  std::size_t first_occlusion = 0;
  std::size_t remainder = 0;
  std::size_t islands = 0;
  // Triangles moved to the remainder grid because their island placement
  // would have produced a non-positive uv area.
  std::size_t demoted_slivers = 0;
  // Triangles moved there because rounding in the island transform made
  // them overlap a neighbour that only touched them in projection.
  std::size_t demoted_overlaps = 0;
  double visible_scale = 0;
  double first_occlusion_scale = 0;
};

struct UvLayout {
  std::vector<Vec2> corner_uvs;  // 3 per triangle
  std::vector<Layer> triangle_layer;
  std::vector<CubeFace> triangle_cube_face;
  Mat3 alignment_rotation;
  UnwrapDiagnostics diagnostics;

  std::size_t num_triangles() const { return triangle_layer.size(); }
};

struct Alignment {
  IndexedMesh mesh;  // rotation applied to positions (and normals)
  Mat3 rotation;     // proper rotation, aligned = rotation * original
  bool isotropic = false;
  std::array<double, 3> eigenvalues{};
};

// Rotates the mesh so the eigenvectors of the area-weighted face-normal
// covariance land on the world axes, each matched to the axis it is
// already closest to. A repeated eigenvalue (gap < 1e-9) leaves the mesh
// unrotated and sets `isotropic`.
Alignment align_dominant_axes(const IndexedMesh& mesh);

// Signed axis maximizing n . axis, ties broken in enum order.
CubeFace choose_cube_face(Vec3 normal);

// Per-triangle cube face. Zero-area faces take the face of their first
// non-degenerate edge neighbor, else +Z.
std::vector<CubeFace> assign_cube_faces(const IndexedMesh& aligned);

// Orthographic projection onto a cube face. The (u, v) frame is
// right-handed as seen from outside, side faces map world +Z to +v and the
// z faces map world +X to +u.
Vec2 project_to_face(CubeFace face, const Vec3& p);
// Distance behind the face's viewing plane; smaller is nearer the viewer.
double face_depth(CubeFace face, const Vec3& p);

// Layers from depth-ordered projected overlaps within each cube face: a
// triangle overlapped only by farther triangles is Visible, otherwise its
// layer is one past the deepest layer among the nearer triangles that
// overlap it (Remainder from the third layer on). Triangles without
// projected area, or failing the normal threshold, are Remainder.
std::vector<Layer> detect_occlusions(const IndexedMesh& aligned, std::span<const CubeFace> faces,
                                     const UnwrapConfig& config = {});

// Packs islands (triangles sharing layer and cube face, optionally split by
// edge connectivity) into
// their layer's region with one uniform scale per region, and lays
// remainder triangles out on a square grid. Throws GeometryError on
// remainder grid overflow.
UvLayout layout_atlas(const IndexedMesh& aligned, std::span<const Layer> layers,
                      std::span<const CubeFace> faces, const UnwrapConfig& config = {});

// align -> assign faces -> detect occlusions -> layout. The returned corner
// uvs index the input mesh's triangles.
UvLayout unwrap(const IndexedMesh& mesh, const UnwrapConfig& config = {});

// Copy of `mesh` carrying the layout's corner uvs.
IndexedMesh with_uvs(IndexedMesh mesh, const UvLayout& layout);

// Debug drawing: triangle outlines colored by layer, regions dashed.
void write_layout_svg(std::ostream& out, const UvLayout& layout, const UnwrapConfig& config,
                      int size_px = 1024);

}  // namespace meshfinish
