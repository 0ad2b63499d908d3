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
#include <filesystem>
#include <functional>
#include <vector>

#include "meshfinish/mesh.hpp"

namespace meshfinish {

struct Bounds {
  Vec3 min{-1, -1, -1};
  Vec3 max{1, 1, 1};
};

// Scalar samples on a regular lattice. Node (i, j, k) sits at
// bounds.min + (bounds.max - bounds.min) * (i/(nx-1), j/(ny-1), k/(nz-1)) and
// is stored at values[i + nx * (j + ny * k)]. The surface is the zero level
// set; values >= 0 count as positive.
struct DensityGrid {
  std::array<int, 3> resolution{2, 2, 2};
  std::vector<double> values;
  Bounds bounds;

  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(resolution[0]) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(resolution[1]) * k);
  }
  Vec3 node_position(int i, int j, int k) const;
  Vec3 spacing() const;
  // Smallest lattice spacing.
  double cell_size() const;
  double cell_diagonal() const;
};

// Throws ValidationError on bad resolution/count and on non-finite samples.
void validate(const DensityGrid& grid);

// Marching tetrahedra over the 6-tetrahedron (Kuhn) split of every cube,
// all cubes sharing the (0,0,0)-(1,1,1) diagonal. Vertices sit on the
// sign-changing lattice edges, one per edge, numbered by (node, direction).
// Triangles are wound so their normals point toward positive values.
// Deterministic for any thread count. Throws GeometryError("empty
// isosurface") when no edge changes sign.
IndexedMesh marching_tetrahedra(const DensityGrid& grid);

// Per-point offset sampler.
using OffsetField = std::function<Vec3(const Vec3&)>;

// Moves every vertex by field(v), with the offset length clamped to
// max_fraction * cell_size. Topology is untouched; normals are dropped.
IndexedMesh apply_offsets(IndexedMesh mesh, const OffsetField& field, double cell_size,
                          double max_fraction = 0.5);

// Raw little-endian samples plus a JSON sidecar:
//   {"resolution": [nx, ny, nz], "bounds": {"min": [...], "max": [...]},
//    "dtype": "float32" | "float64"}
DensityGrid read_grid(const std::filesystem::path& raw, const std::filesystem::path& sidecar);
void write_grid(const DensityGrid& grid, const std::filesystem::path& raw,
                const std::filesystem::path& sidecar, bool float64 = false);

}  // namespace meshfinish
