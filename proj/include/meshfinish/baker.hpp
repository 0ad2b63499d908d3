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
#include <functional>
#include <span>
#include <vector>

#include "meshfinish/mesh.hpp"
#include "meshfinish/texture.hpp"
#include "meshfinish/uv_unwrap.hpp"

namespace meshfinish {

// Maps a world position and the interpolated geometry normal there to an
// albedo (linear RGB in [0,1]) or to a world-space unit normal.
using FieldSampler = std::function<Vec3(const Vec3& position, const Vec3& normal)>;

struct GBuffer {
  TextureImage position;  // 3 channels, world units; carries the occupancy
  TextureImage normal;    // 3 channels, interpolated unit geometry normal
  std::vector<std::int32_t> triangle;  // covering triangle per texel, -1 if none
};

// Powers of two in [64, 8192].
void validate_resolution(int resolution);

// Rasterizes every UV triangle at texel centres. Shared edges go to exactly
// one triangle. With `claim_centroid_texels`, each triangle afterwards takes
// the texel under its uv centroid if that texel is still free, so slivers
// and sub-texel triangles are sampled at least once. Vertex normals are
// computed when the mesh has none.
GBuffer bake_gbuffer(const IndexedMesh& mesh, const UvLayout& layout, int resolution,
                     bool claim_centroid_texels = true);

struct BakeDiagnostics {
  std::size_t degenerate_uv_frames = 0;  // triangles using the geometry fallback frame
};

struct BakedAttributes {
  TextureImage albedo;         // linear RGB
  TextureImage normal;         // tangent-space normal encoded as n * 0.5 + 0.5
  BakeDiagnostics diagnostics;
};

// Per-triangle tangent frame from UV deltas; bitangent along +v.
struct TangentFrame {
  Vec3 tangent;
  Vec3 bitangent;
  bool degenerate = false;
};
TangentFrame triangle_tangent_frame(const IndexedMesh& mesh, std::span<const Vec2> corner_uvs,
                                    std::size_t tri);

// World normal expressed in the (T, B, N) frame after Gram-Schmidt of T
// against N. Handedness follows the UV orientation.
Vec3 to_tangent_space(const TangentFrame& frame, const Vec3& n_geom, const Vec3& n_world);
Vec3 from_tangent_space(const TangentFrame& frame, const Vec3& n_geom, const Vec3& n_tangent);

BakedAttributes bake_attributes(const GBuffer& gbuffer, const FieldSampler& albedo_field,
                                const FieldSampler& normal_field, const IndexedMesh& mesh,
                                const UvLayout& layout);

// Constant metallic-roughness texture in glTF channel order (R unused = 1,
// G roughness, B metallic) over the G-buffer occupancy.
TextureImage bake_orm(const GBuffer& gbuffer, double roughness, double metallic);

// Grows occupied regions one texel ring per iteration; new texels take the
// mean of their previously occupied 3x3 neighbours. Occupied texels are left
// bit-identical.
TextureImage dilate_margins(const TextureImage& image, int iterations);

// Dilates several images sharing one occupancy mask.
void dilate_margins_shared(std::span<TextureImage* const> images, int iterations);

int default_dilation_iterations(int resolution);

// Debug dump: raw little-endian float32 planes (position xyz, normal xyz,
// occupancy) plus a JSON sidecar describing the layout.
void write_gbuffer(const GBuffer& gbuffer, const std::filesystem::path& raw,
                   const std::filesystem::path& sidecar);
GBuffer read_gbuffer(const std::filesystem::path& raw, const std::filesystem::path& sidecar);

}  // namespace meshfinish
