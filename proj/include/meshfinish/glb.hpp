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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "meshfinish/material.hpp"
#include "meshfinish/mesh.hpp"
#include "meshfinish/texture.hpp"

namespace meshfinish {

struct GlbTextures {
  const TextureImage* albedo = nullptr;              // linear RGB, stored as sRGB PNG
  const TextureImage* normal = nullptr;              // encoded tangent normals, linear PNG
  const TextureImage* metallic_roughness = nullptr;  // optional, linear PNG
};

struct GlbExportOptions {
  int png_compression = 6;
  std::string generator = "meshfinish";
};

// Mesh with one vertex per distinct (position index, uv) pair, which is what
// a glTF primitive stores. UVs keep the atlas convention (v up).
struct WeldedMesh {
  std::vector<Vec3> positions;
  std::vector<Vec3> normals;
  std::vector<Vec2> uvs;
  std::vector<Tri> indices;
};
WeldedMesh weld_by_uv(const IndexedMesh& mesh);

// Serializes one scene / node / mesh / primitive with POSITION, NORMAL,
// TEXCOORD_0 and indices, plus embedded PNG images and one material.
// Throws ValidationError for missing UVs, missing required textures or
// mismatched texture sizes. Output depends only on the inputs. Normals
// further than 1e-6 from unit squared length are normalized first.
std::vector<std::uint8_t> build_glb(const IndexedMesh& mesh, const GlbTextures& textures,
                                    const PbrMaterial& material, const GlbExportOptions& options = {});

std::size_t export_glb(const IndexedMesh& mesh, const GlbTextures& textures, const PbrMaterial& material,
                       const std::filesystem::path& path, const GlbExportOptions& options = {});

struct GlbChunkInfo {
  std::uint32_t total_length = 0;
  std::uint32_t json_length = 0;
  std::uint32_t bin_length = 0;
  std::string json;
};

// Checks the container framing and returns the raw chunks' description.
// Throws ParseError naming the broken rule.
GlbChunkInfo inspect_glb(std::span<const std::uint8_t> bytes);

struct ImportedAsset {
  IndexedMesh mesh;  // corner uvs back in atlas convention, normals when present
  std::optional<TextureImage> albedo;
  std::optional<TextureImage> normal;
  std::optional<TextureImage> metallic_roughness;
  PbrMaterial material;
};

ImportedAsset parse_glb(std::span<const std::uint8_t> bytes);
ImportedAsset import_glb(const std::filesystem::path& path);

}  // namespace meshfinish
