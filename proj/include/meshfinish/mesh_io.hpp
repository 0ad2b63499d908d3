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

#include <filesystem>
#include <iosfwd>

#include "meshfinish/mesh.hpp"

namespace meshfinish {

// Wavefront OBJ: v, vn, vt and f records. Polygons are fan-triangulated,
// negative (relative) indices are supported. Texture coordinates become
// corner uvs; normals are averaged per position.
IndexedMesh read_obj(std::istream& in);
IndexedMesh read_obj(const std::filesystem::path& path);

void write_obj(std::ostream& out, const IndexedMesh& mesh);
void write_obj(const std::filesystem::path& path, const IndexedMesh& mesh);

// Stanford PLY, ascii or binary_little_endian. Reads the vertex element
// (x, y, z and optional nx, ny, nz) and the face element's vertex index list.
IndexedMesh read_ply(std::istream& in);
IndexedMesh read_ply(const std::filesystem::path& path);

// Dispatches on the file extension (.obj, .ply).
IndexedMesh read_mesh(const std::filesystem::path& path);

}  // namespace meshfinish
