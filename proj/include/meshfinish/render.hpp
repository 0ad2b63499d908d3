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

#include "meshfinish/material.hpp"
#include "meshfinish/mesh.hpp"
#include "meshfinish/sg.hpp"
#include "meshfinish/texture.hpp"

namespace meshfinish {

struct PreviewCamera {
  Vec3 direction{0, 0, -1};  // viewing direction, into the scene
  int width = 512;
  int height = 512;
  double margin = 1.1;  // framing slack around the projected bounds
};

struct PreviewScene {
  const IndexedMesh* mesh = nullptr;        // normals computed when absent
  const TextureImage* albedo = nullptr;     // optional, linear RGB, needs uvs
  const TextureImage* normal_map = nullptr; // optional tangent-space map, needs uvs
  Vec3 default_albedo{0.8, 0.8, 0.8};
  PbrMaterial material;
};

struct PreviewBuffers {
  TextureImage position;
  TextureImage normal;
  TextureImage albedo;
};

// Orthographic z-buffered rasterization of the scene into screen-space
// G-buffers. Deterministic for any thread count.
PreviewBuffers rasterize_preview(const PreviewScene& scene, const PreviewCamera& camera);

// rasterize_preview followed by shade_deferred. RGBA, alpha = coverage.
TextureImage render_preview(const PreviewScene& scene, const SgEnvironment& env, const PreviewCamera& camera = {});

}  // namespace meshfinish
