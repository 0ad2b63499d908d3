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
#include <optional>
#include <string>

#include "json.hpp"
#include "meshfinish/material.hpp"
#include "meshfinish/tetra.hpp"
#include "meshfinish/uv_unwrap.hpp"

namespace meshfinish {

struct InputConfig {
  // Exactly one of these selects the source.
  std::string mesh;         // OBJ or PLY path
  std::string sdf;          // analytic SDF expression
  std::string grid;         // raw grid path (sidecar: grid + ".json" unless set)
  std::string grid_sidecar;
  bool grid_positive_inside = false;  // density grids: negate so normals face out
  int resolution = 64;                // lattice nodes per axis for sdf input
  Bounds bounds;
  bool project_offsets = false;  // snap sdf-extracted vertices onto the zero set
  double offset_fraction = 0.5;
};

struct BakeConfig {
  int resolution = 1024;
  int dilation = -1;  // < 0 selects the resolution-based default
  std::string albedo = "checker:0.25";
  std::string normal = "geometry";
};

struct MaterialConfig {
  double metallic = 0.0;
  double roughness = 0.5;
  std::optional<BetaParams> metallic_beta;   // overrides the scalar with its mode
  std::optional<BetaParams> roughness_beta;
  bool embed_orm = false;
};

struct LightingConfig {
  std::string environment;  // env JSON path; empty = uniform unit lobes
  bool preview = false;
  int preview_size = 512;
};

struct OutputConfig {
  std::string glb = "asset.glb";
  std::string report;
  std::string svg;
  std::string layout;
  std::string preview = "preview.png";
  std::string gbuffer;  // prefix; writes <prefix>.raw and <prefix>.json
  int png_compression = 6;
};

struct PipelineConfig {
  InputConfig input;
  UnwrapConfig unwrap;
  BakeConfig bake;
  MaterialConfig material;
  LightingConfig lighting;
  OutputConfig output;
  int threads = 0;  // 0 = hardware concurrency
};

// Throws ValidationError on any bad value, including overlapping regions.
void validate(const PipelineConfig& config);

// Unknown keys are rejected with ValidationError naming the key.
PipelineConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const PipelineConfig& config);
// .toml files go through the TOML reader, everything else is JSON.
PipelineConfig load_config(const std::filesystem::path& path);

PbrMaterial resolve_material(const MaterialConfig& config);

}  // namespace meshfinish
