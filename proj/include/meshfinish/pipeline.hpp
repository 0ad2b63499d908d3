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

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "meshfinish/baker.hpp"
#include "meshfinish/config.hpp"
#include "meshfinish/error.hpp"
#include "meshfinish/material.hpp"
#include "meshfinish/uv_unwrap.hpp"

namespace meshfinish {

struct StageTime {
  std::string name;
  double seconds = 0;
};

// Accumulates wall time per named stage.
class StageClock {
 public:
  template <typename Fn>
  auto run(const std::string& name, Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    struct Record {
      StageClock* self;
      const std::string& name;
      std::chrono::steady_clock::time_point start;
      ~Record() {
        self->stages_.push_back(
            {name, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()});
      }
    } record{this, name, start};
    return fn();
  }
  const std::vector<StageTime>& stages() const { return stages_; }
  double total() const;

 private:
  std::vector<StageTime> stages_;
};

// A failure inside a pipeline stage, tagged with the stage name.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct FinishOptions {
  UnwrapConfig unwrap;
  int resolution = 1024;
  int dilation = -1;  // < 0 selects default_dilation_iterations
  FieldSampler albedo;
  FieldSampler normal;
  PbrMaterial material;
  bool embed_orm = false;
  int png_compression = 6;
};

struct FinishedAsset {
  IndexedMesh mesh;  // input with normals and corner uvs
  UvLayout layout;
  GBuffer gbuffer;
  BakedAttributes baked;  // dilated
  std::optional<TextureImage> orm;
  std::vector<std::uint8_t> glb;
};

// unwrap -> bake -> export on an in-memory mesh. Stages are timed on
// `clock` when given ("unwrap", "bake", "export").
FinishedAsset finish_mesh(const IndexedMesh& mesh, const FinishOptions& options, StageClock* clock = nullptr);

IndexedMesh load_input(const InputConfig& input);

struct PipelineReport {
  std::vector<StageTime> stages;
  double total_seconds = 0;
  std::size_t vertices = 0;
  std::size_t triangles = 0;
  int atlas_resolution = 0;
  std::size_t occupied_texels = 0;
  UnwrapDiagnostics unwrap;
  std::size_t degenerate_uv_frames = 0;
  std::size_t glb_bytes = 0;
  std::vector<std::pair<std::string, std::string>> outputs;
};

// Validates the whole config first (ValidationError), then runs
// extract/load -> unwrap -> bake -> relight preview (optional) -> export and
// writes the requested files. Stage failures surface as StageError.
PipelineReport run_pipeline(const PipelineConfig& config);

nlohmann::ordered_json report_to_json(const PipelineReport& report);

}  // namespace meshfinish
