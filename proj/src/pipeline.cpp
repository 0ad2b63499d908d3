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

#include "meshfinish/pipeline.hpp"

#include <fstream>

#include "meshfinish/fields.hpp"
#include "meshfinish/glb.hpp"
#include "meshfinish/mesh_io.hpp"
#include "meshfinish/parallel.hpp"
#include "meshfinish/png_io.hpp"
#include "meshfinish/render.hpp"
#include "meshfinish/sdf.hpp"
#include "meshfinish/sg.hpp"
#include "meshfinish/tetra.hpp"
#include "meshfinish/uv_layout_io.hpp"

namespace meshfinish {

double StageClock::total() const {
  double t = 0;
  for (const auto& s : stages_) t += s.seconds;
  return t;
}

FinishedAsset finish_mesh(const IndexedMesh& input, const FinishOptions& opt, StageClock* clock) {
  StageClock local;
  StageClock& c = clock ? *clock : local;
  if (!opt.albedo || !opt.normal) throw ValidationError("finish: albedo and normal fields are required");
  validate_resolution(opt.resolution);
  FinishedAsset out;
  c.run("unwrap", [&] {
    out.mesh = input.has_normals() ? input : compute_geometry_normals(input);
    out.mesh.corner_uvs.clear();
    out.layout = unwrap(out.mesh, opt.unwrap);
    out.mesh.corner_uvs = out.layout.corner_uvs;
    return 0;
  });
  c.run("bake", [&] {
    out.gbuffer = bake_gbuffer(out.mesh, out.layout, opt.resolution);
    out.baked = bake_attributes(out.gbuffer, opt.albedo, opt.normal, out.mesh, out.layout);
    if (opt.embed_orm) out.orm = bake_orm(out.gbuffer, opt.material.roughness, opt.material.metallic);
    std::vector<TextureImage*> images = {&out.baked.albedo, &out.baked.normal};
    if (out.orm) images.push_back(&*out.orm);
    const int iterations = opt.dilation < 0 ? default_dilation_iterations(opt.resolution) : opt.dilation;
    dilate_margins_shared(images, iterations);
    return 0;
  });
  c.run("export", [&] {
    GlbTextures tex{&out.baked.albedo, &out.baked.normal, out.orm ? &*out.orm : nullptr};
    out.glb = build_glb(out.mesh, tex, opt.material, GlbExportOptions{opt.png_compression, "meshfinish"});
    return 0;
  });
  return out;
}

IndexedMesh load_input(const InputConfig& in) {
  if (!in.mesh.empty()) return read_mesh(in.mesh);
  DensityGrid grid;
  std::optional<Sdf> sdf;
  if (!in.sdf.empty()) {
    sdf = Sdf::parse(in.sdf);
    grid = sample_sdf(*sdf, in.resolution, in.bounds);
  } else {
    const std::string sidecar = in.grid_sidecar.empty() ? in.grid + ".json" : in.grid_sidecar;
    grid = read_grid(in.grid, sidecar);
    if (in.grid_positive_inside)
      for (double& v : grid.values) v = -v;
  }
  IndexedMesh mesh = marching_tetrahedra(grid);
  if (sdf && in.project_offsets)
    mesh = apply_offsets(std::move(mesh), sdf_projection_field(*sdf), grid.cell_size(), in.offset_fraction);
  return mesh;
}

namespace {

template <typename Fn>
auto stage(StageClock& clock, const std::string& name, Fn&& fn) {
  try {
    return clock.run(name, std::forward<Fn>(fn));
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

}  // namespace

PipelineReport run_pipeline(const PipelineConfig& config) {
  validate(config);
  // Samplers and the environment are parsed up front so a typo fails before
  // any stage runs.
  const FieldSampler albedo = make_albedo_field(config.bake.albedo);
  const FieldSampler normal = make_normal_field(config.bake.normal);
  if (!config.input.sdf.empty()) Sdf::parse(config.input.sdf);
  const PbrMaterial material = resolve_material(config.material);
  ScopedThreadCount threads(config.threads);

  PipelineReport report;
  StageClock clock;
  const std::string load_name = config.input.mesh.empty() ? "extract" : "load";
  IndexedMesh mesh = stage(clock, load_name, [&] { return load_input(config.input); });

  FinishOptions opt;
  opt.unwrap = config.unwrap;
  opt.resolution = config.bake.resolution;
  opt.dilation = config.bake.dilation;
  opt.albedo = albedo;
  opt.normal = normal;
  opt.material = material;
  opt.embed_orm = config.material.embed_orm;
  opt.png_compression = config.output.png_compression;

  FinishedAsset asset;
  stage(clock, "unwrap", [&] {
    asset.mesh = mesh.has_normals() ? mesh : compute_geometry_normals(mesh);
    asset.mesh.corner_uvs.clear();
    asset.layout = unwrap(asset.mesh, opt.unwrap);
    asset.mesh.corner_uvs = asset.layout.corner_uvs;
    if (!config.output.svg.empty()) {
      std::ofstream svg(config.output.svg);
      if (!svg) throw IoError("cannot write " + config.output.svg);
      write_layout_svg(svg, asset.layout, opt.unwrap);
      report.outputs.emplace_back("svg", config.output.svg);
    }
    if (!config.output.layout.empty()) {
      save_layout(config.output.layout, asset.layout);
      report.outputs.emplace_back("layout", config.output.layout);
    }
    return 0;
  });
  stage(clock, "bake", [&] {
    asset.gbuffer = bake_gbuffer(asset.mesh, asset.layout, opt.resolution);
    asset.baked = bake_attributes(asset.gbuffer, opt.albedo, opt.normal, asset.mesh, asset.layout);
    if (opt.embed_orm) asset.orm = bake_orm(asset.gbuffer, material.roughness, material.metallic);
    std::vector<TextureImage*> images = {&asset.baked.albedo, &asset.baked.normal};
    if (asset.orm) images.push_back(&*asset.orm);
    const int iterations = opt.dilation < 0 ? default_dilation_iterations(opt.resolution) : opt.dilation;
    dilate_margins_shared(images, iterations);
    if (!config.output.gbuffer.empty()) {
      write_gbuffer(asset.gbuffer, config.output.gbuffer + ".raw", config.output.gbuffer + ".json");
      report.outputs.emplace_back("gbuffer", config.output.gbuffer + ".raw");
    }
    return 0;
  });
  if (config.lighting.preview) {
    stage(clock, "relight", [&] {
      const SgEnvironment env = config.lighting.environment.empty() ? SgEnvironment::standard_constant(1.0)
                                                                     : load_environment(config.lighting.environment);
      PreviewScene scene;
      scene.mesh = &asset.mesh;
      scene.albedo = &asset.baked.albedo;
      scene.normal_map = &asset.baked.normal;
      scene.material = material;
      PreviewCamera cam;
      cam.width = cam.height = config.lighting.preview_size;
      const TextureImage img = render_preview(scene, env, cam);
      write_png(config.output.preview, img, PngOptions{true, config.output.png_compression});
      report.outputs.emplace_back("preview", config.output.preview);
      return 0;
    });
  }
  stage(clock, "export", [&] {
    GlbTextures tex{&asset.baked.albedo, &asset.baked.normal, asset.orm ? &*asset.orm : nullptr};
    asset.glb = build_glb(asset.mesh, tex, material, GlbExportOptions{opt.png_compression, "meshfinish"});
    write_file_bytes(config.output.glb, asset.glb);
    report.outputs.emplace_back("glb", config.output.glb);
    return 0;
  });

  report.stages = clock.stages();
  report.total_seconds = clock.total();
  report.vertices = asset.mesh.positions.size();
  report.triangles = asset.mesh.indices.size();
  report.atlas_resolution = opt.resolution;
  report.occupied_texels = asset.gbuffer.position.occupied_count();
  report.unwrap = asset.layout.diagnostics;
  report.degenerate_uv_frames = asset.baked.diagnostics.degenerate_uv_frames;
  report.glb_bytes = asset.glb.size();
  if (!config.output.report.empty()) {
    report.outputs.emplace_back("report", config.output.report);
    std::ofstream out(config.output.report);
    if (!out) throw StageError("report", "cannot write " + config.output.report);
    out << report_to_json(report).dump(2) << '\n';
  }
  return report;
}

nlohmann::ordered_json report_to_json(const PipelineReport& r) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json stages = nlohmann::ordered_json::array();
  for (const auto& s : r.stages) stages.push_back({{"name", s.name}, {"seconds", s.seconds}});
  j["stages"] = stages;
  j["total_seconds"] = r.total_seconds;
  j["vertices"] = r.vertices;
  j["triangles"] = r.triangles;
  j["atlas_resolution"] = r.atlas_resolution;
  j["occupied_texels"] = r.occupied_texels;
  j["unwrap"] = {{"isotropic_alignment", r.unwrap.isotropic_alignment},
                 {"visible", r.unwrap.visible},
                 {"first_occlusion", r.unwrap.first_occlusion},
                 {"remainder", r.unwrap.remainder},
                 {"islands", r.unwrap.islands},
                 {"demoted_slivers", r.unwrap.demoted_slivers},
                 {"demoted_overlaps", r.unwrap.demoted_overlaps}};
  j["degenerate_uv_frames"] = r.degenerate_uv_frames;
  j["glb_bytes"] = r.glb_bytes;
  nlohmann::ordered_json outputs = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.outputs) outputs[k] = v;
  j["outputs"] = outputs;
  return j;
}

}  // namespace meshfinish
