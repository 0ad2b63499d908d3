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

// Command-line driver. Exit codes: 0 success, 2 invalid input or
// configuration, 3 failure inside a processing stage.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "meshfinish/baker.hpp"
#include "meshfinish/config.hpp"
#include "meshfinish/corpus.hpp"
#include "meshfinish/error.hpp"
#include "meshfinish/fields.hpp"
#include "meshfinish/glb.hpp"
#include "meshfinish/mesh_io.hpp"
#include "meshfinish/parallel.hpp"
#include "meshfinish/pipeline.hpp"
#include "meshfinish/png_io.hpp"
#include "meshfinish/render.hpp"
#include "meshfinish/sdf.hpp"
#include "meshfinish/sg.hpp"
#include "meshfinish/tetra.hpp"
#include "meshfinish/uv_layout_io.hpp"
#include "meshfinish/uv_unwrap.hpp"

namespace fs = std::filesystem;
using namespace meshfinish;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitStage = 3;

struct Globals {
  int threads = 0;
  std::string report;
  std::string config;
  std::uint64_t seed = 1;
};

void write_report(const std::string& path, const StageClock& clock, nlohmann::ordered_json extra = {}) {
  if (path.empty()) return;
  nlohmann::ordered_json j;
  nlohmann::ordered_json stages = nlohmann::ordered_json::array();
  for (const auto& s : clock.stages()) stages.push_back({{"name", s.name}, {"seconds", s.seconds}});
  j["stages"] = stages;
  j["total_seconds"] = clock.total();
  if (!extra.is_null())
    for (auto& [k, v] : extra.items()) j[k] = v;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << '\n';
}

PipelineConfig base_config(const Globals& g) {
  PipelineConfig c = g.config.empty() ? PipelineConfig{} : load_config(g.config);
  if (g.threads > 0) c.threads = g.threads;
  return c;
}

IndexedMesh load_mesh_with_normals(const std::string& path) {
  IndexedMesh m = read_mesh(path);
  if (!m.has_normals()) m = compute_geometry_normals(std::move(m));
  m.corner_uvs.clear();
  return m;
}

Vec3 parse_vec3(const std::string& s) {
  Vec3 v;
  if (std::sscanf(s.c_str(), "%lf,%lf,%lf", &v.x, &v.y, &v.z) != 3)
    throw ValidationError("expected x,y,z but got '" + s + "'");
  return v;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"meshfinish: unwrap, bake, relight and export triangle meshes"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--threads", g.threads, "worker threads (0 = all cores)")->envname("MESHFINISH_THREADS");
  app.add_option("--report", g.report, "write a JSON timing report")->envname("MESHFINISH_REPORT");
  app.add_option("--config", g.config, "pipeline config (.json or .toml)")->envname("MESHFINISH_CONFIG");
  app.add_option("--seed", g.seed, "corpus generation seed")->envname("MESHFINISH_SEED");

  int atlas_res = 0, dilate = -1;
  auto add_bake_flags = [&](CLI::App* sub) {
    sub->add_option("--atlas-res", atlas_res, "atlas resolution (power of two)")->envname("MESHFINISH_ATLAS_RES");
    sub->add_option("--dilate", dilate, "margin dilation iterations")->envname("MESHFINISH_DILATE");
  };

  // extract
  auto* extract = app.add_subcommand("extract", "marching tetrahedra from an SDF or a raw grid");
  std::string ex_sdf, ex_grid, ex_sidecar, ex_out = "mesh.obj";
  int ex_res = 64;
  bool ex_positive_inside = false, ex_offsets = false;
  extract->add_option("--sdf", ex_sdf, "SDF expression, e.g. 'sphere(0.8)'");
  extract->add_option("--grid", ex_grid, "raw little-endian grid");
  extract->add_option("--sidecar", ex_sidecar, "grid JSON sidecar (default <grid>.json)");
  extract->add_option("--res", ex_res, "lattice nodes per axis for --sdf");
  extract->add_flag("--positive-inside", ex_positive_inside, "grid holds density, positive inside");
  extract->add_flag("--offsets", ex_offsets, "project vertices onto the SDF zero set");
  extract->add_option("-o,--out", ex_out, "output OBJ");

  // unwrap
  auto* unwrap_cmd = app.add_subcommand("unwrap", "cube-projection UV layout");
  std::string un_in, un_out = "layout.mfuv", un_svg, un_mesh_out;
  unwrap_cmd->add_option("mesh", un_in, "input OBJ/PLY")->required();
  unwrap_cmd->add_option("-o,--out", un_out, "layout file");
  unwrap_cmd->add_option("--svg", un_svg, "debug SVG of the atlas");
  unwrap_cmd->add_option("--mesh-out", un_mesh_out, "also write the mesh with UVs as OBJ");

  // bake
  auto* bake = app.add_subcommand("bake", "rasterize the layout and bake textures");
  std::string bk_mesh, bk_layout, bk_dir = ".", bk_albedo, bk_normal, bk_gbuffer;
  bake->add_option("mesh", bk_mesh, "input OBJ/PLY")->required();
  bake->add_option("layout", bk_layout, "layout file from unwrap")->required();
  bake->add_option("--out-dir", bk_dir, "directory for albedo.png / normal.png / orm.png");
  bake->add_option("--albedo", bk_albedo, "albedo field spec");
  bake->add_option("--normal", bk_normal, "normal field spec");
  bake->add_option("--gbuffer", bk_gbuffer, "dump the G-buffer to <prefix>.raw/.json");
  add_bake_flags(bake);

  // relight
  auto* relight = app.add_subcommand("relight", "render a GLB under an SG environment");
  std::string rl_glb, rl_env, rl_out = "preview.png", rl_view = "0,0,-1", rl_hdr, rl_save_env;
  int rl_size = 512;
  relight->add_option("asset", rl_glb, "GLB file")->required();
  relight->add_option("env", rl_env, "environment JSON (omit with --hdr)");
  relight->add_option("--hdr", rl_hdr, "fit the environment to an equirectangular PFM");
  relight->add_option("--save-env", rl_save_env, "write the fitted environment JSON");
  relight->add_option("--out", rl_out, "preview PNG");
  relight->add_option("--size", rl_size, "preview edge length in pixels");
  relight->add_option("--view", rl_view, "view direction x,y,z");

  // export
  auto* export_cmd = app.add_subcommand("export", "pack mesh, layout and textures into a GLB");
  std::string gx_mesh, gx_layout, gx_albedo, gx_normal, gx_orm, gx_out = "asset.glb";
  double gx_metallic = -1, gx_roughness = -1;
  export_cmd->add_option("mesh", gx_mesh, "input OBJ/PLY")->required();
  export_cmd->add_option("layout", gx_layout, "layout file from unwrap")->required();
  export_cmd->add_option("--albedo", gx_albedo, "albedo PNG (sRGB)")->required();
  export_cmd->add_option("--normal", gx_normal, "tangent-space normal PNG")->required();
  export_cmd->add_option("--orm", gx_orm, "metallic-roughness PNG");
  export_cmd->add_option("--metallic", gx_metallic, "metallic factor");
  export_cmd->add_option("--roughness", gx_roughness, "roughness factor");
  export_cmd->add_option("-o,--out", gx_out, "output GLB");

  // pipeline
  auto* pipeline = app.add_subcommand("pipeline", "extract/load, unwrap, bake, relight, export");
  std::string pl_mesh, pl_sdf, pl_out, pl_svg, pl_preview, pl_env;
  bool pl_orm = false;
  pipeline->add_option("--mesh", pl_mesh, "input mesh (overrides config)");
  pipeline->add_option("--sdf", pl_sdf, "SDF expression (overrides config)");
  pipeline->add_option("-o,--out", pl_out, "output GLB (overrides config)");
  pipeline->add_option("--svg", pl_svg, "atlas SVG");
  pipeline->add_option("--preview", pl_preview, "relit preview PNG");
  pipeline->add_option("--env", pl_env, "environment JSON for the preview");
  pipeline->add_flag("--orm", pl_orm, "embed a constant metallic-roughness texture");
  add_bake_flags(pipeline);

  // bench
  auto* bench = app.add_subcommand("bench", "median timings of unwrap + bake + export");
  std::string bn_mesh;
  int bn_runs = 10, bn_res = 1024;
  bool bn_corpus = false;
  bench->add_option("--mesh", bn_mesh, "mesh to time (default: built-in ~30K triangle mesh)");
  bench->add_flag("--corpus", bn_corpus, "time every corpus mesh");
  bench->add_option("--runs", bn_runs, "repetitions per mesh")->check(CLI::PositiveNumber);
  bench->add_option("--res", bn_res, "atlas resolution");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (g.threads < 0) throw ValidationError("--threads must be >= 0");
    set_thread_count(g.threads);
    StageClock clock;

    if (*extract) {
      InputConfig in;
      in.sdf = ex_sdf;
      in.grid = ex_grid;
      in.grid_sidecar = ex_sidecar;
      in.resolution = ex_res;
      in.grid_positive_inside = ex_positive_inside;
      in.project_offsets = ex_offsets;
      if (in.sdf.empty() == in.grid.empty()) throw ValidationError("extract needs exactly one of --sdf, --grid");
      if (ex_res < 2 || ex_res > 1024) throw ValidationError("--res must lie in [2, 1024]");
      if (!in.sdf.empty()) Sdf::parse(in.sdf);
      const IndexedMesh mesh = clock.run("extract", [&] { return load_input(in); });
      clock.run("write", [&] {
        write_obj(fs::path(ex_out), mesh);
        return 0;
      });
      std::cout << "extracted " << mesh.indices.size() << " triangles, " << mesh.positions.size()
                << " vertices -> " << ex_out << '\n';
      write_report(g.report, clock, {{"triangles", mesh.indices.size()}, {"vertices", mesh.positions.size()}});
    } else if (*unwrap_cmd) {
      const PipelineConfig cfg = base_config(g);
      validate(cfg.unwrap);
      const IndexedMesh mesh = clock.run("load", [&] { return load_mesh_with_normals(un_in); });
      const UvLayout layout = clock.run("unwrap", [&] { return unwrap(mesh, cfg.unwrap); });
      clock.run("write", [&] {
        save_layout(un_out, layout);
        if (!un_svg.empty()) {
          std::ofstream svg(un_svg);
          if (!svg) throw IoError("cannot write " + un_svg);
          write_layout_svg(svg, layout, cfg.unwrap);
        }
        if (!un_mesh_out.empty()) write_obj(fs::path(un_mesh_out), with_uvs(mesh, layout));
        return 0;
      });
      const auto& d = layout.diagnostics;
      std::cout << "layout: " << d.visible << " visible, " << d.first_occlusion << " first-occlusion, "
                << d.remainder << " remainder triangles in " << d.islands << " islands -> " << un_out << '\n';
      write_report(g.report, clock, {{"triangles", mesh.indices.size()}, {"islands", d.islands}});
    } else if (*bake) {
      PipelineConfig cfg = base_config(g);
      if (atlas_res > 0) cfg.bake.resolution = atlas_res;
      if (dilate >= 0) cfg.bake.dilation = dilate;
      if (!bk_albedo.empty()) cfg.bake.albedo = bk_albedo;
      if (!bk_normal.empty()) cfg.bake.normal = bk_normal;
      validate_resolution(cfg.bake.resolution);
      const FieldSampler albedo = make_albedo_field(cfg.bake.albedo);
      const FieldSampler normal = make_normal_field(cfg.bake.normal);
      const PbrMaterial material = resolve_material(cfg.material);
      const IndexedMesh mesh = clock.run("load", [&] { return load_mesh_with_normals(bk_mesh); });
      const UvLayout layout = load_layout(bk_layout);
      if (layout.num_triangles() != mesh.indices.size())
        throw ValidationError("layout has " + std::to_string(layout.num_triangles()) + " triangles, mesh has " +
                              std::to_string(mesh.indices.size()));
      GBuffer gbuf;
      BakedAttributes baked;
      std::optional<TextureImage> orm;
      clock.run("bake", [&] {
        gbuf = bake_gbuffer(mesh, layout, cfg.bake.resolution);
        baked = bake_attributes(gbuf, albedo, normal, mesh, layout);
        if (cfg.material.embed_orm) orm = bake_orm(gbuf, material.roughness, material.metallic);
        std::vector<TextureImage*> images = {&baked.albedo, &baked.normal};
        if (orm) images.push_back(&*orm);
        dilate_margins_shared(images, cfg.bake.dilation < 0 ? default_dilation_iterations(cfg.bake.resolution)
                                                            : cfg.bake.dilation);
        return 0;
      });
      clock.run("write", [&] {
        fs::create_directories(bk_dir);
        const int level = cfg.output.png_compression;
        write_png(fs::path(bk_dir) / "albedo.png", baked.albedo, PngOptions{true, level});
        write_png(fs::path(bk_dir) / "normal.png", baked.normal, PngOptions{false, level});
        if (orm) write_png(fs::path(bk_dir) / "orm.png", *orm, PngOptions{false, level});
        if (!bk_gbuffer.empty()) write_gbuffer(gbuf, bk_gbuffer + ".raw", bk_gbuffer + ".json");
        return 0;
      });
      std::cout << "baked " << gbuf.position.occupied_count() << " texels at " << cfg.bake.resolution << "^2 -> "
                << bk_dir << '\n';
      write_report(g.report, clock, {{"occupied_texels", gbuf.position.occupied_count()}});
    } else if (*relight) {
      if (rl_env.empty() == rl_hdr.empty()) throw ValidationError("relight needs an environment JSON or --hdr");
      if (rl_size < 16 || rl_size > 8192) throw ValidationError("--size must lie in [16, 8192]");
      PreviewCamera cam;
      cam.width = cam.height = rl_size;
      cam.direction = parse_vec3(rl_view);
      const SgEnvironment env = clock.run("environment", [&] {
        return rl_hdr.empty() ? load_environment(rl_env) : fit_environment(read_pfm(rl_hdr));
      });
      if (!rl_save_env.empty()) save_environment(rl_save_env, env);
      const ImportedAsset asset = clock.run("load", [&] { return import_glb(rl_glb); });
      const TextureImage img = clock.run("relight", [&] {
        PreviewScene scene;
        scene.mesh = &asset.mesh;
        scene.albedo = asset.albedo ? &*asset.albedo : nullptr;
        scene.normal_map = asset.normal ? &*asset.normal : nullptr;
        scene.material = asset.material;
        return render_preview(scene, env, cam);
      });
      clock.run("write", [&] {
        write_png(rl_out, img, PngOptions{true, 6});
        return 0;
      });
      std::cout << "rendered " << rl_size << "x" << rl_size << " preview -> " << rl_out << '\n';
      write_report(g.report, clock);
    } else if (*export_cmd) {
      PipelineConfig cfg = base_config(g);
      PbrMaterial material = resolve_material(cfg.material);
      if (gx_metallic >= 0) material.metallic = gx_metallic;
      if (gx_roughness >= 0) material.roughness = gx_roughness;
      material = make_material(material.metallic, material.roughness);
      const IndexedMesh mesh = clock.run("load", [&] { return load_mesh_with_normals(gx_mesh); });
      const UvLayout layout = load_layout(gx_layout);
      if (layout.num_triangles() != mesh.indices.size()) throw ValidationError("layout does not match the mesh");
      const TextureImage albedo = read_png(gx_albedo, true);
      const TextureImage normal = read_png(gx_normal, false);
      std::optional<TextureImage> orm;
      if (!gx_orm.empty()) orm = read_png(gx_orm, false);
      const std::size_t bytes = clock.run("export", [&] {
        GlbTextures tex{&albedo, &normal, orm ? &*orm : nullptr};
        return export_glb(with_uvs(mesh, layout), tex, material, gx_out,
                          GlbExportOptions{cfg.output.png_compression, "meshfinish"});
      });
      std::cout << "wrote " << bytes << " bytes -> " << gx_out << '\n';
      write_report(g.report, clock, {{"glb_bytes", bytes}});
    } else if (*pipeline) {
      PipelineConfig cfg = base_config(g);
      if (!pl_mesh.empty() || !pl_sdf.empty()) {
        cfg.input.mesh = pl_mesh;
        cfg.input.sdf = pl_sdf;
        cfg.input.grid.clear();
      }
      if (!pl_out.empty()) cfg.output.glb = pl_out;
      if (!pl_svg.empty()) cfg.output.svg = pl_svg;
      if (!pl_preview.empty()) {
        cfg.lighting.preview = true;
        cfg.output.preview = pl_preview;
      }
      if (!pl_env.empty()) cfg.lighting.environment = pl_env;
      if (pl_orm) cfg.material.embed_orm = true;
      if (atlas_res > 0) cfg.bake.resolution = atlas_res;
      if (dilate >= 0) cfg.bake.dilation = dilate;
      if (!g.report.empty()) cfg.output.report = g.report;
      const PipelineReport report = run_pipeline(cfg);
      for (const auto& s : report.stages) std::printf("%-8s %9.2f ms\n", s.name.c_str(), s.seconds * 1e3);
      std::printf("%-8s %9.2f ms  (%zu triangles, %zu bytes)\n", "total", report.total_seconds * 1e3,
                  report.triangles, report.glb_bytes);
    } else if (*bench) {
      PipelineConfig cfg = base_config(g);
      validate_resolution(bn_res);
      FinishOptions opt;
      opt.unwrap = cfg.unwrap;
      opt.resolution = bn_res;
      opt.albedo = make_albedo_field(cfg.bake.albedo);
      opt.normal = make_normal_field(cfg.bake.normal);
      opt.material = resolve_material(cfg.material);
      opt.embed_orm = cfg.material.embed_orm;
      opt.png_compression = cfg.output.png_compression;
      std::vector<std::pair<std::string, IndexedMesh>> meshes;
      if (bn_corpus) {
        for (std::size_t i = 0; i < corpus_size(); ++i) meshes.emplace_back(corpus_name(i), corpus_mesh(i, g.seed));
      } else if (!bn_mesh.empty()) {
        meshes.emplace_back(fs::path(bn_mesh).filename().string(), load_mesh_with_normals(bn_mesh));
      } else {
        meshes.emplace_back("builtin", benchmark_mesh());
      }
      std::printf("%-24s %8s %10s %10s %10s %10s %10s\n", "mesh", "tris", "unwrap_ms", "bake_ms", "export_ms",
                  "total_ms", "glb_kb");
      nlohmann::ordered_json rows = nlohmann::ordered_json::array();
      for (const auto& [name, mesh] : meshes) {
        std::vector<double> tu, tb, te, tt;
        std::size_t glb_bytes = 0;
        for (int r = 0; r < bn_runs; ++r) {
          StageClock c;
          const FinishedAsset a = finish_mesh(mesh, opt, &c);
          glb_bytes = a.glb.size();
          tu.push_back(c.stages()[0].seconds);
          tb.push_back(c.stages()[1].seconds);
          te.push_back(c.stages()[2].seconds);
          tt.push_back(c.total());
        }
        std::printf("%-24s %8zu %10.2f %10.2f %10.2f %10.2f %10.1f\n", name.c_str(), mesh.indices.size(),
                    median(tu) * 1e3, median(tb) * 1e3, median(te) * 1e3, median(tt) * 1e3, glb_bytes / 1024.0);
        rows.push_back({{"mesh", name},
                        {"triangles", mesh.indices.size()},
                        {"unwrap_ms", median(tu) * 1e3},
                        {"bake_ms", median(tb) * 1e3},
                        {"export_ms", median(te) * 1e3},
                        {"total_ms", median(tt) * 1e3},
                        {"glb_bytes", glb_bytes}});
      }
      if (!g.report.empty()) {
        std::ofstream out(g.report);
        if (!out) throw IoError("cannot write " + g.report);
        out << nlohmann::ordered_json{{"runs", bn_runs}, {"threads", thread_count()}, {"rows", rows}}.dump(2)
            << '\n';
      }
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitStage;
  }
  return 0;
}
