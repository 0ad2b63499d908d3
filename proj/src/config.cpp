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

#include "meshfinish/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "meshfinish/baker.hpp"
#include "meshfinish/error.hpp"
#include "meshfinish/toml_lite.hpp"

namespace meshfinish {

namespace {

using nlohmann::json;

// Walks one JSON object, consuming known keys and failing on the rest.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw ValidationError("config: '" + name_ + "' must be a table");
  }
  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key)) throw ValidationError("config: unknown key '" + prefix() + key + "'");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ValidationError("config: bad value for '" + prefix() + key + "'");
    }
  }
  void get_rect(const char* key, Rect& r) {
    std::vector<double> v;
    get(key, v);
    if (!j_.contains(key)) return;
    if (v.size() != 4) throw ValidationError("config: '" + prefix() + key + "' needs [x0, y0, x1, y1]");
    r = {v[0], v[1], v[2], v[3]};
  }
  void get_vec3(const char* key, Vec3& p) {
    std::vector<double> v;
    get(key, v);
    if (!j_.contains(key)) return;
    if (v.size() != 3) throw ValidationError("config: '" + prefix() + key + "' needs 3 numbers");
    p = {v[0], v[1], v[2]};
  }
  void get_beta(const char* key, std::optional<BetaParams>& b) {
    std::vector<double> v;
    get(key, v);
    if (!j_.contains(key)) return;
    if (v.size() != 2) throw ValidationError("config: '" + prefix() + key + "' needs [alpha, beta]");
    b = BetaParams{v[0], v[1]};
  }
  bool has_table(const char* key) {
    seen_.insert(key);
    return j_.contains(key);
  }
  const json& table(const char* key) const { return j_.at(key); }

 private:
  std::string prefix() const { return name_.empty() ? "" : name_ + "."; }
  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

}  // namespace

void validate(const PipelineConfig& c) {
  const int sources = !c.input.mesh.empty() + !c.input.sdf.empty() + !c.input.grid.empty();
  if (sources != 1) throw ValidationError("config: exactly one of input.mesh, input.sdf, input.grid is required");
  if (c.input.resolution < 2 || c.input.resolution > 1024)
    throw ValidationError("config: input.resolution must lie in [2, 1024]");
  for (int a = 0; a < 3; ++a)
    if (!(c.input.bounds.min[a] < c.input.bounds.max[a])) throw ValidationError("config: input bounds are empty");
  if (!(c.input.offset_fraction > 0 && c.input.offset_fraction <= 0.5))
    throw ValidationError("config: input.offset_fraction must lie in (0, 0.5]");
  validate(c.unwrap);
  validate_resolution(c.bake.resolution);
  if (c.bake.dilation > 1024) throw ValidationError("config: bake.dilation is unreasonably large");
  if (!std::isfinite(c.material.metallic) || !std::isfinite(c.material.roughness))
    throw ValidationError("config: material scalars must be finite");
  if (c.material.metallic_beta) validate(*c.material.metallic_beta);
  if (c.material.roughness_beta) validate(*c.material.roughness_beta);
  if (c.lighting.preview_size < 16 || c.lighting.preview_size > 8192)
    throw ValidationError("config: lighting.preview_size must lie in [16, 8192]");
  if (c.output.png_compression < 0 || c.output.png_compression > 9)
    throw ValidationError("config: output.png_compression must lie in [0, 9]");
  if (c.threads < 0 || c.threads > 1024) throw ValidationError("config: threads must lie in [0, 1024]");
}

PipelineConfig config_from_json(const json& j) {
  PipelineConfig c;
  Section root(j, "");
  root.get("threads", c.threads);
  if (root.has_table("input")) {
    Section s(root.table("input"), "input");
    s.get("mesh", c.input.mesh);
    s.get("sdf", c.input.sdf);
    s.get("grid", c.input.grid);
    s.get("grid_sidecar", c.input.grid_sidecar);
    s.get("grid_positive_inside", c.input.grid_positive_inside);
    s.get("resolution", c.input.resolution);
    s.get_vec3("bounds_min", c.input.bounds.min);
    s.get_vec3("bounds_max", c.input.bounds.max);
    s.get("project_offsets", c.input.project_offsets);
    s.get("offset_fraction", c.input.offset_fraction);
  }
  if (root.has_table("unwrap")) {
    Section s(root.table("unwrap"), "unwrap");
    s.get("normal_threshold", c.unwrap.normal_threshold);
    s.get_rect("visible_region", c.unwrap.visible_region);
    s.get_rect("first_occlusion_region", c.unwrap.first_occlusion_region);
    s.get_rect("remainder_region", c.unwrap.remainder_region);
    s.get("island_padding", c.unwrap.island_padding);
    s.get("proximity_slack", c.unwrap.proximity_slack);
    s.get("min_remainder_cell", c.unwrap.min_remainder_cell);
    s.get("split_connected_islands", c.unwrap.split_connected_islands);
  }
  if (root.has_table("bake")) {
    Section s(root.table("bake"), "bake");
    s.get("resolution", c.bake.resolution);
    s.get("dilation", c.bake.dilation);
    s.get("albedo", c.bake.albedo);
    s.get("normal", c.bake.normal);
  }
  if (root.has_table("material")) {
    Section s(root.table("material"), "material");
    s.get("metallic", c.material.metallic);
    s.get("roughness", c.material.roughness);
    s.get_beta("metallic_beta", c.material.metallic_beta);
    s.get_beta("roughness_beta", c.material.roughness_beta);
    s.get("embed_orm", c.material.embed_orm);
  }
  if (root.has_table("lighting")) {
    Section s(root.table("lighting"), "lighting");
    s.get("environment", c.lighting.environment);
    s.get("preview", c.lighting.preview);
    s.get("preview_size", c.lighting.preview_size);
  }
  if (root.has_table("output")) {
    Section s(root.table("output"), "output");
    s.get("glb", c.output.glb);
    s.get("report", c.output.report);
    s.get("svg", c.output.svg);
    s.get("layout", c.output.layout);
    s.get("preview", c.output.preview);
    s.get("gbuffer", c.output.gbuffer);
    s.get("png_compression", c.output.png_compression);
  }
  return c;
}

json config_to_json(const PipelineConfig& c) {
  auto rect = [](const Rect& r) { return json::array({r.x0, r.y0, r.x1, r.y1}); };
  auto vec = [](const Vec3& v) { return json::array({v.x, v.y, v.z}); };
  json j;
  j["threads"] = c.threads;
  j["input"] = {{"mesh", c.input.mesh},
                {"sdf", c.input.sdf},
                {"grid", c.input.grid},
                {"grid_sidecar", c.input.grid_sidecar},
                {"grid_positive_inside", c.input.grid_positive_inside},
                {"resolution", c.input.resolution},
                {"bounds_min", vec(c.input.bounds.min)},
                {"bounds_max", vec(c.input.bounds.max)},
                {"project_offsets", c.input.project_offsets},
                {"offset_fraction", c.input.offset_fraction}};
  j["unwrap"] = {{"normal_threshold", c.unwrap.normal_threshold},
                 {"visible_region", rect(c.unwrap.visible_region)},
                 {"first_occlusion_region", rect(c.unwrap.first_occlusion_region)},
                 {"remainder_region", rect(c.unwrap.remainder_region)},
                 {"island_padding", c.unwrap.island_padding},
                 {"proximity_slack", c.unwrap.proximity_slack},
                 {"min_remainder_cell", c.unwrap.min_remainder_cell},
                 {"split_connected_islands", c.unwrap.split_connected_islands}};
  j["bake"] = {{"resolution", c.bake.resolution},
               {"dilation", c.bake.dilation},
               {"albedo", c.bake.albedo},
               {"normal", c.bake.normal}};
  j["material"] = {{"metallic", c.material.metallic},
                   {"roughness", c.material.roughness},
                   {"embed_orm", c.material.embed_orm}};
  if (c.material.metallic_beta)
    j["material"]["metallic_beta"] = {c.material.metallic_beta->alpha, c.material.metallic_beta->beta};
  if (c.material.roughness_beta)
    j["material"]["roughness_beta"] = {c.material.roughness_beta->alpha, c.material.roughness_beta->beta};
  j["lighting"] = {{"environment", c.lighting.environment},
                   {"preview", c.lighting.preview},
                   {"preview_size", c.lighting.preview_size}};
  j["output"] = {{"glb", c.output.glb},         {"report", c.output.report},
                 {"svg", c.output.svg},         {"layout", c.output.layout},
                 {"preview", c.output.preview}, {"gbuffer", c.output.gbuffer},
                 {"png_compression", c.output.png_compression}};
  return j;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  json j;
  if (path.extension() == ".toml") {
    j = parse_toml_lite(ss.str());
  } else {
    try {
      j = json::parse(ss.str());
    } catch (const json::exception& e) {
      throw ParseError("config: " + std::string(e.what()));
    }
  }
  return config_from_json(j);
}

PbrMaterial resolve_material(const MaterialConfig& c) {
  const double metallic = c.metallic_beta ? beta_mode(*c.metallic_beta) : c.metallic;
  const double roughness = c.roughness_beta ? beta_mode(*c.roughness_beta) : c.roughness;
  return make_material(metallic, roughness);
}

}  // namespace meshfinish
