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

#include "meshfinish/render.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "meshfinish/baker.hpp"
#include "meshfinish/error.hpp"
#include "meshfinish/parallel.hpp"

namespace meshfinish {

PreviewBuffers rasterize_preview(const PreviewScene& scene, const PreviewCamera& cam) {
  if (!scene.mesh) throw ValidationError("preview: no mesh");
  if (cam.width <= 0 || cam.height <= 0 || cam.width > 8192 || cam.height > 8192)
    throw ValidationError("preview: bad image size");
  if (!(length(cam.direction) > 0)) throw ValidationError("preview: zero view direction");
  const IndexedMesh mesh = scene.mesh->has_normals() ? *scene.mesh : compute_geometry_normals(*scene.mesh);
  const bool textured = mesh.has_uvs() && (scene.albedo || scene.normal_map);
  const std::size_t nt = mesh.indices.size();

  const Vec3 f = normalize(cam.direction);
  const Vec3 up_hint = std::fabs(f.y) < 0.99 ? Vec3{0, 1, 0} : Vec3{0, 0, 1};
  const Vec3 r = normalize(cross(f, up_hint));
  const Vec3 u = cross(r, f);
  Vec3 lo{1e300, 1e300, 1e300}, hi = -lo;
  for (const Vec3& p : mesh.positions)
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
  const Vec3 center = (lo + hi) * 0.5;
  double extent = 0;
  for (const Vec3& p : mesh.positions)
    extent = std::max({extent, std::fabs(dot(p - center, r)), std::fabs(dot(p - center, u))});
  extent = std::max(extent, 1e-12) * cam.margin;
  const double scale = 0.5 * std::min(cam.width, cam.height) / extent;

  const int W = cam.width, H = cam.height;
  std::vector<Vec3> screen(mesh.positions.size());  // x, y in pixels, z depth
  for (std::size_t i = 0; i < screen.size(); ++i) {
    const Vec3 d = mesh.positions[i] - center;
    screen[i] = {0.5 * W + dot(d, r) * scale, 0.5 * H - dot(d, u) * scale, dot(d, f)};
  }

  std::vector<TangentFrame> frames;
  if (textured && scene.normal_map) {
    frames.resize(nt);
    parallel_for_each(0, nt, 4096, [&](std::size_t t) { frames[t] = triangle_tangent_frame(mesh, mesh.corner_uvs, t); });
  }

  PreviewBuffers out{TextureImage(W, H, 3), TextureImage(W, H, 3), TextureImage(W, H, 3)};
  std::vector<double> depth(static_cast<std::size_t>(W) * H, std::numeric_limits<double>::infinity());
  constexpr int kBand = 16;
  const int bands = (H + kBand - 1) / kBand;
  parallel_for(0, static_cast<std::size_t>(bands), 1, [&](std::size_t b0, std::size_t b1) {
    for (std::size_t band = b0; band < b1; ++band) {
      const int row_lo = static_cast<int>(band) * kBand, row_hi = std::min(H - 1, row_lo + kBand - 1);
      for (std::size_t t = 0; t < nt; ++t) {
        const Tri& tri = mesh.indices[t];
        const Vec3 a = screen[tri[0]], b = screen[tri[1]], c = screen[tri[2]];
        const double ymin = std::min({a.y, b.y, c.y}), ymax = std::max({a.y, b.y, c.y});
        const int y0 = std::max(row_lo, static_cast<int>(std::ceil(ymin - 0.5)));
        const int y1 = std::min(row_hi, static_cast<int>(std::floor(ymax - 0.5)));
        if (y0 > y1) continue;
        const double xmin = std::min({a.x, b.x, c.x}), xmax = std::max({a.x, b.x, c.x});
        const int x0 = std::max(0, static_cast<int>(std::ceil(xmin - 0.5)));
        const int x1 = std::min(W - 1, static_cast<int>(std::floor(xmax - 0.5)));
        const double area = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
        if (area == 0) continue;
        for (int y = y0; y <= y1; ++y)
          for (int x = x0; x <= x1; ++x) {
            const double px = x + 0.5, py = y + 0.5;
            const double w0 = ((b.x - px) * (c.y - py) - (b.y - py) * (c.x - px)) / area;
            const double w1 = ((c.x - px) * (a.y - py) - (c.y - py) * (a.x - px)) / area;
            const double w2 = 1.0 - w0 - w1;
            if (w0 < 0 || w1 < 0 || w2 < 0) continue;
            const double z = w0 * a.z + w1 * b.z + w2 * c.z;
            const std::size_t id = static_cast<std::size_t>(y) * W + x;
            if (!(z < depth[id])) continue;
            depth[id] = z;
            const Vec3 pos = mesh.positions[tri[0]] * w0 + mesh.positions[tri[1]] * w1 + mesh.positions[tri[2]] * w2;
            Vec3 n = normalize(mesh.vertex_normals[tri[0]] * w0 + mesh.vertex_normals[tri[1]] * w1 +
                               mesh.vertex_normals[tri[2]] * w2);
            Vec3 albedo = scene.default_albedo;
            if (textured) {
              const Vec2 uv = mesh.corner_uvs[t * 3] * w0 + mesh.corner_uvs[t * 3 + 1] * w1 +
                              mesh.corner_uvs[t * 3 + 2] * w2;
              float s[4];
              if (scene.albedo && sample_bilinear(*scene.albedo, uv, s)) albedo = {s[0], s[1], s[2]};
              if (scene.normal_map && sample_bilinear(*scene.normal_map, uv, s)) {
                const Vec3 nt_{2.0 * s[0] - 1.0, 2.0 * s[1] - 1.0, 2.0 * s[2] - 1.0};
                const Vec3 nw = from_tangent_space(frames[t], n, nt_);
                if (length_squared(nw) > 0) n = normalize(nw);
              }
            }
            for (int k = 0; k < 3; ++k) {
              out.position.at(x, y)[k] = static_cast<float>(pos[k]);
              out.normal.at(x, y)[k] = static_cast<float>(n[k]);
              out.albedo.at(x, y)[k] = static_cast<float>(albedo[k]);
            }
            out.position.occupancy[id] = out.normal.occupancy[id] = out.albedo.occupancy[id] = 1;
          }
      }
    }
  });
  return out;
}

TextureImage render_preview(const PreviewScene& scene, const SgEnvironment& env, const PreviewCamera& camera) {
  const PreviewBuffers g = rasterize_preview(scene, camera);
  ShadingInputs in;
  in.position = &g.position;
  in.normal = &g.normal;
  in.albedo = &g.albedo;
  in.material = scene.material;
  in.view_direction = -normalize(camera.direction);
  return shade_deferred(in, env);
}

}  // namespace meshfinish
