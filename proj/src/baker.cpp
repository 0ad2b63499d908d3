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

#include "meshfinish/baker.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "json.hpp"
#include "meshfinish/error.hpp"
#include "meshfinish/parallel.hpp"
#include "meshfinish/predicates.hpp"

namespace meshfinish {

void validate_resolution(int resolution) {
  if (resolution < 64 || resolution > 8192 || !std::has_single_bit(static_cast<unsigned>(resolution)))
    throw ValidationError("atlas resolution must be a power of two in [64, 8192], got " +
                          std::to_string(resolution));
}

int default_dilation_iterations(int resolution) { return std::max(4, resolution / 256); }

namespace {

// An edge owns the points lying exactly on it when it heads downward, or
// heads right along a horizontal line. The reversed edge of a neighbouring
// triangle then never does, so shared edges are covered exactly once.
inline bool owns_boundary(Vec2 a, Vec2 b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  return dy < 0 || (dy == 0 && dx > 0);
}

constexpr int kBandRows = 8;

}  // namespace

GBuffer bake_gbuffer(const IndexedMesh& mesh_in, const UvLayout& layout, int resolution,
                     bool claim_centroid_texels) {
  validate_resolution(resolution);
  validate(mesh_in);
  const std::size_t nt = mesh_in.indices.size();
  if (layout.corner_uvs.size() != nt * 3) throw ValidationError("bake: layout does not match mesh");
  const IndexedMesh normals_src = mesh_in.has_normals() ? IndexedMesh{} : compute_geometry_normals(mesh_in);
  const std::vector<Vec3>& vnormals = mesh_in.has_normals() ? mesh_in.vertex_normals : normals_src.vertex_normals;

  const int W = resolution, H = resolution;
  GBuffer g;
  g.position = TextureImage(W, H, 3);
  g.normal = TextureImage(W, H, 3);
  g.triangle.assign(g.position.num_texels(), -1);

  // Texel rows touched by each triangle, bucketed into bands.
  const int bands = (H + kBandRows - 1) / kBandRows;
  std::vector<std::array<int, 4>> box(nt);
  std::vector<std::uint8_t> positive(nt, 0);
  parallel_for_each(0, nt, 4096, [&](std::size_t t) {
    const Vec2* uv = &layout.corner_uvs[t * 3];
    positive[t] = orient2d(uv[0], uv[1], uv[2]) > 0;
    const double umin = std::min({uv[0].x, uv[1].x, uv[2].x}), umax = std::max({uv[0].x, uv[1].x, uv[2].x});
    const double vmin = std::min({uv[0].y, uv[1].y, uv[2].y}), vmax = std::max({uv[0].y, uv[1].y, uv[2].y});
    box[t] = {std::max(0, static_cast<int>(std::ceil(umin * W - 0.5))),
              std::min(W - 1, static_cast<int>(std::floor(umax * W - 0.5))),
              std::max(0, static_cast<int>(std::ceil((1.0 - vmax) * H - 0.5))),
              std::min(H - 1, static_cast<int>(std::floor((1.0 - vmin) * H - 0.5)))};
  });
  std::vector<std::size_t> band_start(bands + 1, 0);
  for (std::size_t t = 0; t < nt; ++t) {
    if (box[t][0] > box[t][1] || box[t][2] > box[t][3]) continue;
    for (int b = box[t][2] / kBandRows; b <= box[t][3] / kBandRows; ++b) ++band_start[b + 1];
  }
  for (int b = 0; b < bands; ++b) band_start[b + 1] += band_start[b];
  std::vector<std::uint32_t> band_tris(band_start[bands]);
  {
    std::vector<std::size_t> fill(band_start.begin(), band_start.end() - 1);
    for (std::size_t t = 0; t < nt; ++t) {
      if (box[t][0] > box[t][1] || box[t][2] > box[t][3]) continue;
      for (int b = box[t][2] / kBandRows; b <= box[t][3] / kBandRows; ++b)
        band_tris[fill[b]++] = static_cast<std::uint32_t>(t);
    }
  }

  parallel_for(0, static_cast<std::size_t>(bands), 1, [&](std::size_t b0, std::size_t b1) {
    for (std::size_t band = b0; band < b1; ++band) {
      const int row_lo = static_cast<int>(band) * kBandRows;
      const int row_hi = std::min(H - 1, row_lo + kBandRows - 1);
      for (std::size_t k = band_start[band]; k < band_start[band + 1]; ++k) {
        const std::uint32_t t = band_tris[k];
        const Vec2* uv = &layout.corner_uvs[t * 3];
        // Work on the positively oriented vertex order.
        std::array<int, 3> order = positive[t] ? std::array<int, 3>{0, 1, 2} : std::array<int, 3>{0, 2, 1};
        const Vec2 a = uv[order[0]], bq = uv[order[1]], c = uv[order[2]];
        const double area = orient2d(a, bq, c);
        if (area == 0) continue;
        const bool own0 = owns_boundary(bq, c), own1 = owns_boundary(c, a), own2 = owns_boundary(a, bq);
        const Tri& tri = mesh_in.indices[t];
        const Vec3 p[3] = {mesh_in.positions[tri[order[0]]], mesh_in.positions[tri[order[1]]],
                           mesh_in.positions[tri[order[2]]]};
        const Vec3 n[3] = {vnormals[tri[order[0]]], vnormals[tri[order[1]]], vnormals[tri[order[2]]]};
        const Vec3 face_n = normalize(cross(p[1] - p[0], p[2] - p[0]));
        const int y0 = std::max(row_lo, box[t][2]), y1 = std::min(row_hi, box[t][3]);
        for (int y = y0; y <= y1; ++y) {
          for (int x = box[t][0]; x <= box[t][1]; ++x) {
            const Vec2 q = texel_center_uv(x, y, W, H);
            const double w0 = orient2d(bq, c, q);
            if (w0 < 0 || (w0 == 0 && !own0)) continue;
            const double w1 = orient2d(c, a, q);
            if (w1 < 0 || (w1 == 0 && !own1)) continue;
            const double w2 = orient2d(a, bq, q);
            if (w2 < 0 || (w2 == 0 && !own2)) continue;
            const double sum = w0 + w1 + w2;
            const double l0 = w0 / sum, l1 = w1 / sum, l2 = w2 / sum;
            const Vec3 pos = p[0] * l0 + p[1] * l1 + p[2] * l2;
            Vec3 nrm = n[0] * l0 + n[1] * l1 + n[2] * l2;
            nrm = length_squared(nrm) > 1e-24 ? normalize(nrm) : face_n;
            const std::size_t id = g.position.texel(x, y);
            float* pp = g.position.data.data() + id * 3;
            float* np = g.normal.data.data() + id * 3;
            for (int i = 0; i < 3; ++i) {
              pp[i] = static_cast<float>(pos[i]);
              np[i] = static_cast<float>(nrm[i]);
            }
            g.position.occupancy[id] = 1;
            g.normal.occupancy[id] = 1;
            g.triangle[id] = static_cast<std::int32_t>(t);
          }
        }
      }
    }
  });

  // Small or sliver triangles may miss the texel centre under their own uv
  // centroid; they claim that texel if nobody owns it. Serial, index order.
  for (std::size_t t = 0; claim_centroid_texels && t < nt; ++t) {
    const Vec2* uv = &layout.corner_uvs[t * 3];
    const Vec2 c = (uv[0] + uv[1] + uv[2]) * (1.0 / 3.0);
    const int x = std::clamp(static_cast<int>(std::floor(c.x * W)), 0, W - 1);
    const int y = std::clamp(static_cast<int>(std::floor((1.0 - c.y) * H)), 0, H - 1);
    const std::size_t id = g.position.texel(x, y);
    if (g.triangle[id] >= 0) continue;
    const Tri& tri = mesh_in.indices[t];
    const Vec3 pos = (mesh_in.positions[tri[0]] + mesh_in.positions[tri[1]] + mesh_in.positions[tri[2]]) / 3.0;
    Vec3 nrm = vnormals[tri[0]] + vnormals[tri[1]] + vnormals[tri[2]];
    if (length_squared(nrm) <= 1e-24) nrm = face_normal_area(mesh_in, t);
    nrm = normalize(nrm);
    for (int i = 0; i < 3; ++i) {
      g.position.data[id * 3 + i] = static_cast<float>(pos[i]);
      g.normal.data[id * 3 + i] = static_cast<float>(nrm[i]);
    }
    g.position.occupancy[id] = 1;
    g.normal.occupancy[id] = 1;
    g.triangle[id] = static_cast<std::int32_t>(t);
  }
  return g;
}

TangentFrame triangle_tangent_frame(const IndexedMesh& mesh, std::span<const Vec2> corner_uvs,
                                    std::size_t t) {
  const Tri& tri = mesh.indices[t];
  const Vec3 e1 = mesh.positions[tri[1]] - mesh.positions[tri[0]];
  const Vec3 e2 = mesh.positions[tri[2]] - mesh.positions[tri[0]];
  const Vec2 d1 = corner_uvs[t * 3 + 1] - corner_uvs[t * 3];
  const Vec2 d2 = corner_uvs[t * 3 + 2] - corner_uvs[t * 3];
  const double det = d1.x * d2.y - d2.x * d1.y;
  TangentFrame f;
  if (std::fabs(det) > 1e-30) {
    const double r = 1.0 / det;
    f.tangent = (e1 * d2.y - e2 * d1.y) * r;
    f.bitangent = (e2 * d1.x - e1 * d2.x) * r;
    if (std::isfinite(length_squared(f.tangent)) && std::isfinite(length_squared(f.bitangent)) &&
        length_squared(f.tangent) > 0 && length_squared(f.bitangent) > 0) {
      f.tangent = normalize(f.tangent);
      f.bitangent = normalize(f.bitangent);
      return f;
    }
  }
  // Geometry fallback: tangent along the first edge.
  f.degenerate = true;
  const Vec3 n = cross(e1, e2);
  f.tangent = length_squared(e1) > 0 ? normalize(e1) : Vec3{1, 0, 0};
  f.bitangent = length_squared(n) > 0 ? normalize(cross(n, f.tangent)) : Vec3{0, 1, 0};
  return f;
}

namespace {

struct OrthoFrame {
  Vec3 t, b;
};

OrthoFrame orthonormalize(const TangentFrame& frame, const Vec3& n) {
  Vec3 t = frame.tangent - n * dot(n, frame.tangent);
  if (length_squared(t) < 1e-20) {
    // Tangent parallel to the normal; any perpendicular will do.
    const Vec3 helper = std::fabs(n.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    t = cross(helper, n);
  }
  t = normalize(t);
  Vec3 b = cross(n, t);
  if (dot(b, frame.bitangent) < 0) b = -b;
  return {t, b};
}

}  // namespace

Vec3 to_tangent_space(const TangentFrame& frame, const Vec3& n_geom, const Vec3& n_world) {
  const OrthoFrame o = orthonormalize(frame, n_geom);
  return {dot(n_world, o.t), dot(n_world, o.b), dot(n_world, n_geom)};
}

Vec3 from_tangent_space(const TangentFrame& frame, const Vec3& n_geom, const Vec3& n_tangent) {
  const OrthoFrame o = orthonormalize(frame, n_geom);
  return o.t * n_tangent.x + o.b * n_tangent.y + n_geom * n_tangent.z;
}

BakedAttributes bake_attributes(const GBuffer& g, const FieldSampler& albedo_field,
                                const FieldSampler& normal_field, const IndexedMesh& mesh,
                                const UvLayout& layout) {
  const std::size_t nt = mesh.indices.size();
  if (layout.corner_uvs.size() != nt * 3) throw ValidationError("bake: layout does not match mesh");
  if (!albedo_field || !normal_field) throw ValidationError("bake: missing field sampler");
  const int W = g.position.width, H = g.position.height;
  std::vector<TangentFrame> frames(nt);
  parallel_for_each(0, nt, 4096,
                    [&](std::size_t t) { frames[t] = triangle_tangent_frame(mesh, layout.corner_uvs, t); });

  BakedAttributes out;
  out.albedo = TextureImage(W, H, 3);
  out.normal = TextureImage(W, H, 3);
  for (const auto& f : frames) out.diagnostics.degenerate_uv_frames += f.degenerate ? 1 : 0;

  parallel_for(0, static_cast<std::size_t>(H), 4, [&](std::size_t y0, std::size_t y1) {
    for (std::size_t y = y0; y < y1; ++y)
      for (int x = 0; x < W; ++x) {
        const std::size_t id = g.position.texel(x, static_cast<int>(y));
        if (!g.position.occupancy[id]) continue;
        const float* pp = g.position.data.data() + id * 3;
        const float* np = g.normal.data.data() + id * 3;
        const Vec3 p{pp[0], pp[1], pp[2]};
        const Vec3 n = normalize(Vec3{np[0], np[1], np[2]});
        const Vec3 albedo = albedo_field(p, n);
        Vec3 nw = normal_field(p, n);
        nw = length_squared(nw) > 0 ? normalize(nw) : n;
        const Vec3 nt_ = to_tangent_space(frames[static_cast<std::size_t>(g.triangle[id])], n, nw);
        float* ap = out.albedo.data.data() + id * 3;
        float* tp = out.normal.data.data() + id * 3;
        for (int i = 0; i < 3; ++i) {
          ap[i] = static_cast<float>(std::clamp(albedo[i], 0.0, 1.0));
          tp[i] = static_cast<float>(std::clamp(nt_[i] * 0.5 + 0.5, 0.0, 1.0));
        }
        out.albedo.occupancy[id] = 1;
        out.normal.occupancy[id] = 1;
      }
  });
  return out;
}

TextureImage bake_orm(const GBuffer& g, double roughness, double metallic) {
  TextureImage orm(g.position.width, g.position.height, 3);
  const float r = static_cast<float>(std::clamp(roughness, 0.0, 1.0));
  const float m = static_cast<float>(std::clamp(metallic, 0.0, 1.0));
  for (std::size_t i = 0; i < orm.num_texels(); ++i) {
    if (!g.position.occupancy[i]) continue;
    orm.data[i * 3] = 1.0f;
    orm.data[i * 3 + 1] = r;
    orm.data[i * 3 + 2] = m;
    orm.occupancy[i] = 1;
  }
  return orm;
}

void dilate_margins_shared(std::span<TextureImage* const> images, int iterations) {
  if (iterations < 0) throw ValidationError("dilate: iterations must be >= 0");
  if (images.empty() || iterations == 0) return;
  TextureImage& first = *images[0];
  const int W = first.width, H = first.height;
  for (TextureImage* img : images)
    if (img->width != W || img->height != H || img->occupancy != first.occupancy)
      throw ValidationError("dilate: images must share size and occupancy");

  std::vector<std::uint8_t> occ = first.occupancy;
  std::vector<std::uint8_t> next(occ.size());
  std::vector<std::uint8_t> horiz(occ.size());
  for (int it = 0; it < iterations; ++it) {
    // Horizontal 3-wide OR, then the vertical pass picks the candidates.
    parallel_for(0, static_cast<std::size_t>(H), 16, [&](std::size_t y0, std::size_t y1) {
      for (std::size_t y = y0; y < y1; ++y) {
        const std::uint8_t* o = occ.data() + y * W;
        std::uint8_t* h = horiz.data() + y * W;
        for (int x = 0; x < W; ++x)
          h[x] = o[x] | (x > 0 ? o[x - 1] : 0) | (x + 1 < W ? o[x + 1] : 0);
      }
    });
    parallel_for(0, static_cast<std::size_t>(H), 16, [&](std::size_t y0, std::size_t y1) {
      for (std::size_t yy = y0; yy < y1; ++yy) {
        const int y = static_cast<int>(yy);
        const std::uint8_t* hu = y > 0 ? horiz.data() + (y - 1) * W : nullptr;
        const std::uint8_t* hc = horiz.data() + y * W;
        const std::uint8_t* hd = y + 1 < H ? horiz.data() + (y + 1) * W : nullptr;
        const std::uint8_t* o = occ.data() + y * W;
        std::uint8_t* nx = next.data() + y * W;
        for (int x = 0; x < W; ++x) {
          nx[x] = o[x];
          if (o[x]) continue;
          if (!(hc[x] | (hu ? hu[x] : 0) | (hd ? hd[x] : 0))) continue;
          nx[x] = 1;
          // Only texels occupied before this pass are read, and only
          // unoccupied ones are written, so in-place writes are safe.
          for (TextureImage* img : images) {
            const int C = img->channels;
            float acc[4] = {0, 0, 0, 0};
            int count = 0;
            for (int dy = -1; dy <= 1; ++dy) {
              const int sy = y + dy;
              if (sy < 0 || sy >= H) continue;
              for (int dx = -1; dx <= 1; ++dx) {
                const int sx = x + dx;
                if (sx < 0 || sx >= W || !occ[static_cast<std::size_t>(sy) * W + sx]) continue;
                const float* p = img->at(sx, sy);
                for (int c = 0; c < C; ++c) acc[c] += p[c];
                ++count;
              }
            }
            float* dst = img->at(x, y);
            for (int c = 0; c < C; ++c) dst[c] = acc[c] / static_cast<float>(count);
          }
        }
      }
    });
    occ.swap(next);
  }
  for (TextureImage* img : images) img->occupancy = occ;
}

TextureImage dilate_margins(const TextureImage& image, int iterations) {
  TextureImage out = image;
  TextureImage* list[] = {&out};
  dilate_margins_shared(list, iterations);
  return out;
}

void write_gbuffer(const GBuffer& g, const std::filesystem::path& raw, const std::filesystem::path& sidecar) {
  static_assert(std::endian::native == std::endian::little);
  std::ofstream out(raw, std::ios::binary);
  if (!out) throw IoError("cannot write " + raw.string());
  const std::size_t n = g.position.num_texels();
  out.write(reinterpret_cast<const char*>(g.position.data.data()), static_cast<std::streamsize>(n * 12));
  out.write(reinterpret_cast<const char*>(g.normal.data.data()), static_cast<std::streamsize>(n * 12));
  std::vector<float> occ(g.position.occupancy.begin(), g.position.occupancy.end());
  out.write(reinterpret_cast<const char*>(occ.data()), static_cast<std::streamsize>(n * 4));
  out.write(reinterpret_cast<const char*>(g.triangle.data()), static_cast<std::streamsize>(n * 4));
  if (!out) throw IoError("write failed: " + raw.string());
  const nlohmann::json meta = {
      {"width", g.position.width},
      {"height", g.position.height},
      {"planes",
       {{{"name", "position"}, {"components", 3}, {"dtype", "float32"}},
        {{"name", "normal"}, {"components", 3}, {"dtype", "float32"}},
        {{"name", "occupancy"}, {"components", 1}, {"dtype", "float32"}},
        {{"name", "triangle"}, {"components", 1}, {"dtype", "int32"}}}},
      {"row_order", "top_down"}};
  std::ofstream js(sidecar);
  if (!js) throw IoError("cannot write " + sidecar.string());
  js << meta.dump(2) << '\n';
}

GBuffer read_gbuffer(const std::filesystem::path& raw, const std::filesystem::path& sidecar) {
  std::ifstream js(sidecar);
  if (!js) throw IoError("cannot open " + sidecar.string());
  int W = 0, H = 0;
  try {
    const auto meta = nlohmann::json::parse(js);
    W = meta.at("width").get<int>();
    H = meta.at("height").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("gbuffer sidecar: ") + e.what());
  }
  if (W <= 0 || H <= 0 || W > 8192 || H > 8192) throw ParseError("gbuffer sidecar: bad size");
  GBuffer g;
  g.position = TextureImage(W, H, 3);
  g.normal = TextureImage(W, H, 3);
  const std::size_t n = g.position.num_texels();
  g.triangle.resize(n);
  std::vector<float> occ(n);
  std::ifstream in(raw, std::ios::binary);
  if (!in) throw IoError("cannot open " + raw.string());
  in.read(reinterpret_cast<char*>(g.position.data.data()), static_cast<std::streamsize>(n * 12));
  in.read(reinterpret_cast<char*>(g.normal.data.data()), static_cast<std::streamsize>(n * 12));
  in.read(reinterpret_cast<char*>(occ.data()), static_cast<std::streamsize>(n * 4));
  in.read(reinterpret_cast<char*>(g.triangle.data()), static_cast<std::streamsize>(n * 4));
  if (!in) throw ParseError("gbuffer: truncated raw file");
  for (std::size_t i = 0; i < n; ++i) {
    g.position.occupancy[i] = occ[i] != 0 ? 1 : 0;
    g.normal.occupancy[i] = g.position.occupancy[i];
  }
  return g;
}

}  // namespace meshfinish
