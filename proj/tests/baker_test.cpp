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

#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "meshfinish/baker.hpp"
#include "meshfinish/corpus.hpp"
#include "meshfinish/error.hpp"
#include "meshfinish/fields.hpp"
#include "meshfinish/parallel.hpp"
#include "meshfinish/predicates.hpp"
#include "meshfinish/uv_unwrap.hpp"
#include "test_meshes.hpp"

namespace meshfinish {
namespace {

using testing::box;
using testing::icosphere;
using testing::subdivided_box;

UvLayout manual_layout(std::vector<Vec2> uvs) {
  UvLayout l;
  const std::size_t nt = uvs.size() / 3;
  l.corner_uvs = std::move(uvs);
  l.triangle_layer.assign(nt, Layer::Visible);
  l.triangle_cube_face.assign(nt, CubeFace::PosZ);
  return l;
}

Vec3 texel_vec(const TextureImage& img, int x, int y) {
  const float* p = img.at(x, y);
  return {p[0], p[1], p[2]};
}

TEST(Resolution, PowersOfTwoInRange) {
  for (int r : {64, 128, 1024, 8192}) EXPECT_NO_THROW(validate_resolution(r));
  for (int r : {0, 32, 63, 100, 16384, -64}) EXPECT_THROW(validate_resolution(r), ValidationError);
  EXPECT_EQ(default_dilation_iterations(1024), 4);
  EXPECT_EQ(default_dilation_iterations(4096), 16);
}

TEST(GBuffer, CenterTexelIsBarycentricBlend) {
  IndexedMesh m;
  m.positions = {{1, 2, 3}, {-4, 0.5, 2}, {0, -1, 7}};
  m.indices = {{0, 1, 2}};
  // Covers the whole atlas.
  const UvLayout l = manual_layout({{0, 0}, {2, 0}, {0, 2}});
  const GBuffer g = bake_gbuffer(m, l, 64);
  EXPECT_EQ(g.position.occupied_count(), 64u * 64u);
  const Vec2 q = texel_center_uv(32, 32, 64, 64);
  const double lb = q.x / 2, lc = q.y / 2, la = 1 - lb - lc;
  const Vec3 expected = m.positions[0] * la + m.positions[1] * lb + m.positions[2] * lc;
  EXPECT_LT(distance(texel_vec(g.position, 32, 32), expected), 1e-5);
  EXPECT_EQ(g.triangle[g.position.texel(32, 32)], 0);
}

TEST(GBuffer, EmptyLayoutHasNoTexels) {
  const GBuffer g = bake_gbuffer(IndexedMesh{}, manual_layout({}), 64);
  EXPECT_EQ(g.position.occupied_count(), 0u);
  EXPECT_EQ(g.normal.occupied_count(), 0u);
}

TEST(GBuffer, MismatchedLayoutRejected) {
  EXPECT_THROW(bake_gbuffer(box(), manual_layout({{0, 0}, {1, 0}, {0, 1}}), 64), ValidationError);
  EXPECT_THROW(bake_gbuffer(box(), unwrap(box()), 96), ValidationError);
}

TEST(GBuffer, BoxTexelsLieOnTheSurface) {
  const IndexedMesh m = box();
  const GBuffer g = bake_gbuffer(m, unwrap(m), 512);
  ASSERT_GT(g.position.occupied_count(), 0u);
  for (int y = 0; y < 512; ++y)
    for (int x = 0; x < 512; ++x) {
      if (!g.position.occupied(x, y)) continue;
      const Vec3 p = texel_vec(g.position, x, y);
      const double d = std::max({std::fabs(p.x), std::fabs(p.y), std::fabs(p.z)});
      EXPECT_NEAR(d, 0.5, 1e-4);
    }
}

TEST(GBuffer, OccupiedIffCenterInsideWithoutCentroidClaim) {
  const IndexedMesh m = subdivided_box(4);
  const UvLayout l = unwrap(m);
  const int R = 256;
  const GBuffer g = bake_gbuffer(m, l, R, false);
  for (int y = 0; y < R; ++y)
    for (int x = 0; x < R; ++x) {
      const Vec2 q = texel_center_uv(x, y, R, R);
      int strictly = 0, closed = 0;
      for (std::size_t t = 0; t < l.num_triangles(); ++t) {
        const Vec2* uv = &l.corner_uvs[t * 3];
        const double w0 = orient2d(uv[1], uv[2], q), w1 = orient2d(uv[2], uv[0], q),
                     w2 = orient2d(uv[0], uv[1], q);
        if (w0 > 0 && w1 > 0 && w2 > 0) ++strictly;
        if (w0 >= 0 && w1 >= 0 && w2 >= 0) ++closed;
      }
      const bool occ = g.position.occupied(x, y);
      if (strictly) EXPECT_TRUE(occ) << x << "," << y;
      if (!closed) EXPECT_FALSE(occ) << x << "," << y;
      if (occ) {
        const auto t = static_cast<std::size_t>(g.triangle[g.position.texel(x, y)]);
        const Vec2* uv = &l.corner_uvs[t * 3];
        EXPECT_GE(orient2d(uv[1], uv[2], q), 0);
        EXPECT_GE(orient2d(uv[2], uv[0], q), 0);
        EXPECT_GE(orient2d(uv[0], uv[1], q), 0);
      }
    }
}

TEST(GBuffer, SharedEdgeTexelsCoveredOnce) {
  // Two triangles split the atlas along its diagonal, which passes through
  // every texel centre with x == y.
  IndexedMesh m;
  m.positions = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
  m.indices = {{0, 1, 2}, {0, 2, 3}};
  const UvLayout l = manual_layout({{0, 0}, {1, 0}, {1, 1}, {0, 0}, {1, 1}, {0, 1}});
  const GBuffer g = bake_gbuffer(m, l, 64, false);
  EXPECT_EQ(g.position.occupied_count(), 64u * 64u);
  // Reversed diagonal: texel centres on the anti-diagonal.
  const UvLayout l2 = manual_layout({{0, 0}, {1, 0}, {0, 1}, {1, 0}, {1, 1}, {0, 1}});
  const GBuffer g2 = bake_gbuffer(m, l2, 64, false);
  EXPECT_EQ(g2.position.occupied_count(), 64u * 64u);
}

TEST(GBuffer, CentroidClaimFillsUnownedTexels) {
  const IndexedMesh m = corpus_mesh(5);
  const UvLayout l = unwrap(m);
  const int res = 256;
  const GBuffer g = bake_gbuffer(m, l, res);
  const GBuffer bare = bake_gbuffer(m, l, res, false);
  auto unseen = [&](const GBuffer& b) {
    std::vector<std::uint8_t> seen(m.num_triangles(), 0);
    for (auto t : b.triangle)
      if (t >= 0) seen[static_cast<std::size_t>(t)] = 1;
    return seen;
  };
  const auto seen = unseen(g), seen_bare = unseen(bare);
  EXPECT_LT(std::count(seen.begin(), seen.end(), 0), std::count(seen_bare.begin(), seen_bare.end(), 0));
  // More triangles than free texels here, so a triangle may still miss out,
  // but only when someone else owns its centroid texel.
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    if (seen[t]) continue;
    const Vec2* uv = &l.corner_uvs[t * 3];
    const Vec2 c = (uv[0] + uv[1] + uv[2]) * (1.0 / 3.0);
    const int x = std::clamp(static_cast<int>(std::floor(c.x * res)), 0, res - 1);
    const int y = std::clamp(static_cast<int>(std::floor((1.0 - c.y) * res)), 0, res - 1);
    EXPECT_GE(g.triangle[g.position.texel(x, y)], 0);
  }
  EXPECT_LE(bare.position.occupied_count(), g.position.occupied_count());
}

TEST(GBuffer, ThreadCountInvariant) {
  const IndexedMesh m = corpus_mesh(3);
  const UvLayout l = unwrap(m);
  ScopedThreadCount one(1);
  const GBuffer a = bake_gbuffer(m, l, 512);
  set_thread_count(4);
  const GBuffer b = bake_gbuffer(m, l, 512);
  EXPECT_EQ(a.position.data, b.position.data);
  EXPECT_EQ(a.normal.data, b.normal.data);
  EXPECT_EQ(a.triangle, b.triangle);
}

TEST(GBuffer, ResolutionMonotone) {
  const IndexedMesh m = box({0.5, 0.4, 0.3});
  const UvLayout l = unwrap(m);
  const GBuffer lo = bake_gbuffer(m, l, 512, false), hi = bake_gbuffer(m, l, 1024, false);
  // World length of one 1024 texel on the visible charts.
  const double tol = 1.0 / (1024 * l.diagnostics.visible_scale);
  for (int y = 0; y < 512; ++y)
    for (int x = 0; x < 512; ++x) {
      if (!lo.position.occupied(x, y)) continue;
      const Vec3 p = texel_vec(lo.position, x, y);
      double best = 1e9;
      for (int dy = -1; dy <= 2; ++dy)
        for (int dx = -1; dx <= 2; ++dx) {
          const int X = 2 * x + dx, Y = 2 * y + dy;
          if (X < 0 || Y < 0 || X >= 1024 || Y >= 1024 || !hi.position.occupied(X, Y)) continue;
          best = std::min(best, distance(p, texel_vec(hi.position, X, Y)));
        }
      EXPECT_LE(best, tol) << x << "," << y;
    }
}

TEST(GBuffer, FileRoundTrip) {
  const IndexedMesh m = box();
  const GBuffer g = bake_gbuffer(m, unwrap(m), 64);
  const auto dir = std::filesystem::temp_directory_path() / "meshfinish_baker_test";
  std::filesystem::create_directories(dir);
  write_gbuffer(g, dir / "g.raw", dir / "g.json");
  const GBuffer r = read_gbuffer(dir / "g.raw", dir / "g.json");
  EXPECT_EQ(r.position.data, g.position.data);
  EXPECT_EQ(r.normal.data, g.normal.data);
  EXPECT_EQ(r.position.occupancy, g.position.occupancy);
  std::filesystem::remove_all(dir);
}

TEST(Attributes, GeometryNormalsDecodeToUp) {
  const IndexedMesh m = icosphere(3);
  const UvLayout l = unwrap(m);
  const GBuffer g = bake_gbuffer(m, l, 256);
  const BakedAttributes b =
      bake_attributes(g, make_albedo_field("constant:0.2,0.4,0.6"), make_normal_field("geometry"), m, l);
  EXPECT_EQ(b.albedo.occupancy, g.position.occupancy);
  std::size_t n = 0;
  for (int y = 0; y < 256; ++y)
    for (int x = 0; x < 256; ++x) {
      if (!b.normal.occupied(x, y)) {
        EXPECT_EQ(texel_vec(b.albedo, x, y), Vec3{});
        continue;
      }
      ++n;
      const Vec3 t = texel_vec(b.normal, x, y) * 2.0 - Vec3{1, 1, 1};
      EXPECT_LT(angle_between(t, {0, 0, 1}), kPi / 180);
      EXPECT_EQ(texel_vec(b.albedo, x, y), (Vec3{0.2f, 0.4f, 0.6f}));
    }
  EXPECT_GT(n, 0u);
}

TEST(Attributes, CheckerSurvivesResampling) {
  const IndexedMesh m = subdivided_box(8);
  const UvLayout l = unwrap(m);
  const int R = 1024;
  const GBuffer g = bake_gbuffer(m, l, R);
  const FieldSampler field = make_albedo_field("checker_x:0.25");
  const BakedAttributes b = bake_attributes(g, field, make_normal_field("geometry"), m, l);
  std::size_t good = 0;
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const Vec2 c = (l.corner_uvs[t * 3] + l.corner_uvs[t * 3 + 1] + l.corner_uvs[t * 3 + 2]) * (1.0 / 3.0);
    const int x = std::clamp(static_cast<int>(c.x * R), 0, R - 1);
    const int y = std::clamp(static_cast<int>((1 - c.y) * R), 0, R - 1);
    const Tri tri = m.indices[t];
    const Vec3 p = (m.positions[tri[0]] + m.positions[tri[1]] + m.positions[tri[2]]) / 3.0;
    const Vec3 want = field(p, {});
    const Vec3 got = texel_vec(b.albedo, x, y);
    if (b.albedo.occupied(x, y) && std::fabs(got.x - want.x) <= 1.0 / 255 &&
        std::fabs(got.y - want.y) <= 1.0 / 255 && std::fabs(got.z - want.z) <= 1.0 / 255)
      ++good;
  }
  EXPECT_GE(static_cast<double>(good), 0.99 * static_cast<double>(m.num_triangles()));
}

TEST(Attributes, TangentRoundTrip) {
  const IndexedMesh m = compute_geometry_normals(corpus_mesh(10));
  const UvLayout l = unwrap(m);
  const int R = 512;
  const GBuffer g = bake_gbuffer(m, l, R);
  const FieldSampler bumps = make_normal_field("bumps:0.3,6");
  const BakedAttributes b = bake_attributes(g, make_albedo_field("gradient"), bumps, m, l);
  std::size_t total = 0, good = 0;
  for (int y = 0; y < R; ++y)
    for (int x = 0; x < R; ++x) {
      if (!g.position.occupied(x, y)) continue;
      ++total;
      const auto t = static_cast<std::size_t>(g.triangle[g.position.texel(x, y)]);
      const TangentFrame f = triangle_tangent_frame(m, l.corner_uvs, t);
      const Vec3 n = normalize(texel_vec(g.normal, x, y));
      const Vec3 want = normalize(bumps(texel_vec(g.position, x, y), n));
      const Vec3 enc = texel_vec(b.normal, x, y) * 2.0 - Vec3{1, 1, 1};
      const Vec3 got = from_tangent_space(f, n, normalize(enc));
      if (angle_between(got, want) < kPi / 180) ++good;
    }
  ASSERT_GT(total, 0u);
  EXPECT_GE(static_cast<double>(good), 0.99 * static_cast<double>(total));
}

TEST(Attributes, TangentFrameFollowsUvAxes) {
  IndexedMesh m;
  m.positions = {{0, 0, 0}, {2, 0, 0}, {0, 3, 0}};
  m.indices = {{0, 1, 2}};
  const std::vector<Vec2> uv = {{0, 0}, {1, 0}, {0, 1}};
  const TangentFrame f = triangle_tangent_frame(m, uv, 0);
  EXPECT_FALSE(f.degenerate);
  EXPECT_LT(distance(normalize(f.tangent), {1, 0, 0}), 1e-12);
  EXPECT_LT(distance(normalize(f.bitangent), {0, 1, 0}), 1e-12);
  const Vec3 n{0, 0, 1};
  const Vec3 w = normalize({0.3, -0.2, 1});
  EXPECT_LT(distance(to_tangent_space(f, n, w), w), 1e-12);
  EXPECT_LT(distance(from_tangent_space(f, n, to_tangent_space(f, n, w)), w), 1e-12);

  const std::vector<Vec2> flat = {{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}};
  EXPECT_TRUE(triangle_tangent_frame(m, flat, 0).degenerate);
}

TEST(Dilation, SingleTexelSpreadsToRing) {
  TextureImage img(5, 5, 1);
  img.at(2, 2)[0] = 0.75f;
  img.occupancy[img.texel(2, 2)] = 1;
  const TextureImage out = dilate_margins(img, 1);
  EXPECT_EQ(out.occupied_count(), 9u);
  for (int y = 1; y <= 3; ++y)
    for (int x = 1; x <= 3; ++x) EXPECT_EQ(out.at(x, y)[0], 0.75f);
  EXPECT_EQ(out.at(0, 0)[0], 0.0f);
}

TEST(Dilation, ZeroIterationsIsIdentity) {
  TextureImage img(4, 4, 3);
  img.at(1, 1)[2] = 0.5f;
  img.occupancy[img.texel(1, 1)] = 1;
  const TextureImage out = dilate_margins(img, 0);
  EXPECT_EQ(out.data, img.data);
  EXPECT_EQ(out.occupancy, img.occupancy);
  EXPECT_THROW(dilate_margins(img, -1), ValidationError);
}

TEST(Dilation, MidpointAveragesBothSides) {
  TextureImage img(5, 3, 1);
  img.at(1, 1)[0] = 0.2f;
  img.at(3, 1)[0] = 0.6f;
  img.occupancy[img.texel(1, 1)] = 1;
  img.occupancy[img.texel(3, 1)] = 1;
  const TextureImage out = dilate_margins(img, 1);
  EXPECT_FLOAT_EQ(out.at(2, 1)[0], (0.2f + 0.6f) / 2);
  EXPECT_FLOAT_EQ(out.at(2, 0)[0], (0.2f + 0.6f) / 2);
  EXPECT_EQ(out.at(0, 1)[0], 0.2f);
}

TEST(Dilation, MatchesMorphologyAndPreservesOriginals) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<float> u(0, 1);
  const int W = 61, H = 47;
  TextureImage img(W, H, 3);
  for (std::size_t i = 0; i < img.num_texels(); ++i)
    if (u(rng) < 0.02f) {
      img.occupancy[i] = 1;
      for (int c = 0; c < 3; ++c) img.data[i * 3 + c] = u(rng);
    }
  for (int k : {1, 2, 4, 8}) {
    const TextureImage out = dilate_margins(img, k);
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x) {
        bool near = false;
        for (int dy = -k; dy <= k && !near; ++dy)
          for (int dx = -k; dx <= k && !near; ++dx) {
            const int sx = x + dx, sy = y + dy;
            near = sx >= 0 && sy >= 0 && sx < W && sy < H && img.occupied(sx, sy);
          }
        EXPECT_EQ(out.occupied(x, y), near) << k << ":" << x << "," << y;
        if (img.occupied(x, y))
          for (int c = 0; c < 3; ++c) EXPECT_EQ(out.at(x, y)[c], img.at(x, y)[c]);
      }
  }
}

TEST(Dilation, SharedImagesStayAligned) {
  TextureImage a(8, 8, 3), b(8, 8, 1);
  a.occupancy[a.texel(4, 4)] = b.occupancy[b.texel(4, 4)] = 1;
  b.at(4, 4)[0] = 1.0f;
  TextureImage* both[] = {&a, &b};
  dilate_margins_shared(both, 2);
  EXPECT_EQ(a.occupancy, b.occupancy);
  EXPECT_EQ(a.occupied_count(), 25u);
  TextureImage c(8, 8, 1);
  TextureImage* mismatched[] = {&a, &c};
  EXPECT_THROW(dilate_margins_shared(mismatched, 1), ValidationError);
}

TEST(Orm, ConstantChannelsOverOccupancy) {
  const IndexedMesh m = box();
  const GBuffer g = bake_gbuffer(m, unwrap(m), 64);
  const TextureImage orm = bake_orm(g, 0.7, 1.3);
  EXPECT_EQ(orm.occupancy, g.position.occupancy);
  for (std::size_t i = 0; i < orm.num_texels(); ++i) {
    if (!orm.occupancy[i]) continue;
    EXPECT_EQ(orm.data[i * 3], 1.0f);
    EXPECT_EQ(orm.data[i * 3 + 1], 0.7f);
    EXPECT_EQ(orm.data[i * 3 + 2], 1.0f);
  }
}

}  // namespace
}  // namespace meshfinish
