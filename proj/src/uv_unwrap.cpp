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

#include "meshfinish/uv_unwrap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include <Eigen/Eigenvalues>

#include "meshfinish/error.hpp"
#include "meshfinish/parallel.hpp"
#include "meshfinish/predicates.hpp"

namespace meshfinish {

std::string_view to_string(Layer layer) {
  switch (layer) {
    case Layer::Visible: return "visible";
    case Layer::FirstOcclusion: return "first_occlusion";
    case Layer::Remainder: return "remainder";
  }
  return "?";
}

std::string_view to_string(CubeFace face) {
  static constexpr std::string_view names[] = {"+x", "-x", "+y", "-y", "+z", "-z"};
  return names[static_cast<int>(face)];
}

void validate(const UnwrapConfig& c) {
  const Rect* regions[] = {&c.visible_region, &c.first_occlusion_region, &c.remainder_region};
  const char* names[] = {"visible", "first_occlusion", "remainder"};
  for (int i = 0; i < 3; ++i) {
    const Rect& r = *regions[i];
    if (!(r.x0 >= 0 && r.y0 >= 0 && r.x1 <= 1 && r.y1 <= 1 && r.x0 < r.x1 && r.y0 < r.y1))
      throw ValidationError(std::string("unwrap config: ") + names[i] +
                            " region must be a non-empty rectangle inside [0,1]^2");
  }
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      const Rect& a = *regions[i];
      const Rect& b = *regions[j];
      const bool disjoint = a.x1 <= b.x0 || b.x1 <= a.x0 || a.y1 <= b.y0 || b.y1 <= a.y0;
      if (!disjoint)
        throw ValidationError(std::string("unwrap config: regions ") + names[i] + " and " +
                              names[j] + " overlap");
    }
  if (!(c.normal_threshold >= 0 && c.normal_threshold < 1))
    throw ValidationError("unwrap config: normal_threshold must lie in [0, 1)");
  if (!(c.island_padding >= 0 && c.island_padding < 0.1))
    throw ValidationError("unwrap config: island_padding must lie in [0, 0.1)");
  if (!(c.proximity_slack >= 1))
    throw ValidationError("unwrap config: proximity_slack below 1 would drop intersecting pairs");
  if (!(c.min_remainder_cell > 0 && c.min_remainder_cell < 1))
    throw ValidationError("unwrap config: min_remainder_cell must lie in (0, 1)");
}

// ---------------------------------------------------------------------------
// Alignment

Alignment align_dominant_axes(const IndexedMesh& mesh) {
  validate(mesh);
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  double total = 0;
  for (std::size_t t = 0; t < mesh.indices.size(); ++t) {
    const Vec3 c = face_normal_area(mesh, t);
    const double l = length(c);
    if (!(l > 0)) continue;
    // area * n n^T with area = l / 2 and n = c / l.
    const Eigen::Vector3d n(c.x / l, c.y / l, c.z / l);
    cov += (0.5 * l) * (n * n.transpose());
    total += 0.5 * l;
  }
  if (!(total > 0)) throw GeometryError("align_dominant_axes: mesh has no area");
  cov /= total;

  Alignment out;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  const Eigen::Vector3d vals = solver.eigenvalues();
  out.eigenvalues = {vals[0], vals[1], vals[2]};
  const double gap = std::min(vals[1] - vals[0], vals[2] - vals[1]);
  if (gap < 1e-9) {
    out.isotropic = true;
    out.rotation = Mat3::identity();
  } else {
    const Eigen::Matrix3d vecs = solver.eigenvectors();
    std::array<Vec3, 3> v;
    for (int i = 0; i < 3; ++i) v[i] = {vecs(0, i), vecs(1, i), vecs(2, i)};
    // Assign eigenvectors to the axes they are closest to.
    std::array<int, 3> perm{0, 1, 2}, best{0, 1, 2};
    double best_score = -1;
    do {
      double score = 0;
      for (int i = 0; i < 3; ++i) score += std::fabs(v[i][perm[i]]);
      if (score > best_score + 1e-15) {
        best_score = score;
        best = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    std::array<Vec3, 3> rows;
    int weakest = 0;
    for (int i = 0; i < 3; ++i) {
      const double comp = v[i][best[i]];
      rows[best[i]] = comp < 0 ? -v[i] : v[i];
      if (std::fabs(comp) < std::fabs(v[weakest][best[weakest]])) weakest = i;
    }
    Mat3 r = Mat3::from_rows(rows[0], rows[1], rows[2]);
    if (determinant(r) < 0) {
      rows[best[weakest]] = -rows[best[weakest]];
      r = Mat3::from_rows(rows[0], rows[1], rows[2]);
    }
    out.rotation = r;
  }

  out.mesh = mesh;
  if (!out.isotropic) {
    for (Vec3& p : out.mesh.positions) p = out.rotation * p;
    for (Vec3& n : out.mesh.vertex_normals) n = normalize(out.rotation * n);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cube faces and projection

CubeFace choose_cube_face(Vec3 n) {
  const double score[6] = {n.x, -n.x, n.y, -n.y, n.z, -n.z};
  int best = 0;
  for (int f = 1; f < 6; ++f)
    if (score[f] > score[best]) best = f;
  return static_cast<CubeFace>(best);
}

std::vector<CubeFace> assign_cube_faces(const IndexedMesh& aligned) {
  const std::size_t nt = aligned.indices.size();
  std::vector<CubeFace> faces(nt, CubeFace::PosZ);
  std::vector<std::uint8_t> degenerate(nt, 0);
  parallel_for_each(0, nt, 2048, [&](std::size_t t) {
    const Vec3 n = face_normal_area(aligned, t);
    if (length_squared(n) > 0) {
      faces[t] = choose_cube_face(n);
    } else {
      degenerate[t] = 1;
    }
  });
  if (std::find(degenerate.begin(), degenerate.end(), 1) == degenerate.end()) return faces;
  const EdgeAdjacency adj = build_edge_adjacency(aligned);
  for (std::size_t t = 0; t < nt; ++t) {
    if (!degenerate[t]) continue;
    std::uint32_t pick = std::numeric_limits<std::uint32_t>::max();
    for (int e = 0; e < 3; ++e)
      for (auto u : adj.around(t, e))
        if (!degenerate[u]) pick = std::min(pick, u);
    faces[t] = pick == std::numeric_limits<std::uint32_t>::max() ? CubeFace::PosZ : faces[pick];
  }
  return faces;
}

Vec2 project_to_face(CubeFace face, const Vec3& p) {
  switch (face) {
    case CubeFace::PosX: return {p.y, p.z};
    case CubeFace::NegX: return {-p.y, p.z};
    case CubeFace::PosY: return {-p.x, p.z};
    case CubeFace::NegY: return {p.x, p.z};
    case CubeFace::PosZ: return {p.x, p.y};
    case CubeFace::NegZ: return {p.x, -p.y};
  }
  return {};
}

double face_depth(CubeFace face, const Vec3& p) {
  switch (face) {
    case CubeFace::PosX: return -p.x;
    case CubeFace::NegX: return p.x;
    case CubeFace::PosY: return -p.y;
    case CubeFace::NegY: return p.y;
    case CubeFace::PosZ: return -p.z;
    case CubeFace::NegZ: return p.z;
  }
  return 0;
}

namespace {

Vec3 face_axis(CubeFace face) {
  static const Vec3 axes[] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  return axes[static_cast<int>(face)];
}

Triangle2 projected_triangle(const IndexedMesh& m, std::size_t t, CubeFace face) {
  const Tri& tri = m.indices[t];
  return {project_to_face(face, m.positions[tri[0]]), project_to_face(face, m.positions[tri[1]]),
          project_to_face(face, m.positions[tri[2]])};
}

// Overlapping pairs inside one cube-face bucket. `members` are triangle ids;
// the result holds, for each member slot, the slots of members overlapping it.
std::vector<std::vector<std::uint32_t>> bucket_overlaps(const std::vector<Triangle2>& proj,
                                                        const std::vector<std::uint32_t>& members,
                                                        double slack) {
  const std::size_t m = members.size();
  std::vector<Vec2> center(m);
  std::vector<double> radius(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Triangle2& t = proj[members[i]];
    const Vec2 c = (t[0] + t[1] + t[2]) * (1.0 / 3.0);
    center[i] = c;
    radius[i] = std::max({length(t[0] - c), length(t[1] - c), length(t[2] - c)});
  }

  std::vector<std::vector<std::uint32_t>> forward(m);
  const bool brute = !std::isfinite(slack) || m < 32;
  if (brute) {
    parallel_for_each(0, m, 16, [&](std::size_t i) {
      for (std::size_t j = i + 1; j < m; ++j)
        if (triangles_overlap_interior(proj[members[i]], proj[members[j]]))
          forward[i].push_back(static_cast<std::uint32_t>(j));
    });
  } else {
    // Uniform grid over the inflated disc bounds.
    double lo_x = std::numeric_limits<double>::max(), lo_y = lo_x;
    double hi_x = -lo_x, hi_y = -lo_x, mean_r = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const double r = slack * radius[i];
      lo_x = std::min(lo_x, center[i].x - r);
      lo_y = std::min(lo_y, center[i].y - r);
      hi_x = std::max(hi_x, center[i].x + r);
      hi_y = std::max(hi_y, center[i].y + r);
      mean_r += radius[i];
    }
    mean_r /= static_cast<double>(m);
    double cell = std::max(2.0 * slack * mean_r, 1e-300);
    const double span = std::max(hi_x - lo_x, hi_y - lo_y);
    constexpr double kMaxCellsPerAxis = 2048;
    cell = std::max(cell, span / kMaxCellsPerAxis);
    const int gx = std::max(1, static_cast<int>(std::ceil((hi_x - lo_x) / cell)) + 1);
    const int gy = std::max(1, static_cast<int>(std::ceil((hi_y - lo_y) / cell)) + 1);
    auto cell_of = [&](double v, double lo, int g) {
      return std::clamp(static_cast<int>(std::floor((v - lo) / cell)), 0, g - 1);
    };
    std::vector<std::array<int, 4>> range(m);
    std::vector<std::size_t> count(static_cast<std::size_t>(gx) * gy + 1, 0);
    for (std::size_t i = 0; i < m; ++i) {
      const double r = slack * radius[i];
      auto& rg = range[i];
      rg = {cell_of(center[i].x - r, lo_x, gx), cell_of(center[i].y - r, lo_y, gy),
            cell_of(center[i].x + r, lo_x, gx), cell_of(center[i].y + r, lo_y, gy)};
      for (int y = rg[1]; y <= rg[3]; ++y)
        for (int x = rg[0]; x <= rg[2]; ++x) ++count[static_cast<std::size_t>(y) * gx + x + 1];
    }
    std::partial_sum(count.begin(), count.end(), count.begin());
    std::vector<std::uint32_t> cells(count.back());
    {
      std::vector<std::size_t> fill(count.begin(), count.end() - 1);
      for (std::size_t i = 0; i < m; ++i) {
        const auto& rg = range[i];
        for (int y = rg[1]; y <= rg[3]; ++y)
          for (int x = rg[0]; x <= rg[2]; ++x)
            cells[fill[static_cast<std::size_t>(y) * gx + x]++] = static_cast<std::uint32_t>(i);
      }
    }
    parallel_for(0, m, 256, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        const auto& ri = range[i];
        for (int y = ri[1]; y <= ri[3]; ++y)
          for (int x = ri[0]; x <= ri[2]; ++x) {
            const std::size_t c = static_cast<std::size_t>(y) * gx + x;
            for (std::size_t k = count[c]; k < count[c + 1]; ++k) {
              const std::uint32_t j = cells[k];
              if (j <= i) continue;
              const auto& rj = range[j];
              // Report each pair once, in the first cell both ranges share.
              if (x != std::max(ri[0], rj[0]) || y != std::max(ri[1], rj[1])) continue;
              const double reach = slack * (radius[i] + radius[j]);
              const Vec2 d = center[i] - center[j];
              if (dot(d, d) > reach * reach) continue;
              if (triangles_overlap_interior(proj[members[i]], proj[members[j]]))
                forward[i].push_back(j);
            }
          }
        std::sort(forward[i].begin(), forward[i].end());
      }
    });
  }

  std::vector<std::vector<std::uint32_t>> adj(m);
  for (std::size_t i = 0; i < m; ++i)
    for (auto j : forward[i]) {
      adj[i].push_back(j);
      adj[j].push_back(static_cast<std::uint32_t>(i));
    }
  return adj;
}

}  // namespace

std::vector<Layer> detect_occlusions(const IndexedMesh& aligned, std::span<const CubeFace> faces,
                                     const UnwrapConfig& config) {
  const std::size_t nt = aligned.indices.size();
  if (faces.size() != nt) throw ValidationError("detect_occlusions: one cube face per triangle required");
  std::vector<Layer> layers(nt, Layer::Visible);
  std::vector<Triangle2> proj(nt);
  std::vector<double> depth(nt);
  std::vector<std::uint8_t> eligible(nt, 0);
  parallel_for_each(0, nt, 2048, [&](std::size_t t) {
    const CubeFace f = faces[t];
    proj[t] = projected_triangle(aligned, t, f);
    const Tri& tri = aligned.indices[t];
    const Vec3 centroid =
        (aligned.positions[tri[0]] + aligned.positions[tri[1]] + aligned.positions[tri[2]]) / 3.0;
    depth[t] = face_depth(f, centroid);
    bool ok = orient2d(proj[t][0], proj[t][1], proj[t][2]) > 0;
    if (ok && config.normal_threshold > 0) {
      const Vec3 n = normalize(face_normal_area(aligned, t));
      ok = dot(n, face_axis(f)) >= config.normal_threshold;
    }
    eligible[t] = ok ? 1 : 0;
  });

  std::array<std::vector<std::uint32_t>, 6> buckets;
  for (std::size_t t = 0; t < nt; ++t) {
    if (!eligible[t]) {
      layers[t] = Layer::Remainder;
      continue;
    }
    buckets[static_cast<int>(faces[t])].push_back(static_cast<std::uint32_t>(t));
  }

  for (const auto& members : buckets) {
    if (members.empty()) continue;
    const auto adj = bucket_overlaps(proj, members, config.proximity_slack);
    std::vector<std::uint32_t> order(members.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      const double da = depth[members[a]], db = depth[members[b]];
      return da != db ? da < db : members[a] < members[b];
    });
    std::vector<std::uint32_t> rank(members.size());
    for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = static_cast<std::uint32_t>(r);
    std::vector<int> level(members.size(), 0);
    for (std::uint32_t slot : order) {
      int lvl = 0;
      for (auto other : adj[slot])
        if (rank[other] < rank[slot]) lvl = std::max(lvl, level[other] + 1);
      level[slot] = std::min(lvl, 2);
      layers[members[slot]] = static_cast<Layer>(level[slot]);
    }
  }
  return layers;
}

// ---------------------------------------------------------------------------
// Atlas layout

namespace {

struct Island {
  Layer layer;
  CubeFace face;
  std::vector<std::uint32_t> triangles;
  double umin, vmin, umax, vmax;
  double width() const { return umax - umin; }
  double height() const { return vmax - vmin; }
};

struct UnionFind {
  std::vector<std::uint32_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent[a] = b;  // smaller index becomes the root
  }
};

std::vector<Island> build_islands(const IndexedMesh& mesh, const EdgeAdjacency& adj,
                                  std::span<const Layer> layers, std::span<const CubeFace> faces,
                                  const std::vector<Vec2>& proj_corners, bool split_connected) {
  const std::size_t nt = mesh.indices.size();
  UnionFind uf(nt);
  if (split_connected) {
    for (std::size_t t = 0; t < nt; ++t) {
      if (layers[t] == Layer::Remainder) continue;
      for (int e = 0; e < 3; ++e)
        for (auto u : adj.around(t, e))
          if (u > t && layers[u] == layers[t] && faces[u] == faces[t])
            uf.unite(static_cast<std::uint32_t>(t), u);
    }
  } else {
    // One island per (layer, face); the first triangle of each is the root.
    std::array<std::int64_t, 12> first;
    first.fill(-1);
    for (std::size_t t = 0; t < nt; ++t) {
      if (layers[t] == Layer::Remainder) continue;
      const std::size_t key = static_cast<std::size_t>(layers[t]) * 6 + static_cast<std::size_t>(faces[t]);
      if (first[key] < 0) first[key] = static_cast<std::int64_t>(t);
      else uf.unite(static_cast<std::uint32_t>(first[key]), static_cast<std::uint32_t>(t));
    }
  }
  std::vector<std::int64_t> island_of(nt, -1);
  std::vector<Island> islands;
  for (std::size_t t = 0; t < nt; ++t) {
    if (layers[t] == Layer::Remainder) continue;
    const std::uint32_t root = uf.find(static_cast<std::uint32_t>(t));
    if (island_of[root] < 0) {
      island_of[root] = static_cast<std::int64_t>(islands.size());
      islands.push_back({layers[t], faces[t], {}, std::numeric_limits<double>::max(),
                         std::numeric_limits<double>::max(), -std::numeric_limits<double>::max(),
                         -std::numeric_limits<double>::max()});
    }
    Island& isl = islands[static_cast<std::size_t>(island_of[root])];
    isl.triangles.push_back(static_cast<std::uint32_t>(t));
    for (int c = 0; c < 3; ++c) {
      const Vec2 p = proj_corners[t * 3 + c];
      isl.umin = std::min(isl.umin, p.x);
      isl.vmin = std::min(isl.vmin, p.y);
      isl.umax = std::max(isl.umax, p.x);
      isl.vmax = std::max(isl.vmax, p.y);
    }
  }
  return islands;
}

// Shelf packing from the region's top-left corner. Writes each island's
// bottom-left atlas corner on success.
bool shelf_pack(const std::vector<const Island*>& order, double scale, double pad, const Rect& region,
                std::vector<Vec2>* corners) {
  const double W = region.width(), H = region.height();
  double x = 0, y = 0, row = 0;
  if (corners) corners->resize(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    const double w = order[k]->width() * scale + pad;
    const double h = order[k]->height() * scale + pad;
    if (w > W) return false;
    if (x + w > W) {
      y += row;
      x = 0;
      row = 0;
    }
    if (corners)
      (*corners)[k] = {region.x0 + x + 0.5 * pad, region.y1 - y - 0.5 * pad - order[k]->height() * scale};
    x += w;
    row = std::max(row, h);
  }
  return y + row <= H;
}

struct RegionPacking {
  double scale = 0;
  double pad = 0;
  std::vector<const Island*> order;
  std::vector<Vec2> corners;
};

RegionPacking pack_region(const std::vector<Island>& islands, Layer layer, const Rect& region,
                          double padding) {
  RegionPacking out;
  for (const Island& isl : islands)
    if (isl.layer == layer) out.order.push_back(&isl);
  if (out.order.empty()) return out;
  std::sort(out.order.begin(), out.order.end(), [](const Island* a, const Island* b) {
    if (a->height() != b->height()) return a->height() > b->height();
    if (a->width() != b->width()) return a->width() > b->width();
    return a->triangles.front() < b->triangles.front();
  });

  double pad = padding;
  while (!shelf_pack(out.order, 0.0, pad, region, nullptr)) {
    pad *= 0.5;
    if (pad < 1e-9)
      throw GeometryError("atlas region overflow: " + std::to_string(out.order.size()) +
                          " islands do not fit the " + std::string(to_string(layer)) + " region");
  }
  double max_w = 0, max_h = 0;
  for (const Island* isl : out.order) {
    max_w = std::max(max_w, isl->width());
    max_h = std::max(max_h, isl->height());
  }
  double lo = 0;
  double hi = std::min(region.width() / max_w, region.height() / max_h);
  if (shelf_pack(out.order, hi, pad, region, nullptr)) {
    lo = hi;
  } else {
    for (int it = 0; it < 48; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (shelf_pack(out.order, mid, pad, region, nullptr)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
  }
  out.scale = lo;
  out.pad = pad;
  shelf_pack(out.order, lo, pad, region, &out.corners);
  return out;
}

// Shape-preserving 2D embedding of a 3D triangle with positive orientation;
// the unit right triangle for (near-)degenerate input.
std::array<Vec2, 3> local_embedding(const IndexedMesh& mesh, std::size_t t) {
  const Tri& tri = mesh.indices[t];
  const Vec3 a = mesh.positions[tri[0]], b = mesh.positions[tri[1]], c = mesh.positions[tri[2]];
  const double ab = length(b - a);
  const std::array<Vec2, 3> fallback = {Vec2{0, 0}, Vec2{1, 0}, Vec2{0, 1}};
  if (!(ab > 0)) return fallback;
  const Vec3 e1 = (b - a) / ab;
  const Vec3 ac = c - a;
  const double cx = dot(ac, e1);
  const double cy = length(cross(e1, ac));
  const double extent = std::max({ab, std::fabs(cx), std::fabs(cx - ab)});
  if (!(cy > 1e-3 * extent)) return fallback;
  return {Vec2{0, 0}, Vec2{ab, 0}, Vec2{cx, cy}};
}

void place_remainder(const IndexedMesh& mesh, const std::vector<std::uint32_t>& tris, const Rect& region,
                     const UnwrapConfig& config, std::vector<Vec2>& uvs) {
  if (tris.empty()) return;
  const std::size_t n = tris.size();
  auto g = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  while (g * g < n) ++g;
  const double cw = region.width() / static_cast<double>(g);
  const double ch = region.height() / static_cast<double>(g);
  if (std::min(cw, ch) < config.min_remainder_cell)
    throw GeometryError("remainder grid overflow: " + std::to_string(n) + " triangles need " +
                        std::to_string(g) + "x" + std::to_string(g) + " cells smaller than " +
                        std::to_string(config.min_remainder_cell));
  const double inset = std::min(0.5 * config.island_padding, 0.1 * std::min(cw, ch));
  parallel_for_each(0, n, 1024, [&](std::size_t k) {
    const std::size_t t = tris[k];
    const std::size_t col = k % g, row = k / g;
    const double x0 = region.x0 + cw * static_cast<double>(col) + inset;
    const double y0 = region.y1 - ch * static_cast<double>(row + 1) + inset;
    const double aw = cw - 2 * inset, ah = ch - 2 * inset;
    auto place = [&](const std::array<Vec2, 3>& local) {
      double minx = std::min({local[0].x, local[1].x, local[2].x});
      double maxx = std::max({local[0].x, local[1].x, local[2].x});
      double maxy = std::max({local[0].y, local[1].y, local[2].y});
      const double s = std::min(aw / (maxx - minx), ah / maxy);
      for (int c = 0; c < 3; ++c)
        uvs[t * 3 + c] = {x0 + (local[c].x - minx) * s, y0 + local[c].y * s};
    };
    place(local_embedding(mesh, t));
    if (!(orient2d(uvs[t * 3], uvs[t * 3 + 1], uvs[t * 3 + 2]) > 0))
      place({Vec2{0, 0}, Vec2{1, 0}, Vec2{0, 1}});
  });
}

}  // namespace

UvLayout layout_atlas(const IndexedMesh& aligned, std::span<const Layer> layers_in,
                      std::span<const CubeFace> faces, const UnwrapConfig& config) {
  validate(config);
  const std::size_t nt = aligned.indices.size();
  if (layers_in.size() != nt || faces.size() != nt)
    throw ValidationError("layout_atlas: one layer and one cube face per triangle required");

  UvLayout layout;
  layout.triangle_layer.assign(layers_in.begin(), layers_in.end());
  layout.triangle_cube_face.assign(faces.begin(), faces.end());
  layout.corner_uvs.assign(nt * 3, Vec2{});

  std::vector<Vec2> proj(nt * 3);
  parallel_for_each(0, nt, 4096, [&](std::size_t t) {
    for (int c = 0; c < 3; ++c)
      proj[t * 3 + c] = project_to_face(faces[t], aligned.positions[aligned.indices[t][c]]);
  });
  const EdgeAdjacency adj = build_edge_adjacency(aligned);

  std::vector<double> depth(nt);
  parallel_for_each(0, nt, 4096, [&](std::size_t t) {
    const Tri& tri = aligned.indices[t];
    depth[t] = face_depth(faces[t], (aligned.positions[tri[0]] + aligned.positions[tri[1]] +
                                     aligned.positions[tri[2]]) / 3.0);
  });

  // Placement can round a sliver to zero uv area, or push two triangles that
  // merely touched in projection into each other. The offending (farther)
  // triangles go to the remainder grid and the islands are repacked.
  for (int attempt = 0;; ++attempt) {
    const std::vector<Island> islands =
        build_islands(aligned, adj, layout.triangle_layer, faces, proj, config.split_connected_islands);
    layout.diagnostics.islands = islands.size();
    const RegionPacking packs[2] = {
        pack_region(islands, Layer::Visible, config.visible_region, config.island_padding),
        pack_region(islands, Layer::FirstOcclusion, config.first_occlusion_region,
                    config.island_padding)};
    layout.diagnostics.visible_scale = packs[0].scale;
    layout.diagnostics.first_occlusion_scale = packs[1].scale;
    for (const RegionPacking& pack : packs) {
      parallel_for_each(0, pack.order.size(), 1, [&](std::size_t k) {
        const Island& isl = *pack.order[k];
        const Vec2 corner = pack.corners[k];
        for (auto t : isl.triangles)
          for (int c = 0; c < 3; ++c) {
            const Vec2 p = proj[t * 3 + c];
            layout.corner_uvs[t * 3 + c] = {corner.x + (p.x - isl.umin) * pack.scale,
                                            corner.y + (p.y - isl.vmin) * pack.scale};
          }
      });
    }
    std::vector<std::uint8_t> bad(nt, 0);
    parallel_for_each(0, nt, 4096, [&](std::size_t t) {
      if (layout.triangle_layer[t] == Layer::Remainder) return;
      const auto* uv = &layout.corner_uvs[t * 3];
      if (!(orient2d(uv[0], uv[1], uv[2]) > 0)) bad[t] = 1;
    });
    std::size_t demoted = 0;
    for (std::size_t t = 0; t < nt; ++t)
      if (bad[t]) {
        layout.triangle_layer[t] = Layer::Remainder;
        ++demoted;
      }
    layout.diagnostics.demoted_slivers += demoted;
    if (demoted == 0) {
      std::vector<Triangle2> placed(nt);
      parallel_for_each(0, nt, 4096, [&](std::size_t t) {
        placed[t] = {layout.corner_uvs[t * 3], layout.corner_uvs[t * 3 + 1], layout.corner_uvs[t * 3 + 2]};
      });
      for (const Island& isl : islands) {
        const auto hits = bucket_overlaps(placed, isl.triangles, config.proximity_slack);
        for (std::size_t i = 0; i < hits.size(); ++i)
          for (auto j : hits[i]) {
            const std::uint32_t a = isl.triangles[i], b = isl.triangles[j];
            const bool a_farther = depth[a] != depth[b] ? depth[a] > depth[b] : a > b;
            bad[a_farther ? a : b] = 1;
          }
      }
      for (std::size_t t = 0; t < nt; ++t)
        if (bad[t]) {
          layout.triangle_layer[t] = Layer::Remainder;
          ++demoted;
        }
      layout.diagnostics.demoted_overlaps += demoted;
    }
    if (demoted == 0) break;
    if (attempt > 8) throw GeometryError("layout_atlas: island placement did not stabilize");
  }

  std::vector<std::uint32_t> remainder;
  for (std::size_t t = 0; t < nt; ++t)
    if (layout.triangle_layer[t] == Layer::Remainder) remainder.push_back(static_cast<std::uint32_t>(t));
  place_remainder(aligned, remainder, config.remainder_region, config, layout.corner_uvs);

  for (Vec2& uv : layout.corner_uvs) {
    uv.x = std::clamp(uv.x, 0.0, 1.0);
    uv.y = std::clamp(uv.y, 0.0, 1.0);
  }
  for (Layer l : layout.triangle_layer) {
    if (l == Layer::Visible) ++layout.diagnostics.visible;
    if (l == Layer::FirstOcclusion) ++layout.diagnostics.first_occlusion;
    if (l == Layer::Remainder) ++layout.diagnostics.remainder;
  }
  return layout;
}

UvLayout unwrap(const IndexedMesh& mesh, const UnwrapConfig& config) {
  validate(config);
  if (mesh.indices.empty()) throw ValidationError("unwrap: mesh has no triangles");
  const Alignment aligned = align_dominant_axes(mesh);
  const std::vector<CubeFace> faces = assign_cube_faces(aligned.mesh);
  const std::vector<Layer> layers = detect_occlusions(aligned.mesh, faces, config);
  UvLayout layout = layout_atlas(aligned.mesh, layers, faces, config);
  layout.alignment_rotation = aligned.rotation;
  layout.diagnostics.isotropic_alignment = aligned.isotropic;
  return layout;
}

IndexedMesh with_uvs(IndexedMesh mesh, const UvLayout& layout) {
  if (layout.corner_uvs.size() != mesh.indices.size() * 3)
    throw ValidationError("with_uvs: layout does not match the mesh's triangle count");
  mesh.corner_uvs = layout.corner_uvs;
  return mesh;
}

void write_layout_svg(std::ostream& out, const UvLayout& layout, const UnwrapConfig& config,
                      int size_px) {
  const double s = size_px;
  auto X = [&](double u) { return u * s; };
  auto Y = [&](double v) { return (1.0 - v) * s; };
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size_px << "\" height=\"" << size_px
      << "\" viewBox=\"0 0 " << size_px << ' ' << size_px << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const Rect* regions[] = {&config.visible_region, &config.first_occlusion_region,
                           &config.remainder_region};
  for (const Rect* r : regions)
    out << "<rect x=\"" << X(r->x0) << "\" y=\"" << Y(r->y1) << "\" width=\"" << r->width() * s
        << "\" height=\"" << r->height() * s
        << "\" fill=\"none\" stroke=\"#888\" stroke-dasharray=\"6,4\"/>\n";
  static const char* colors[] = {"#2a9d3f", "#e07b00", "#2f5fd0"};
  for (int l = 0; l < 3; ++l) {
    out << "<g fill=\"none\" stroke=\"" << colors[l] << "\" stroke-width=\"0.5\">\n";
    for (std::size_t t = 0; t < layout.num_triangles(); ++t) {
      if (static_cast<int>(layout.triangle_layer[t]) != l) continue;
      const Vec2* uv = &layout.corner_uvs[t * 3];
      out << "<polygon points=\"" << X(uv[0].x) << ',' << Y(uv[0].y) << ' ' << X(uv[1].x) << ','
          << Y(uv[1].y) << ' ' << X(uv[2].x) << ',' << Y(uv[2].y) << "\"/>\n";
    }
    out << "</g>\n";
  }
  out << "</svg>\n";
}

}  // namespace meshfinish
