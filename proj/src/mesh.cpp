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

#include "meshfinish/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "meshfinish/error.hpp"

namespace meshfinish {

void validate(const IndexedMesh& mesh) {
  const std::size_t nv = mesh.positions.size();
  for (std::size_t v = 0; v < nv; ++v) {
    const Vec3& p = mesh.positions[v];
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
      throw ValidationError("vertex " + std::to_string(v) + " has a non-finite position");
  }
  for (std::size_t t = 0; t < mesh.indices.size(); ++t) {
    const Tri& tri = mesh.indices[t];
    for (auto i : tri)
      if (i >= nv)
        throw ValidationError("triangle " + std::to_string(t) + " references vertex " +
                              std::to_string(i) + " out of " + std::to_string(nv));
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
      throw ValidationError("triangle " + std::to_string(t) + " repeats a vertex id");
  }
  if (!mesh.vertex_normals.empty()) {
    if (mesh.vertex_normals.size() != nv)
      throw ValidationError("vertex normal count does not match vertex count");
    for (std::size_t v = 0; v < nv; ++v)
      if (!(std::fabs(length(mesh.vertex_normals[v]) - 1.0) <= 1e-4))
        throw ValidationError("vertex normal " + std::to_string(v) + " is not unit length");
  }
  if (!mesh.corner_uvs.empty()) {
    if (mesh.corner_uvs.size() != mesh.indices.size() * 3)
      throw ValidationError("corner uv count must be three per triangle");
    for (const Vec2& uv : mesh.corner_uvs)
      if (!(uv.x >= 0 && uv.x <= 1 && uv.y >= 0 && uv.y <= 1))
        throw ValidationError("corner uv outside [0,1]^2");
  }
}

Vec3 face_normal_area(const IndexedMesh& mesh, std::size_t tri) {
  const Tri& t = mesh.indices[tri];
  const Vec3 a = mesh.positions[t[0]], b = mesh.positions[t[1]], c = mesh.positions[t[2]];
  return cross(b - a, c - a);
}

double triangle_area(const IndexedMesh& mesh, std::size_t tri) {
  return 0.5 * length(face_normal_area(mesh, tri));
}

IndexedMesh compute_geometry_normals(IndexedMesh mesh) {
  mesh.vertex_normals.clear();
  validate(mesh);
  const std::size_t nv = mesh.positions.size();
  std::vector<Vec3> sum(nv);
  std::vector<std::uint8_t> referenced(nv, 0);
  for (std::size_t t = 0; t < mesh.indices.size(); ++t) {
    // Cross product length is twice the area, so the sum is area weighted.
    const Vec3 n = face_normal_area(mesh, t);
    for (auto v : mesh.indices[t]) {
      referenced[v] = 1;
      sum[v] += n;
    }
  }
  mesh.vertex_normals.resize(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    if (!referenced[v]) {
      mesh.vertex_normals[v] = {0, 0, 1};
      continue;
    }
    const double l = length(sum[v]);
    if (!(l > 0))
      throw GeometryError("undefined normal at vertex " + std::to_string(v) +
                          ": no incident triangle has usable area");
    mesh.vertex_normals[v] = sum[v] / l;
  }
  return mesh;
}

Vec3 slerp_normals(Vec3 a, Vec3 b, double t) {
  if (length(a + b) < 1e-6)
    throw GeometryError("ambiguous slerp plane: inputs are antipodal");
  const double theta = angle_between(a, b);
  if (theta < 1e-9) return normalize(a * (1 - t) + b * t);
  const double s = std::sin(theta);
  const Vec3 r = a * (std::sin((1 - t) * theta) / s) + b * (std::sin(t * theta) / s);
  return normalize(r);
}

EdgeAdjacency build_edge_adjacency(const IndexedMesh& mesh) {
  struct Entry {
    EdgeKey key;
    std::uint32_t slot;
  };
  const std::size_t nt = mesh.indices.size();
  std::vector<Entry> entries;
  entries.reserve(nt * 3);
  for (std::size_t t = 0; t < nt; ++t)
    for (int e = 0; e < 3; ++e)
      entries.push_back({make_edge(mesh.indices[t][e], mesh.indices[t][(e + 1) % 3]),
                         static_cast<std::uint32_t>(t * 3 + e)});
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.key != b.key ? a.key < b.key : a.slot < b.slot;
  });

  // Count neighbors per slot, then fill.
  EdgeAdjacency adj;
  adj.offsets.assign(nt * 3 + 1, 0);
  std::size_t i = 0;
  while (i < entries.size()) {
    std::size_t j = i;
    while (j < entries.size() && entries[j].key == entries[i].key) ++j;
    for (std::size_t k = i; k < j; ++k)
      adj.offsets[entries[k].slot + 1] = static_cast<std::uint32_t>(j - i - 1);
    i = j;
  }
  std::partial_sum(adj.offsets.begin(), adj.offsets.end(), adj.offsets.begin());
  adj.neighbors.resize(adj.offsets.back());
  i = 0;
  while (i < entries.size()) {
    std::size_t j = i;
    while (j < entries.size() && entries[j].key == entries[i].key) ++j;
    for (std::size_t k = i; k < j; ++k) {
      std::uint32_t out = adj.offsets[entries[k].slot];
      for (std::size_t m = i; m < j; ++m)
        if (m != k) adj.neighbors[out++] = entries[m].slot / 3;
    }
    i = j;
  }
  return adj;
}

namespace {

std::vector<EdgeKey> unique_edges(const IndexedMesh& mesh) {
  std::vector<EdgeKey> edges;
  edges.reserve(mesh.indices.size() * 3);
  for (const Tri& t : mesh.indices)
    for (int e = 0; e < 3; ++e) edges.push_back(make_edge(t[e], t[(e + 1) % 3]));
  std::sort(edges.begin(), edges.end());
  return edges;
}

}  // namespace

std::size_t count_non_manifold_or_boundary_edges(const IndexedMesh& mesh) {
  const auto edges = unique_edges(mesh);
  std::size_t bad = 0;
  for (std::size_t i = 0; i < edges.size();) {
    std::size_t j = i;
    while (j < edges.size() && edges[j] == edges[i]) ++j;
    if (j - i != 2) ++bad;
    i = j;
  }
  return bad;
}

long euler_characteristic(const IndexedMesh& mesh) {
  auto edges = unique_edges(mesh);
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return static_cast<long>(mesh.positions.size()) - static_cast<long>(edges.size()) +
         static_cast<long>(mesh.indices.size());
}

MeshQualityReport mesh_quality(const IndexedMesh& mesh, const QualityInputs& inputs) {
  validate(mesh);
  if (!(inputs.epsilon > 0)) throw ValidationError("mesh_quality: epsilon must be positive");
  const std::size_t nv = mesh.positions.size();
  const std::size_t nt = mesh.indices.size();
  MeshQualityReport report;

  std::vector<Vec3> face_unit(nt);
  std::vector<std::uint8_t> degenerate(nt, 0);
  for (std::size_t t = 0; t < nt; ++t) {
    const Vec3 n = face_normal_area(mesh, t);
    const double l = length(n);
    if (l > 0) {
      face_unit[t] = n / l;
    } else {
      degenerate[t] = 1;
      ++report.degenerate_triangles;
    }
  }

  // Uniform Laplacian over unique edge neighbors.
  {
    auto edges = unique_edges(mesh);
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    std::vector<Vec3> neighbor_sum(nv);
    std::vector<std::uint32_t> degree(nv, 0);
    for (const EdgeKey& e : edges) {
      neighbor_sum[e.lo] += mesh.positions[e.hi];
      neighbor_sum[e.hi] += mesh.positions[e.lo];
      ++degree[e.lo];
      ++degree[e.hi];
    }
    double acc = 0;
    std::size_t count = 0;
    for (std::size_t v = 0; v < nv; ++v) {
      if (degree[v] == 0) continue;
      const Vec3 delta = neighbor_sum[v] / static_cast<double>(degree[v]) - mesh.positions[v];
      acc += length_squared(delta);
      ++count;
    }
    report.laplacian = count ? acc / static_cast<double>(count) : 0.0;
  }

  // 1 - cos between normals of every pair of triangles sharing an edge.
  {
    const EdgeAdjacency adj = build_edge_adjacency(mesh);
    double acc = 0;
    std::size_t count = 0;
    for (std::size_t t = 0; t < nt; ++t) {
      if (degenerate[t]) continue;
      for (int e = 0; e < 3; ++e)
        for (auto u : adj.around(t, e)) {
          if (u <= t || degenerate[u]) continue;
          acc += 1.0 - std::clamp(dot(face_unit[t], face_unit[u]), -1.0, 1.0);
          ++count;
        }
    }
    report.normal_consistency = count ? acc / static_cast<double>(count) : 0.0;
  }

  if (inputs.offsets) {
    const auto& off = *inputs.offsets;
    if (off.size() != nv) throw ValidationError("mesh_quality: one offset per vertex required");
    double acc = 0;
    for (const Vec3& o : off) acc += length_squared(o);
    report.offset_reg = nv ? acc / static_cast<double>(nv) : 0.0;
  }

  if (inputs.predicted_normals) {
    const auto& pred = *inputs.predicted_normals;
    if (pred.size() != nv)
      throw ValidationError("mesh_quality: one predicted normal per vertex required");
    const IndexedMesh with_normals = compute_geometry_normals(mesh);
    double acc = 0;
    for (std::size_t v = 0; v < nv; ++v)
      acc += 1.0 - dot(with_normals.vertex_normals[v], pred[v]);
    report.normal_replication = nv ? acc / static_cast<double>(nv) : 0.0;
  }

  if (inputs.normal_field) {
    const Vec3 offset = Vec3{1, 1, 1} * (inputs.epsilon / std::sqrt(3.0));
    double acc = 0;
    for (const Vec3& p : mesh.positions)
      acc += length_squared(inputs.normal_field(p) - inputs.normal_field(p + offset));
    report.normal_smoothness = nv ? acc / static_cast<double>(nv) : 0.0;
  }
  return report;
}

double weighted_mesh_terms(const MeshQualityReport& r, const MetricWeights& w) {
  return w.laplacian * r.laplacian + w.normal_consistency * r.normal_consistency +
         w.offset * r.offset_reg;
}

double weighted_shading_terms(const MeshQualityReport& r, double demodulation,
                              const MetricWeights& w) {
  return w.normal_replication * r.normal_replication +
         w.normal_smoothness * r.normal_smoothness + w.demodulation * demodulation;
}

}  // namespace meshfinish
