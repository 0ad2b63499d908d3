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

#include "meshfinish/tetra.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>

#include "json.hpp"

#include "meshfinish/error.hpp"
#include "meshfinish/parallel.hpp"

namespace meshfinish {

Vec3 DensityGrid::node_position(int i, int j, int k) const {
  const Vec3 ext = bounds.max - bounds.min;
  return {bounds.min.x + ext.x * (static_cast<double>(i) / (resolution[0] - 1)),
          bounds.min.y + ext.y * (static_cast<double>(j) / (resolution[1] - 1)),
          bounds.min.z + ext.z * (static_cast<double>(k) / (resolution[2] - 1))};
}

Vec3 DensityGrid::spacing() const {
  const Vec3 ext = bounds.max - bounds.min;
  return {ext.x / (resolution[0] - 1), ext.y / (resolution[1] - 1), ext.z / (resolution[2] - 1)};
}

double DensityGrid::cell_size() const {
  const Vec3 s = spacing();
  return std::min({s.x, s.y, s.z});
}

double DensityGrid::cell_diagonal() const { return length(spacing()); }

void validate(const DensityGrid& grid) {
  for (int r : grid.resolution)
    if (r < 2) throw ValidationError("density grid needs at least 2 nodes per axis");
  const std::size_t expected = static_cast<std::size_t>(grid.resolution[0]) * grid.resolution[1] *
                               grid.resolution[2];
  if (grid.values.size() != expected)
    throw ValidationError("density grid has " + std::to_string(grid.values.size()) +
                          " values, expected " + std::to_string(expected));
  for (int a = 0; a < 3; ++a)
    if (!(grid.bounds.max[a] > grid.bounds.min[a]))
      throw ValidationError("density grid bounds are empty");
  for (double v : grid.values)
    if (!std::isfinite(v)) throw ValidationError("density grid contains a non-finite value");
}

namespace {

// Cube corner c has offset (c & 1, (c >> 1) & 1, (c >> 2) & 1). Lattice
// edges are (lower corner, direction bitmask) with direction in 1..7.
constexpr int kDirections = 7;

struct TetTriangle {
  // Each triangle vertex is a cube-corner pair (lo, hi) with lo a subset of hi.
  std::array<std::array<std::uint8_t, 2>, 3> edges;
};

struct TetCase {
  std::uint8_t count = 0;
  std::array<TetTriangle, 2> tris{};
};

// Six tetrahedra around the main diagonal, one per axis permutation.
constexpr std::array<std::array<std::uint8_t, 4>, 6> kTets = {{
    {0, 1, 3, 7},
    {0, 1, 5, 7},
    {0, 2, 3, 7},
    {0, 2, 6, 7},
    {0, 4, 5, 7},
    {0, 4, 6, 7},
}};

Vec3 corner_offset(int c) { return {double(c & 1), double((c >> 1) & 1), double((c >> 2) & 1)}; }

std::array<std::uint8_t, 2> edge_of(std::uint8_t a, std::uint8_t b) {
  // Corners on a Kuhn edge are nested bitmasks; the smaller mask is the
  // lower lattice node.
  return a < b ? std::array<std::uint8_t, 2>{a, b} : std::array<std::uint8_t, 2>{b, a};
}

Vec3 edge_midpoint(const std::array<std::uint8_t, 2>& e) {
  return (corner_offset(e[0]) + corner_offset(e[1])) * 0.5;
}

// Orients `t` so its normal points from the negative corners to the
// positive ones. Works on edge midpoints: interpolated vertices stay on the
// same edges, so the orientation carries over.
void orient(TetTriangle& t, const std::array<std::uint8_t, 4>& tet, int mask) {
  Vec3 pos{}, neg{};
  int np = 0, nn = 0;
  for (int k = 0; k < 4; ++k) {
    if (mask >> k & 1) {
      pos += corner_offset(tet[k]);
      ++np;
    } else {
      neg += corner_offset(tet[k]);
      ++nn;
    }
  }
  const Vec3 dir = pos / np - neg / nn;
  const Vec3 a = edge_midpoint(t.edges[0]), b = edge_midpoint(t.edges[1]), c = edge_midpoint(t.edges[2]);
  if (dot(cross(b - a, c - a), dir) < 0) std::swap(t.edges[1], t.edges[2]);
}

using CaseTable = std::array<std::array<TetCase, 16>, 6>;

CaseTable build_case_table() {
  CaseTable table{};
  for (int ti = 0; ti < 6; ++ti) {
    const auto& tet = kTets[ti];
    for (int mask = 1; mask < 15; ++mask) {
      TetCase& tc = table[ti][mask];
      const int pop = std::popcount(static_cast<unsigned>(mask));
      if (pop == 1 || pop == 3) {
        // One corner separated from the other three.
        const bool lone_positive = pop == 1;
        int lone = 0;
        for (int k = 0; k < 4; ++k)
          if (((mask >> k) & 1) == (lone_positive ? 1 : 0)) lone = k;
        TetTriangle t{};
        int slot = 0;
        for (int k = 0; k < 4; ++k)
          if (k != lone) t.edges[slot++] = edge_of(tet[lone], tet[k]);
        orient(t, tet, mask);
        tc.count = 1;
        tc.tris[0] = t;
      } else {
        std::array<int, 2> p{}, n{};
        int ip = 0, in = 0;
        for (int k = 0; k < 4; ++k) {
          if (mask >> k & 1) {
            p[ip++] = tet[k];
          } else {
            n[in++] = tet[k];
          }
        }
        // Quad cycle p0n0 - p0n1 - p1n1 - p1n0.
        std::array<std::array<std::uint8_t, 2>, 4> cycle = {
            edge_of(p[0], n[0]), edge_of(p[0], n[1]), edge_of(p[1], n[1]), edge_of(p[1], n[0])};
        // Canonical start and direction so that the complementary mask
        // picks the same diagonal and triangle order.
        const int start = static_cast<int>(std::min_element(cycle.begin(), cycle.end()) - cycle.begin());
        std::array<std::array<std::uint8_t, 2>, 4> c{};
        for (int k = 0; k < 4; ++k) c[k] = cycle[(start + k) % 4];
        if (c[3] < c[1]) std::swap(c[1], c[3]);
        TetTriangle t0{{c[0], c[1], c[2]}}, t1{{c[0], c[2], c[3]}};
        orient(t0, tet, mask);
        orient(t1, tet, mask);
        tc.count = 2;
        tc.tris = {t0, t1};
      }
    }
  }
  return table;
}

const CaseTable& case_table() {
  static const CaseTable table = build_case_table();
  return table;
}

constexpr std::uint32_t kNoVertex = std::numeric_limits<std::uint32_t>::max();

}  // namespace

IndexedMesh marching_tetrahedra(const DensityGrid& grid) {
  validate(grid);
  const int nx = grid.resolution[0], ny = grid.resolution[1], nz = grid.resolution[2];
  const std::size_t nodes = grid.values.size();
  const std::size_t slice = static_cast<std::size_t>(nx) * ny;

  auto positive = [&](std::size_t n) { return grid.values[n] >= 0.0; };
  auto dir_step = [&](int d) {
    return static_cast<std::ptrdiff_t>((d & 1) + ((d >> 1) & 1) * nx + ((d >> 2) & 1) * slice);
  };

  // Pass 1: flag sign-changing lattice edges, counted per z slice.
  std::vector<std::uint32_t> edge_vertex(nodes * kDirections, kNoVertex);
  std::vector<std::size_t> slice_counts(nz, 0);
  parallel_for(0, nz, 1, [&](std::size_t kb, std::size_t ke) {
    for (std::size_t k = kb; k < ke; ++k) {
      std::size_t count = 0;
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
          const std::size_t n = grid.index(i, j, static_cast<int>(k));
          for (int d = 1; d <= kDirections; ++d) {
            if (i + (d & 1) >= nx || j + ((d >> 1) & 1) >= ny ||
                static_cast<int>(k) + ((d >> 2) & 1) >= nz)
              continue;
            if (positive(n) != positive(n + dir_step(d))) {
              edge_vertex[n * kDirections + (d - 1)] = 0;
              ++count;
            }
          }
        }
      slice_counts[k] = count;
    }
  });
  std::vector<std::size_t> slice_first(nz + 1, 0);
  std::partial_sum(slice_counts.begin(), slice_counts.end(), slice_first.begin() + 1);
  const std::size_t num_vertices = slice_first.back();
  if (num_vertices == 0) throw GeometryError("empty isosurface: no sign change in the grid");

  IndexedMesh mesh;
  mesh.positions.resize(num_vertices);
  parallel_for(0, nz, 1, [&](std::size_t kb, std::size_t ke) {
    for (std::size_t k = kb; k < ke; ++k) {
      auto next = static_cast<std::uint32_t>(slice_first[k]);
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
          const std::size_t n = grid.index(i, j, static_cast<int>(k));
          for (int d = 1; d <= kDirections; ++d) {
            std::uint32_t& slot = edge_vertex[n * kDirections + (d - 1)];
            if (slot == kNoVertex) continue;
            slot = next;
            const double a = grid.values[n];
            const double b = grid.values[n + dir_step(d)];
            // Always interpolate from the lower node so that negating the
            // grid reproduces the same positions bit for bit.
            const double t = a / (a - b);
            const Vec3 pa = grid.node_position(i, j, static_cast<int>(k));
            const Vec3 pb = grid.node_position(i + (d & 1), j + ((d >> 1) & 1),
                                               static_cast<int>(k) + ((d >> 2) & 1));
            mesh.positions[next] = pa + (pb - pa) * t;
            ++next;
          }
        }
    }
  });

  // Pass 2: triangles per cube slab, concatenated in cube order.
  const CaseTable& table = case_table();
  std::vector<std::vector<Tri>> slab_tris(nz - 1);
  parallel_for(0, nz - 1, 1, [&](std::size_t kb, std::size_t ke) {
    for (std::size_t k = kb; k < ke; ++k) {
      auto& out = slab_tris[k];
      for (int j = 0; j + 1 < ny; ++j)
        for (int i = 0; i + 1 < nx; ++i) {
          const std::size_t base = grid.index(i, j, static_cast<int>(k));
          std::array<std::size_t, 8> corner{};
          int cube_mask = 0;
          for (int c = 0; c < 8; ++c) {
            corner[c] = base + dir_step(c);
            if (positive(corner[c])) cube_mask |= 1 << c;
          }
          if (cube_mask == 0 || cube_mask == 255) continue;
          for (int ti = 0; ti < 6; ++ti) {
            int mask = 0;
            for (int v = 0; v < 4; ++v)
              if (cube_mask >> kTets[ti][v] & 1) mask |= 1 << v;
            const TetCase& tc = table[ti][mask];
            for (int m = 0; m < tc.count; ++m) {
              Tri tri{};
              for (int v = 0; v < 3; ++v) {
                const auto& e = tc.tris[m].edges[v];
                const int dir = e[0] ^ e[1];
                tri[v] = edge_vertex[corner[e[0]] * kDirections + (dir - 1)];
              }
              out.push_back(tri);
            }
          }
        }
    }
  });
  std::size_t total = 0;
  for (const auto& s : slab_tris) total += s.size();
  mesh.indices.reserve(total);
  for (const auto& s : slab_tris) mesh.indices.insert(mesh.indices.end(), s.begin(), s.end());
  return mesh;
}

IndexedMesh apply_offsets(IndexedMesh mesh, const OffsetField& field, double cell_size,
                          double max_fraction) {
  if (!(max_fraction > 0 && max_fraction <= 0.5))
    throw ValidationError("apply_offsets: max_fraction must lie in (0, 0.5]");
  if (!(cell_size > 0)) throw ValidationError("apply_offsets: cell size must be positive");
  const double limit = max_fraction * cell_size;
  parallel_for_each(0, mesh.positions.size(), 4096, [&](std::size_t v) {
    Vec3 o = field(mesh.positions[v]);
    const double l = length(o);
    if (l > limit) o = o * (limit / l);
    mesh.positions[v] += o;
  });
  mesh.vertex_normals.clear();
  return mesh;
}

DensityGrid read_grid(const std::filesystem::path& raw, const std::filesystem::path& sidecar) {
  std::ifstream js(sidecar);
  if (!js) throw IoError("cannot open " + sidecar.string());
  nlohmann::json meta;
  try {
    js >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("grid sidecar: " + std::string(e.what()));
  }
  DensityGrid grid;
  try {
    const auto res = meta.at("resolution");
    for (int a = 0; a < 3; ++a) grid.resolution[a] = res.at(a).get<int>();
    const auto& b = meta.at("bounds");
    for (int a = 0; a < 3; ++a) {
      grid.bounds.min[a] = b.at("min").at(a).get<double>();
      grid.bounds.max[a] = b.at("max").at(a).get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("grid sidecar: " + std::string(e.what()));
  }
  const std::string dtype = meta.value("dtype", "float32");
  if (dtype != "float32" && dtype != "float64") throw ParseError("grid sidecar: unknown dtype " + dtype);
  for (int r : grid.resolution)
    if (r < 2) throw ValidationError("density grid needs at least 2 nodes per axis");
  const std::size_t count = static_cast<std::size_t>(grid.resolution[0]) * grid.resolution[1] *
                            grid.resolution[2];
  const std::size_t elem = dtype == "float64" ? 8 : 4;
  std::ifstream in(raw, std::ios::binary);
  if (!in) throw IoError("cannot open " + raw.string());
  std::vector<char> bytes(count * elem);
  if (!in.read(bytes.data(), static_cast<std::streamsize>(bytes.size())))
    throw ParseError("grid raw file is shorter than resolution implies");
  grid.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (elem == 8) {
      double v;
      std::memcpy(&v, bytes.data() + i * 8, 8);
      grid.values[i] = v;
    } else {
      float v;
      std::memcpy(&v, bytes.data() + i * 4, 4);
      grid.values[i] = v;
    }
  }
  validate(grid);
  return grid;
}

void write_grid(const DensityGrid& grid, const std::filesystem::path& raw,
                const std::filesystem::path& sidecar, bool float64) {
  validate(grid);
  std::ofstream out(raw, std::ios::binary);
  if (!out) throw IoError("cannot write " + raw.string());
  for (double v : grid.values) {
    if (float64) {
      out.write(reinterpret_cast<const char*>(&v), 8);
    } else {
      const float f = static_cast<float>(v);
      out.write(reinterpret_cast<const char*>(&f), 4);
    }
  }
  nlohmann::json meta = {
      {"resolution", grid.resolution},
      {"bounds",
       {{"min", {grid.bounds.min.x, grid.bounds.min.y, grid.bounds.min.z}},
        {"max", {grid.bounds.max.x, grid.bounds.max.y, grid.bounds.max.z}}}},
      {"dtype", float64 ? "float64" : "float32"}};
  std::ofstream js(sidecar);
  if (!js) throw IoError("cannot write " + sidecar.string());
  js << meta.dump(2) << '\n';
}

}  // namespace meshfinish
