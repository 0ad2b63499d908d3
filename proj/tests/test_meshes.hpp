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

// Small hand-built meshes shared by the unit tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "meshfinish/mesh.hpp"

namespace meshfinish::testing {

// Unit square in the XY plane, counter-clockwise seen from +Z.
inline IndexedMesh unit_quad(double z = 0, double scale = 1, Vec2 offset = {}) {
  IndexedMesh m;
  m.positions = {{offset.x, offset.y, z},
                 {offset.x + scale, offset.y, z},
                 {offset.x + scale, offset.y + scale, z},
                 {offset.x, offset.y + scale, z}};
  m.indices = {{0, 1, 2}, {0, 2, 3}};
  return m;
}

inline IndexedMesh append(IndexedMesh a, const IndexedMesh& b) {
  const auto base = static_cast<std::uint32_t>(a.positions.size());
  a.positions.insert(a.positions.end(), b.positions.begin(), b.positions.end());
  for (Tri t : b.indices) a.indices.push_back({t[0] + base, t[1] + base, t[2] + base});
  return a;
}

// Axis-aligned box centred at the origin, two outward triangles per face.
inline IndexedMesh box(Vec3 half = {0.5, 0.5, 0.5}) {
  IndexedMesh m;
  for (int i = 0; i < 8; ++i)
    m.positions.push_back({(i & 1) ? half.x : -half.x, (i & 2) ? half.y : -half.y, (i & 4) ? half.z : -half.z});
  // Quads listed counter-clockwise from outside.
  const int quads[6][4] = {{1, 3, 7, 5}, {0, 4, 6, 2}, {2, 6, 7, 3}, {0, 1, 5, 4}, {4, 5, 7, 6}, {0, 2, 3, 1}};
  for (const auto& q : quads) {
    m.indices.push_back({std::uint32_t(q[0]), std::uint32_t(q[1]), std::uint32_t(q[2])});
    m.indices.push_back({std::uint32_t(q[0]), std::uint32_t(q[2]), std::uint32_t(q[3])});
  }
  return m;
}

// Box whose faces are split into n x n quads, so seams and fill rules get
// exercised.
inline IndexedMesh subdivided_box(int n, Vec3 half = {0.5, 0.5, 0.5}) {
  IndexedMesh m;
  std::map<std::array<long, 3>, std::uint32_t> ids;
  auto vertex = [&](Vec3 p) {
    const std::array<long, 3> key = {std::lround(p.x * 1e9), std::lround(p.y * 1e9), std::lround(p.z * 1e9)};
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(m.positions.size());
    m.positions.push_back(p);
    ids.emplace(key, id);
    return id;
  };
  for (int axis = 0; axis < 3; ++axis)
    for (int sign : {1, -1}) {
      const int u = (axis + 1) % 3, v = (axis + 2) % 3;
      auto at = [&](int i, int j) {
        Vec3 p;
        p[axis] = sign * half[axis];
        p[u] = -half[u] + 2 * half[u] * i / n;
        p[v] = -half[v] + 2 * half[v] * j / n;
        return vertex(p);
      };
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          std::uint32_t a = at(i, j), b = at(i + 1, j), c = at(i + 1, j + 1), d = at(i, j + 1);
          // (u, v, axis) is right handed, so this winding faces +axis.
          if (sign > 0) {
            m.indices.push_back({a, b, c});
            m.indices.push_back({a, c, d});
          } else {
            m.indices.push_back({a, c, b});
            m.indices.push_back({a, d, c});
          }
        }
    }
  return m;
}

inline IndexedMesh regular_tetrahedron() {
  IndexedMesh m;
  m.positions = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
  m.indices = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
  return m;
}

// Subdivided icosahedron projected to the sphere of the given radius.
inline IndexedMesh icosphere(int levels, double radius = 1.0) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  IndexedMesh m;
  m.positions = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                 {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  m.indices = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
               {11, 10, 2}, {10, 7, 6}, {7, 1, 8},   {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
               {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (Vec3& p : m.positions) p = normalize(p);
  for (int l = 0; l < levels; ++l) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> mid;
    auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
      const auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      const auto id = static_cast<std::uint32_t>(m.positions.size());
      m.positions.push_back(normalize(m.positions[a] + m.positions[b]));
      mid.emplace(key, id);
      return id;
    };
    std::vector<Tri> next;
    for (Tri f : m.indices) {
      const std::uint32_t a = midpoint(f[0], f[1]), b = midpoint(f[1], f[2]), c = midpoint(f[2], f[0]);
      next.push_back({f[0], a, c});
      next.push_back({f[1], b, a});
      next.push_back({f[2], c, b});
      next.push_back({a, b, c});
    }
    m.indices = std::move(next);
  }
  for (Vec3& p : m.positions) p = p * radius;
  return m;
}

inline IndexedMesh transformed(IndexedMesh m, const Mat3& r, Vec3 shift = {}) {
  for (Vec3& p : m.positions) p = r * p + shift;
  for (Vec3& n : m.vertex_normals) n = r * n;
  return m;
}

}  // namespace meshfinish::testing
