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

#include "meshfinish/corpus.hpp"

#include <cmath>
#include <random>

#include "meshfinish/error.hpp"
#include "meshfinish/sdf.hpp"
#include "meshfinish/tetra.hpp"

namespace meshfinish {

const std::vector<CorpusShape>& corpus_shapes() {
  static const std::vector<CorpusShape> shapes = {
      {"sphere_s", "sphere(0.8)", 10},
      {"sphere_m", "sphere(0.8)", 32},
      {"sphere_l", "sphere(0.8)", 50},
      {"box", "box(0.7, 0.5, 0.3)", 40},
      {"box_fine", "box(0.8, 0.6, 0.4)", 52},
      {"torus", "torus(0.6, 0.25)", 48},
      {"torus_thin", "torus(0.65, 0.12)", 72},
      {"capsule_pair", "union(sphere(0.45, -0.35, 0, 0), sphere(0.45, 0.35, 0, 0))", 56},
      {"snowman", "union(sphere(0.5, 0, 0, -0.35), sphere(0.35, 0, 0, 0.35), sphere(0.2, 0, 0, 0.75))", 64},
      {"lens", "intersect(sphere(0.9, 0, 0, -0.45), sphere(0.9, 0, 0, 0.45))", 48},
      {"hollow_box", "subtract(box(0.7, 0.7, 0.7), sphere(0.85))", 46},
      {"dented_sphere", "subtract(sphere(0.8), sphere(0.5, 0.7, 0, 0))", 48},
      {"ring_and_ball", "union(torus(0.6, 0.15), sphere(0.3))", 64},
      {"stacked_plates",
       "union(box(0.8, 0.8, 0.08), translate(0, 0, 0.4, box(0.6, 0.6, 0.08)), translate(0, 0, -0.4, box(0.6, 0.6, 0.08)))",
       42},
      {"cross", "union(box(0.8, 0.2, 0.2), box(0.2, 0.8, 0.2), box(0.2, 0.2, 0.8))", 60},
      {"cup", "subtract(intersect(sphere(0.8), box(0.9, 0.9, 0.5)), sphere(0.65, 0, 0, 0.3))", 46},
      {"chain", "union(translate(-0.25, 0, 0, torus(0.35, 0.1)), translate(0.25, 0, 0, torus(0.35, 0.1)))", 72},
      {"blob_cluster",
       "union(sphere(0.4, 0.3, 0.2, 0), sphere(0.35, -0.3, 0.1, 0.2), sphere(0.3, 0, -0.35, -0.2), sphere(0.25, 0.1, 0.1, 0.5))",
       66},
      {"slab_with_hole", "subtract(box(0.8, 0.5, 0.15), sphere(0.3))", 64},
      {"big_torus", "torus(0.55, 0.3)", 56},
      {"sphere_xl", "sphere(0.85)", 46},
      {"box_xl", "box(0.75, 0.75, 0.5)", 46},
      {"shell", "subtract(sphere(0.85), translate(0, 0, 0.35, sphere(0.75)))", 44},
      {"nested_rings", "union(torus(0.7, 0.1), torus(0.4, 0.1), sphere(0.15))", 64},
      {"tower", "union(box(0.3, 0.3, 0.8), translate(0, 0, 0.5, sphere(0.45)), translate(0, 0, -0.6, box(0.6, 0.6, 0.15)))",
       52},
  };
  return shapes;
}

std::size_t corpus_size() { return corpus_shapes().size() * 2; }

std::string corpus_name(std::size_t index) {
  if (index >= corpus_size()) throw ValidationError("corpus index out of range");
  const auto& s = corpus_shapes()[index / 2];
  return index % 2 ? s.name + "_noisy" : s.name;
}

namespace {

IndexedMesh extract(const CorpusShape& s) {
  const Sdf sdf = Sdf::parse(s.sdf);
  return marching_tetrahedra(sample_sdf(sdf, s.resolution));
}

}  // namespace

IndexedMesh corpus_mesh(std::size_t index, std::uint64_t seed) {
  if (index >= corpus_size()) throw ValidationError("corpus index out of range");
  const CorpusShape& shape = corpus_shapes()[index / 2];
  IndexedMesh mesh = extract(shape);
  if (index % 2 == 0) return mesh;

  // Smooth part: a few random plane waves; rough part: per-vertex jitter.
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ull + index);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double cell = 2.0 / (shape.resolution - 1);
  struct Wave {
    Vec3 k;
    double phase, amp;
  };
  std::vector<Wave> waves(6);
  for (auto& w : waves) {
    w.k = normalize(Vec3{unit(rng), unit(rng), unit(rng)}) * (4.0 + 4.0 * std::fabs(unit(rng)));
    w.phase = kPi * unit(rng);
    w.amp = 0.012 * (1.0 + unit(rng) * 0.5);
  }
  const IndexedMesh with_normals = compute_geometry_normals(mesh);
  for (std::size_t v = 0; v < mesh.positions.size(); ++v) {
    const Vec3 p = mesh.positions[v];
    double d = 0.2 * cell * unit(rng);
    for (const auto& w : waves) d += w.amp * std::sin(dot(w.k, p) + w.phase);
    mesh.positions[v] = p + with_normals.vertex_normals[v] * d;
  }
  return mesh;
}

IndexedMesh benchmark_mesh() {
  const Sdf sdf = Sdf::parse("union(sphere(0.55, 0, 0, 0.2), torus(0.6, 0.2), translate(0, 0, -0.45, box(0.35, 0.35, 0.25)))");
  return marching_tetrahedra(sample_sdf(sdf, 44));
}

}  // namespace meshfinish
