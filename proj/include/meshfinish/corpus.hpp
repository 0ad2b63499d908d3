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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "meshfinish/mesh.hpp"

namespace meshfinish {

struct CorpusShape {
  std::string name;
  std::string sdf;  // expression for Sdf::parse
  int resolution;   // lattice nodes per axis over [-1, 1]^3
};

// Analytic base shapes; the corpus holds each one plain and perturbed.
const std::vector<CorpusShape>& corpus_shapes();
std::size_t corpus_size();
std::string corpus_name(std::size_t index);

// Mesh `index` of the corpus. Odd indices are noisy variants of the shape
// before them: every vertex moves along its normal by a smooth random field
// plus per-vertex jitter, both drawn from `seed`.
IndexedMesh corpus_mesh(std::size_t index, std::uint64_t seed = 1);

// Roughly 30K triangles, used for the timing and size checks.
IndexedMesh benchmark_mesh();

}  // namespace meshfinish
