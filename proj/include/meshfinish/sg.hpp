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

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "meshfinish/material.hpp"
#include "meshfinish/texture.hpp"
#include "meshfinish/vec.hpp"

namespace meshfinish {

inline constexpr int kStandardLobes = 24;

// The fixed 24-direction lobe table. Its covering radius (largest angle from
// any direction to the nearest axis) is about 27 degrees.
const std::array<Vec3, kStandardLobes>& standard_sg_axes();
// ln 2 / (1 - cos(theta / 2)), theta being the mean nearest-neighbour angle
// between standard axes: neighbouring lobes cross at half their peak.
double standard_sg_sharpness();

// Sum of mu_k * exp(lambda_k * (dot(w, a_k) - 1)). Amplitudes are grayscale.
struct SgEnvironment {
  std::vector<Vec3> axes;
  std::vector<double> sharpness;
  std::vector<double> amplitudes;

  std::size_t size() const { return axes.size(); }
  // Standard axes and sharpness with the given amplitudes.
  static SgEnvironment standard(std::span<const double> amplitudes);
  static SgEnvironment standard_constant(double amplitude);
};

void validate(const SgEnvironment& env);

double eval_sg(const SgEnvironment& env, const Vec3& direction);
double sg_total_energy(const SgEnvironment& env);
// Integral of L(w) max(dot(w, n), 0) over the sphere (fitted approximation).
double sg_irradiance(const SgEnvironment& env, const Vec3& normal);

struct ShadeTerms {
  Vec3 diffuse;
  Vec3 specular;
  Vec3 total() const { return diffuse + specular; }
};

// Roughness is clamped so the GGX alpha (roughness squared) stays >= 0.01.
ShadeTerms shade_point(const SgEnvironment& env, const Vec3& albedo, const Vec3& normal, const Vec3& view,
                       const PbrMaterial& material);

struct ShadingInputs {
  const TextureImage* position = nullptr;  // 3 channels, carries occupancy
  const TextureImage* normal = nullptr;    // 3 channels, world space
  const TextureImage* albedo = nullptr;    // 3 channels, linear
  PbrMaterial material;
  // Direction from the surface toward the viewer, shared by all texels
  // (orthographic). When absent each texel looks at camera_position.
  std::optional<Vec3> view_direction;
  Vec3 camera_position{0, 0, 3};
};

// RGBA, linear. Alpha is 1 on occupied texels; unoccupied texels are 0.
TextureImage shade_deferred(const ShadingInputs& inputs, const SgEnvironment& env);

inline double luminance(const float* rgb) { return 0.2126 * rgb[0] + 0.7152 * rgb[1] + 0.0722 * rgb[2]; }

// Mean squared luminance difference over texels where mask != 0.
double demodulation_metric(const TextureImage& shaded_white, const TextureImage& target,
                           std::span<const std::uint8_t> mask);

// JSON: {"lobes": 24, "axes": "standard", "sharpness": s, "amplitudes": [...]}
// or with explicit "axes": [[x,y,z], ...] and "sharpness": [...].
void save_environment(const std::filesystem::path& path, const SgEnvironment& env);
SgEnvironment load_environment(const std::filesystem::path& path);

// Non-negative least-squares fit of standard-lobe amplitudes to the
// luminance of an equirectangular radiance map (solid-angle weighted).
SgEnvironment fit_environment(const TextureImage& equirect);
// Portable float map (PF / Pf), as written by most HDR tools.
TextureImage read_pfm(const std::filesystem::path& path);

// Minimizes |A x - b| subject to x >= 0 (Lawson-Hanson). A is row-major
// rows x cols.
std::vector<double> nnls(std::span<const double> a, std::size_t rows, std::size_t cols, std::span<const double> b);

}  // namespace meshfinish
