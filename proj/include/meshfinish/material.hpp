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

#include <string>

namespace meshfinish {

struct BetaParams {
  double alpha = 1;
  double beta = 1;
};

// Throws ValidationError unless both parameters are positive and finite.
void validate(const BetaParams& params);

// ln of the Beta density at x in the open interval (0, 1). Throws
// ValidationError("boundary support") at x = 0 or 1, and for x outside [0,1].
double beta_log_likelihood(const BetaParams& params, double x);
double beta_pdf(const BetaParams& params, double x);

// Mode with fixed conventions on the non-interior cases:
//   alpha > 1, beta > 1   (alpha - 1) / (alpha + beta - 2)
//   alpha <= 1 < beta     0
//   beta <= 1 < alpha     1
//   alpha, beta <= 1      0.5
double beta_mode(const BetaParams& params);

// Homogeneous metallic-roughness material. Scalars are clamped to [0,1] on
// construction through make_material.
struct PbrMaterial {
  double metallic = 0.0;
  double roughness = 0.5;
  std::string albedo_texture;  // optional references (file names or ids)
  std::string normal_texture;
};

PbrMaterial make_material(double metallic, double roughness);
// Material whose scalars are the modes of the two distributions.
PbrMaterial material_from_beta(const BetaParams& metallic, const BetaParams& roughness);

}  // namespace meshfinish
