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

#include "meshfinish/material.hpp"

#include <algorithm>
#include <cmath>

#include "meshfinish/error.hpp"

namespace meshfinish {

void validate(const BetaParams& p) {
  if (!(p.alpha > 0) || !(p.beta > 0) || !std::isfinite(p.alpha) || !std::isfinite(p.beta))
    throw ValidationError("beta parameters must be positive and finite");
}

double beta_log_likelihood(const BetaParams& p, double x) {
  validate(p);
  if (x == 0.0 || x == 1.0) throw ValidationError("boundary support: beta likelihood needs x in (0, 1)");
  if (!(x > 0.0 && x < 1.0)) throw ValidationError("beta likelihood needs x in (0, 1)");
  const double log_b = std::lgamma(p.alpha) + std::lgamma(p.beta) - std::lgamma(p.alpha + p.beta);
  return (p.alpha - 1.0) * std::log(x) + (p.beta - 1.0) * std::log1p(-x) - log_b;
}

double beta_pdf(const BetaParams& p, double x) { return std::exp(beta_log_likelihood(p, x)); }

double beta_mode(const BetaParams& p) {
  validate(p);
  const bool a = p.alpha > 1, b = p.beta > 1;
  if (a && b) return (p.alpha - 1.0) / (p.alpha + p.beta - 2.0);
  if (!a && b) return 0.0;
  if (a && !b) return 1.0;
  return 0.5;
}

PbrMaterial make_material(double metallic, double roughness) {
  if (!std::isfinite(metallic) || !std::isfinite(roughness))
    throw ValidationError("material scalars must be finite");
  PbrMaterial m;
  m.metallic = std::clamp(metallic, 0.0, 1.0);
  m.roughness = std::clamp(roughness, 0.0, 1.0);
  return m;
}

PbrMaterial material_from_beta(const BetaParams& metallic, const BetaParams& roughness) {
  return make_material(beta_mode(metallic), beta_mode(roughness));
}

}  // namespace meshfinish
