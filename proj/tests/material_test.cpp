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

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <random>

#include "meshfinish/error.hpp"
#include "meshfinish/material.hpp"

namespace meshfinish {
namespace {

double grid_argmax(const BetaParams& p, double step) {
  double best_x = step, best = -1e300;
  for (double x = step; x < 1; x += step) {
    const double v = beta_log_likelihood(p, x);
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  return best_x;
}

TEST(BetaLogLikelihood, ClosedForms) {
  for (double x : {0.01, 0.3, 0.5, 0.99}) EXPECT_NEAR(beta_log_likelihood({1, 1}, x), 0.0, 1e-15);
  EXPECT_NEAR(beta_log_likelihood({2, 1}, 0.5), 0.0, 1e-15);
  EXPECT_NEAR(beta_log_likelihood({2, 1}, 0.25), std::log(0.5), 1e-14);
  // Beta(2,2) density is 6 x (1 - x).
  EXPECT_NEAR(beta_log_likelihood({2, 2}, 0.3), std::log(6 * 0.3 * 0.7), 1e-14);
  EXPECT_NEAR(beta_pdf({2, 2}, 0.3), 6 * 0.3 * 0.7, 1e-14);
}

TEST(BetaLogLikelihood, BoundarySupport) {
  for (double x : {0.0, 1.0}) {
    try {
      beta_log_likelihood({2, 3}, x);
      FAIL() << x;
    } catch (const ValidationError& e) {
      EXPECT_NE(std::string(e.what()).find("boundary support"), std::string::npos);
    }
  }
  EXPECT_THROW(beta_log_likelihood({2, 3}, -0.1), ValidationError);
  EXPECT_THROW(beta_log_likelihood({2, 3}, 1.5), ValidationError);
  EXPECT_THROW(beta_log_likelihood({0, 3}, 0.5), ValidationError);
  EXPECT_THROW(beta_log_likelihood({2, std::nan("")}, 0.5), ValidationError);
}

TEST(BetaLogLikelihood, MatchesQuadratureNormalizedDensity) {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> par(0.5, 20), xs(0.01, 0.99);
  boost::math::quadrature::tanh_sinh<double> integrator;
  for (int i = 0; i < 30; ++i) {
    const BetaParams p{par(rng), par(rng)};
    auto unnormalized = [&](double x) {
      return std::exp((p.alpha - 1) * std::log(x) + (p.beta - 1) * std::log1p(-x));
    };
    const double z = integrator.integrate(unnormalized, 0.0, 1.0);
    const double x = xs(rng);
    EXPECT_NEAR(beta_log_likelihood(p, x), std::log(unnormalized(x) / z), 1e-8);
  }
}

TEST(BetaLogLikelihood, DensityIntegratesToOne) {
  std::mt19937 rng(22);
  std::uniform_real_distribution<double> par(0.5, 20);
  boost::math::quadrature::tanh_sinh<double> integrator;
  for (int i = 0; i < 30; ++i) {
    const BetaParams p{par(rng), par(rng)};
    const double total = integrator.integrate([&](double x) { return beta_pdf(p, x); }, 0.0, 1.0);
    EXPECT_NEAR(total, 1.0, 1e-6) << p.alpha << "," << p.beta;
  }
}

TEST(BetaMode, ClosedFormsAndConventions) {
  EXPECT_DOUBLE_EQ(beta_mode({2, 2}), 0.5);
  EXPECT_DOUBLE_EQ(beta_mode({5, 2}), 0.8);
  EXPECT_EQ(beta_mode({1, 3}), 0.0);
  EXPECT_EQ(beta_mode({0.5, 3}), 0.0);
  EXPECT_EQ(beta_mode({3, 1}), 1.0);
  EXPECT_EQ(beta_mode({3, 0.7}), 1.0);
  EXPECT_EQ(beta_mode({1, 1}), 0.5);
  EXPECT_EQ(beta_mode({0.5, 0.9}), 0.5);
  EXPECT_THROW(beta_mode({-1, 2}), ValidationError);
}

TEST(BetaMode, GridArgmax) {
  EXPECT_NEAR(beta_mode({3.7, 1.9}), grid_argmax({3.7, 1.9}, 1e-6), 1e-5);
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> par(1.05, 20);
  for (int i = 0; i < 10; ++i) {
    const BetaParams p{par(rng), par(rng)};
    EXPECT_NEAR(beta_mode(p), grid_argmax(p, 1e-5), 2e-5);
  }
}

TEST(BetaMode, MirrorSymmetry) {
  std::mt19937 rng(24);
  std::uniform_real_distribution<double> par(1.01, 50);
  for (int i = 0; i < 200; ++i) {
    const double a = par(rng), b = par(rng);
    EXPECT_NEAR(beta_mode({a, b}) + beta_mode({b, a}), 1.0, 1e-12);
  }
}

TEST(Material, ClampingAndModes) {
  const PbrMaterial m = make_material(1.4, -0.2);
  EXPECT_EQ(m.metallic, 1.0);
  EXPECT_EQ(m.roughness, 0.0);
  const PbrMaterial b = material_from_beta({5, 2}, {2, 2});
  EXPECT_DOUBLE_EQ(b.metallic, 0.8);
  EXPECT_DOUBLE_EQ(b.roughness, 0.5);
  EXPECT_THROW(make_material(std::nan(""), 0.5), ValidationError);
}

}  // namespace
}  // namespace meshfinish
