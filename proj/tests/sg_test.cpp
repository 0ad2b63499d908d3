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

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "meshfinish/error.hpp"
#include "meshfinish/sg.hpp"

namespace meshfinish {
namespace {

SgEnvironment single_lobe(Vec3 axis, double lambda, double mu = 1.0) {
  SgEnvironment env;
  env.axes = {normalize(axis)};
  env.sharpness = {lambda};
  env.amplitudes = {mu};
  return env;
}

SgEnvironment random_standard(std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> a(kStandardLobes);
  for (double& v : a) v = u(rng);
  return SgEnvironment::standard(a);
}

Vec3 random_direction(std::mt19937& rng) {
  std::normal_distribution<double> g;
  return normalize({g(rng), g(rng), g(rng)});
}

TEST(StandardLobes, UnitAxesCoveringTheSphere) {
  const auto& axes = standard_sg_axes();
  for (const Vec3& a : axes) EXPECT_NEAR(length(a), 1.0, 1e-12);
  // Dense Fibonacci probe of the covering radius.
  double worst = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double z = 1 - (2.0 * i + 1) / n, r = std::sqrt(1 - z * z);
    const double phi = i * kPi * (3 - std::sqrt(5.0));
    const Vec3 d{r * std::cos(phi), r * std::sin(phi), z};
    double nearest = kPi;
    for (const Vec3& a : axes) nearest = std::min(nearest, angle_between(d, a));
    worst = std::max(worst, nearest);
  }
  EXPECT_LT(worst, kPi / 6);
  EXPECT_GT(standard_sg_sharpness(), 0);
}

TEST(EvalSg, ClosedForms) {
  const SgEnvironment env = single_lobe({0, 0, 1}, 10, 1);
  EXPECT_DOUBLE_EQ(eval_sg(env, {0, 0, 1}), 1.0);
  const Vec3 d{std::sqrt(1 - 0.81), 0, 0.9};
  EXPECT_NEAR(eval_sg(env, d), std::exp(-1.0), 1e-15);
  EXPECT_DOUBLE_EQ(eval_sg(single_lobe({1, 0, 0}, 3, 2.5), {1, 0, 0}), 2.5);
  const SgEnvironment zero = SgEnvironment::standard_constant(0);
  EXPECT_EQ(eval_sg(zero, normalize({1, 2, 3})), 0.0);
}

TEST(EvalSg, LinearInAmplitudes) {
  const SgEnvironment e1 = random_standard(1), e2 = random_standard(2);
  std::vector<double> mix(kStandardLobes);
  for (int k = 0; k < kStandardLobes; ++k) mix[k] = 0.3 * e1.amplitudes[k] + 1.7 * e2.amplitudes[k];
  const SgEnvironment em = SgEnvironment::standard(mix);
  std::mt19937 rng(3);
  for (int i = 0; i < 500; ++i) {
    const Vec3 d = random_direction(rng);
    EXPECT_NEAR(eval_sg(em, d), 0.3 * eval_sg(e1, d) + 1.7 * eval_sg(e2, d), 1e-12);
  }
}

TEST(EvalSg, RotationInvariant) {
  SgEnvironment env = random_standard(4);
  const Mat3 r = rotation_about({0.3, -1, 0.5}, 1.1);
  SgEnvironment rotated = env;
  for (Vec3& a : rotated.axes) a = r * a;
  std::mt19937 rng(5);
  for (int i = 0; i < 500; ++i) {
    const Vec3 d = random_direction(rng);
    EXPECT_NEAR(eval_sg(env, d), eval_sg(rotated, r * d), 1e-9);
    EXPECT_NEAR(sg_irradiance(env, d), sg_irradiance(rotated, r * d), 1e-9);
  }
}

TEST(Energy, ClosedFormAndMonteCarlo) {
  EXPECT_NEAR(sg_total_energy(single_lobe({0, 1, 0}, 1, 1)), 2 * kPi * (1 - std::exp(-2.0)), 1e-12);
  EXPECT_NEAR(sg_total_energy(single_lobe({0, 1, 0}, 1, 1)), 5.432848644, 1e-8);
  EXPECT_EQ(sg_total_energy(SgEnvironment::standard_constant(0)), 0.0);

  const SgEnvironment env = random_standard(6);
  std::mt19937 rng(7);
  const int n = 1000000;
  double acc = 0;
  for (int i = 0; i < n; ++i) acc += eval_sg(env, random_direction(rng));
  const double mc = 4 * kPi * acc / n;
  EXPECT_NEAR(mc / sg_total_energy(env), 1.0, 0.01);
}

TEST(Irradiance, NonNegativeEverywhere) {
  const SgEnvironment env = random_standard(8);
  std::mt19937 rng(9);
  for (int i = 0; i < 2000; ++i) EXPECT_GE(sg_irradiance(env, random_direction(rng)), 0.0);
  // A lobe pointing straight away from the normal still gives a tiny, non
  // negative amount.
  EXPECT_GE(sg_irradiance(single_lobe({0, 0, -1}, 50), {0, 0, 1}), 0.0);
}

TEST(Shading, DiffuseMatchesMonteCarlo) {
  const SgEnvironment env = random_standard(10);
  const PbrMaterial mat = make_material(0.0, 1.0);
  const Vec3 albedo{0.8, 0.5, 0.3};
  std::mt19937 rng(11);
  for (const Vec3 n : {Vec3{0, 0, 1}, normalize(Vec3{1, -2, 0.5}), normalize(Vec3{-0.3, 0.1, -1})}) {
    const ShadeTerms s = shade_point(env, albedo, n, n, mat);
    const int samples = 400000;
    double acc = 0;
    for (int i = 0; i < samples; ++i) {
      const Vec3 w = random_direction(rng);
      acc += eval_sg(env, w) * std::max(0.0, dot(w, n));
    }
    const double irradiance = 4 * kPi * acc / samples;
    for (int c = 0; c < 3; ++c)
      EXPECT_NEAR(s.diffuse[c] / (albedo[c] * irradiance / kPi), 1.0, 0.05);
  }
}

TEST(Shading, DiffuseBoundedAndMetalHasNone) {
  const SgEnvironment env = random_standard(12);
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 500; ++i) {
    const Vec3 n = random_direction(rng);
    Vec3 v = random_direction(rng);
    if (dot(v, n) < 0) v = -v;
    const Vec3 albedo{u(rng), u(rng), u(rng)};
    const PbrMaterial dielectric = make_material(0.0, u(rng));
    const ShadeTerms s = shade_point(env, albedo, n, v, dielectric);
    const double bound = sg_irradiance(env, n) / kPi;
    for (int c = 0; c < 3; ++c) {
      EXPECT_LE(s.diffuse[c], bound * (1 + 1e-12));
      EXPECT_GE(s.specular[c], 0.0);
    }
    const ShadeTerms metal = shade_point(env, albedo, n, v, make_material(1.0, u(rng)));
    EXPECT_EQ(metal.diffuse, Vec3{});
  }
}

TEST(Shading, CosineFalloffUnderOverheadLobe) {
  const SgEnvironment env = single_lobe({0, 0, 1}, standard_sg_sharpness());
  const PbrMaterial mat = make_material(0.0, 0.5);
  const Vec3 white{1, 1, 1};
  const Vec3 up{0, 0, 1}, side{1, 0, 0};
  const double lit = shade_point(env, white, up, up, mat).total().x;
  const double grazing = shade_point(env, white, side, side, mat).total().x;
  EXPECT_GT(grazing, 0);
  EXPECT_GT(lit, grazing);
}

TEST(Shading, DeferredImage) {
  TextureImage pos(4, 2, 3), nrm(4, 2, 3), alb(4, 2, 3);
  for (int x = 0; x < 3; ++x) {
    const std::size_t id = pos.texel(x, 0);
    pos.occupancy[id] = nrm.occupancy[id] = alb.occupancy[id] = 1;
    nrm.at(x, 0)[2] = 1;
    for (int c = 0; c < 3; ++c) alb.at(x, 0)[c] = 1;
  }
  ShadingInputs in;
  in.position = &pos;
  in.normal = &nrm;
  in.albedo = &alb;
  in.view_direction = Vec3{0, 0, 1};
  const TextureImage black = shade_deferred(in, SgEnvironment::standard_constant(0));
  const TextureImage lit = shade_deferred(in, SgEnvironment::standard_constant(1));
  EXPECT_EQ(black.channels, 4);
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 4; ++x) {
      const bool occ = pos.occupied(x, y);
      EXPECT_EQ(black.at(x, y)[3], occ ? 1.0f : 0.0f);
      for (int c = 0; c < 3; ++c) {
        EXPECT_EQ(black.at(x, y)[c], 0.0f);
        if (occ) EXPECT_GT(lit.at(x, y)[c], 0.0f);
        else EXPECT_EQ(lit.at(x, y)[c], 0.0f);
      }
    }
  TextureImage small(2, 2, 3);
  in.albedo = &small;
  EXPECT_THROW(shade_deferred(in, SgEnvironment::standard_constant(1)), ValidationError);
}

TEST(Demodulation, IdentityOffsetAndLoopOracle) {
  std::mt19937 rng(14);
  std::uniform_real_distribution<float> u(0, 1);
  TextureImage a(16, 8, 3), b(16, 8, 3);
  for (float& v : a.data) v = u(rng);
  for (float& v : b.data) v = u(rng);
  std::vector<std::uint8_t> mask(a.num_texels());
  for (auto& m : mask) m = u(rng) < 0.6f;
  mask[0] = 1;
  EXPECT_EQ(demodulation_metric(a, a, mask), 0.0);

  TextureImage shifted = a;
  for (float& v : shifted.data) v += 0.1f;
  // 0.1f is not 0.1, and the sums are rounded to float.
  EXPECT_NEAR(demodulation_metric(a, shifted, mask), 0.01, 1e-7);

  double acc = 0;
  int n = 0;
  for (int y = 0; y < a.height; ++y)
    for (int x = 0; x < a.width; ++x) {
      if (!mask[a.texel(x, y)]) continue;
      const double la = 0.2126 * a.at(x, y)[0] + 0.7152 * a.at(x, y)[1] + 0.0722 * a.at(x, y)[2];
      const double lb = 0.2126 * b.at(x, y)[0] + 0.7152 * b.at(x, y)[1] + 0.0722 * b.at(x, y)[2];
      acc += (la - lb) * (la - lb);
      ++n;
    }
  EXPECT_NEAR(demodulation_metric(a, b, mask), acc / n, 1e-12);

  std::vector<std::uint8_t> none(a.num_texels(), 0);
  EXPECT_THROW(demodulation_metric(a, b, none), ValidationError);
}

TEST(Environment, ValidationRejectsBadLobes) {
  SgEnvironment env = single_lobe({0, 0, 1}, 5);
  env.amplitudes[0] = -0.1;
  EXPECT_THROW(validate(env), ValidationError);
  env = single_lobe({0, 0, 1}, 5);
  env.axes[0] = {0, 0, 2};
  EXPECT_THROW(validate(env), ValidationError);
  env = single_lobe({0, 0, 1}, 0);
  EXPECT_THROW(validate(env), ValidationError);
  EXPECT_THROW(SgEnvironment::standard(std::vector<double>(23, 1.0)), ValidationError);
}

class SgFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() / "meshfinish_sg_test";
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::filesystem::path dir_;
};

TEST_F(SgFiles, EnvironmentJsonRoundTrip) {
  const SgEnvironment env = random_standard(15);
  save_environment(dir_ / "std.json", env);
  const SgEnvironment back = load_environment(dir_ / "std.json");
  EXPECT_EQ(back.amplitudes, env.amplitudes);
  EXPECT_EQ(back.axes, env.axes);
  EXPECT_EQ(back.sharpness, env.sharpness);

  const SgEnvironment custom = single_lobe({1, 2, 2}, 7, 0.5);
  save_environment(dir_ / "custom.json", custom);
  const SgEnvironment c2 = load_environment(dir_ / "custom.json");
  ASSERT_EQ(c2.size(), 1u);
  EXPECT_EQ(c2.axes[0], custom.axes[0]);
  EXPECT_EQ(c2.sharpness[0], 7.0);

  std::ofstream(dir_ / "bad.json") << R"({"lobes": 24, "axes": "standard", "colour": 1})";
  EXPECT_THROW(load_environment(dir_ / "bad.json"), ValidationError);
  std::ofstream(dir_ / "broken.json") << "{not json";
  EXPECT_THROW(load_environment(dir_ / "broken.json"), ParseError);
}

TEST_F(SgFiles, PfmBothEndiannessBottomUp) {
  for (float scale : {1.0f, -1.0f}) {
    const auto path = dir_ / "img.pfm";
    {
      std::ofstream out(path, std::ios::binary);
      out << "PF\n2 2\n" << scale << "\n";
      // File rows bottom to top: bottom row values 1, 2; top row 3, 4.
      for (float v : {1.f, 2.f, 3.f, 4.f})
        for (int c = 0; c < 3; ++c) {
          float f = v + 0.25f * c;
          std::uint32_t bits;
          std::memcpy(&bits, &f, 4);
          if (scale > 0) bits = __builtin_bswap32(bits);
          out.write(reinterpret_cast<const char*>(&bits), 4);
        }
    }
    const TextureImage img = read_pfm(path);
    ASSERT_EQ(img.width, 2);
    EXPECT_EQ(img.at(0, 0)[0], 3.f);
    EXPECT_EQ(img.at(1, 0)[2], 4.5f);
    EXPECT_EQ(img.at(0, 1)[1], 1.25f);
  }
  std::ofstream(dir_ / "bad.pfm") << "P6\n1 1\n255\n";
  EXPECT_THROW(read_pfm(dir_ / "bad.pfm"), ParseError);
}

TEST(Nnls, MatchesActiveSetEnumeration) {
  std::mt19937 rng(16);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t rows = 7, cols = 3;
    std::vector<double> a(rows * cols), b(rows);
    for (double& v : a) v = g(rng);
    for (double& v : b) v = g(rng);
    // Oracle: least squares on every column subset, keep the best feasible.
    double best = 1e300;
    for (int mask = 0; mask < 8; ++mask) {
      std::vector<int> idx;
      for (int c = 0; c < 3; ++c)
        if (mask >> c & 1) idx.push_back(c);
      const std::size_t k = idx.size();
      // Normal equations by Gaussian elimination.
      std::vector<double> m(k * (k + 1), 0.0);
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j)
          for (std::size_t r = 0; r < rows; ++r) m[i * (k + 1) + j] += a[r * cols + idx[i]] * a[r * cols + idx[j]];
        for (std::size_t r = 0; r < rows; ++r) m[i * (k + 1) + k] += a[r * cols + idx[i]] * b[r];
      }
      for (std::size_t p = 0; p < k; ++p)
        for (std::size_t i = 0; i < k; ++i) {
          if (i == p) continue;
          const double f = m[i * (k + 1) + p] / m[p * (k + 1) + p];
          for (std::size_t j = 0; j <= k; ++j) m[i * (k + 1) + j] -= f * m[p * (k + 1) + j];
        }
      std::vector<double> x(3, 0.0);
      bool feasible = true;
      for (std::size_t i = 0; i < k; ++i) {
        x[idx[i]] = m[i * (k + 1) + k] / m[i * (k + 1) + i];
        feasible = feasible && x[idx[i]] >= 0;
      }
      if (!feasible) continue;
      double res = 0;
      for (std::size_t r = 0; r < rows; ++r) {
        double s = -b[r];
        for (std::size_t c = 0; c < cols; ++c) s += a[r * cols + c] * x[c];
        res += s * s;
      }
      best = std::min(best, res);
    }
    const std::vector<double> x = nnls(a, rows, cols, b);
    double res = 0;
    for (std::size_t r = 0; r < rows; ++r) {
      double s = -b[r];
      for (std::size_t c = 0; c < cols; ++c) s += a[r * cols + c] * x[c];
      res += s * s;
    }
    for (double v : x) EXPECT_GE(v, 0.0);
    EXPECT_NEAR(res, best, 1e-9 * (1 + best));
  }
}

TEST(FitEnvironment, RecoversStandardAmplitudes) {
  const SgEnvironment env = random_standard(17);
  TextureImage img(128, 64, 3);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 128; ++x) {
      const double phi = 2 * kPi * (x + 0.5) / 128, theta = kPi * (y + 0.5) / 64;
      const Vec3 d{std::sin(theta) * std::sin(phi), std::cos(theta), -std::sin(theta) * std::cos(phi)};
      const auto l = static_cast<float>(eval_sg(env, d));
      for (int c = 0; c < 3; ++c) img.at(x, y)[c] = l;
    }
  const SgEnvironment fit = fit_environment(img);
  for (int k = 0; k < kStandardLobes; ++k) EXPECT_NEAR(fit.amplitudes[k], env.amplitudes[k], 1e-3);
}

}  // namespace
}  // namespace meshfinish
