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

#include "meshfinish/sg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "json.hpp"
#include "meshfinish/error.hpp"
#include "meshfinish/parallel.hpp"

namespace meshfinish {

const std::array<Vec3, kStandardLobes>& standard_sg_axes() {
  // A 24-point Fibonacci lattice relaxed to lower its covering radius from
  // about 31.9 to 27.0 degrees. Frozen so results never depend on the
  // optimizer that produced it.
  static const std::array<Vec3, kStandardLobes> axes = [] {
    std::array<Vec3, kStandardLobes> raw = {{
        {0.34028048116035892, -0.020677678036189476, 0.94009660555301777},
        {-0.36741731852099441, 0.24302516469590846, 0.89774343961700365},
        {0.019121979002905225, -0.55895342270789361, 0.82897854083332179},
        {0.35096675342643835, 0.63839339361289682, 0.68503738071780762},
        {-0.6770734379402702, -0.23981991678020065, 0.69574274495051758},
        {0.78153208022929499, -0.35849840631679236, 0.51057467645858712},
        {-0.37359824848774331, 0.80864014883365376, 0.45445072166427108},
        {-0.34928884795208393, -0.88978890245303177, 0.29372267492949083},
        {0.86015157577120127, 0.36739505395722233, 0.35377979171525498},
        {-0.92016810641870717, 0.29817317081973432, 0.25373887391000316},
        {0.45790844416883053, -0.86249093053780568, 0.21547447992491151},
        {0.28329989168309266, 0.95879525464438287, 0.021279827155334927},
        {-0.87498447918236377, -0.48357361870088161, -0.023637184403015349},
        {0.94187511615422725, -0.25797802421393212, -0.21521757500756522},
        {-0.49198486640201677, 0.83339304350639976, -0.25180731972389103},
        {-0.1719752246383866, -0.91998979954453342, -0.3521978007378605},
        {0.79209297332615891, 0.53481291625606708, -0.29421737918247792},
        {-0.86988000952380107, 0.19075515537187113, -0.45488596343471061},
        {0.51983306434458543, -0.68561629247572287, -0.50961150370253816},
        {0.083581499790597411, 0.7129345997728852, -0.69623156301580469},
        {-0.54585358180482824, -0.48087799437197876, -0.68614883353367506},
        {0.54918037917144047, 0.10102799566042134, -0.82957474360418582},
        {-0.3167920533423268, 0.30609480129824868, -0.8977464940378983},
        {0.092563375871239278, -0.32947214581467188, -0.93961701058441638},
    }};
    for (Vec3& a : raw) a = normalize(a);
    return raw;
  }();
  return axes;
}

double standard_sg_sharpness() {
  static const double lambda = [] {
    const auto& axes = standard_sg_axes();
    double sum = 0;
    for (int i = 0; i < kStandardLobes; ++i) {
      double best = kPi;
      for (int j = 0; j < kStandardLobes; ++j)
        if (j != i) best = std::min(best, angle_between(axes[i], axes[j]));
      sum += best;
    }
    const double half = 0.5 * sum / kStandardLobes;
    return std::log(2.0) / (1.0 - std::cos(half));
  }();
  return lambda;
}

SgEnvironment SgEnvironment::standard(std::span<const double> amplitudes) {
  if (amplitudes.size() != kStandardLobes)
    throw ValidationError("standard environment needs " + std::to_string(kStandardLobes) + " amplitudes");
  SgEnvironment env;
  const auto& axes = standard_sg_axes();
  env.axes.assign(axes.begin(), axes.end());
  env.sharpness.assign(kStandardLobes, standard_sg_sharpness());
  env.amplitudes.assign(amplitudes.begin(), amplitudes.end());
  validate(env);
  return env;
}

SgEnvironment SgEnvironment::standard_constant(double amplitude) {
  std::vector<double> a(kStandardLobes, amplitude);
  return standard(a);
}

void validate(const SgEnvironment& env) {
  if (env.axes.size() != env.sharpness.size() || env.axes.size() != env.amplitudes.size())
    throw ValidationError("environment: axes, sharpness and amplitudes differ in length");
  for (std::size_t k = 0; k < env.size(); ++k) {
    if (std::fabs(length(env.axes[k]) - 1.0) > 1e-9) throw ValidationError("environment: axis not unit length");
    if (!(env.sharpness[k] > 0) || !std::isfinite(env.sharpness[k]))
      throw ValidationError("environment: sharpness must be positive");
    if (!(env.amplitudes[k] >= 0) || !std::isfinite(env.amplitudes[k]))
      throw ValidationError("environment: amplitudes must be non-negative");
  }
}

double eval_sg(const SgEnvironment& env, const Vec3& d) {
  double sum = 0;
  for (std::size_t k = 0; k < env.size(); ++k)
    sum += env.amplitudes[k] * std::exp(env.sharpness[k] * (dot(d, env.axes[k]) - 1.0));
  return sum;
}

double sg_total_energy(const SgEnvironment& env) {
  double sum = 0;
  for (std::size_t k = 0; k < env.size(); ++k) {
    const double l = env.sharpness[k];
    sum += 2.0 * kPi * env.amplitudes[k] / l * (-std::expm1(-2.0 * l));
  }
  return sum;
}

namespace {

// Cosine-weighted integral of one lobe: fitted curve in dot(axis, n) that
// matches the exact clamped-cosine convolution to a few percent.
double lobe_irradiance(double mu, double lambda, const Vec3& axis, const Vec3& n) {
  const double mu_dot_n = dot(axis, n);
  constexpr double c0 = 0.36;
  constexpr double c1 = 1.0 / (4.0 * c0);
  const double eml = std::exp(-lambda);
  const double em2l = eml * eml;
  const double rl = 1.0 / lambda;
  const double scale = 1.0 + 2.0 * em2l - rl;
  const double bias = (eml - em2l) * rl - em2l;
  const double x = std::sqrt(1.0 - scale);
  const double x0 = c0 * mu_dot_n;
  const double x1 = c1 * x;
  const double sum = x0 + x1;
  double y = std::clamp(mu_dot_n, 0.0, 1.0);
  if (std::fabs(x0) <= x1) y = sum * sum / x;
  const double integral = 2.0 * kPi * mu / lambda * (-std::expm1(-2.0 * lambda));
  return std::max(0.0, scale * y + bias) * integral;
}

// Integral over the sphere of the product of two SGs.
double sg_inner_product(const Vec3& a1, double l1, double m1, const Vec3& a2, double l2, double m2) {
  const double um = length(a1 * l1 + a2 * l2);
  const double expo = std::exp(um - l1 - l2) * m1 * m2;
  const double other = -std::expm1(-2.0 * um);
  return um > 0 ? 2.0 * kPi * expo * other / um : 4.0 * kPi * m1 * m2 * std::exp(-l1 - l2);
}

double ggx_v1(double a2, double ndx) { return 1.0 / (ndx + std::sqrt(a2 + (1.0 - a2) * ndx * ndx)); }

}  // namespace

double sg_irradiance(const SgEnvironment& env, const Vec3& n) {
  double sum = 0;
  for (std::size_t k = 0; k < env.size(); ++k)
    if (env.amplitudes[k] != 0) sum += lobe_irradiance(env.amplitudes[k], env.sharpness[k], env.axes[k], n);
  return sum;
}

ShadeTerms shade_point(const SgEnvironment& env, const Vec3& albedo, const Vec3& n, const Vec3& v,
                       const PbrMaterial& material) {
  const double metallic = std::clamp(material.metallic, 0.0, 1.0);
  const double rough = std::clamp(material.roughness, 0.1, 1.0);  // alpha = rough^2 >= 0.01
  const double alpha = rough * rough;
  ShadeTerms out;
  const double e = sg_irradiance(env, n);
  out.diffuse = albedo * ((1.0 - metallic) * e / kPi);
  if (metallic == 1.0) out.diffuse = Vec3{0, 0, 0};

  // NDF as an SG about n, warped to the reflection direction.
  const double n_dot_v = std::max(dot(n, v), 1e-4);
  const Vec3 refl = n * (2.0 * dot(n, v)) - v;
  const Vec3 w_axis = normalize(refl);
  const double ndf_amp = 1.0 / (kPi * alpha * alpha);
  const double w_sharp = (2.0 / (alpha * alpha)) / (4.0 * n_dot_v);
  double light = 0;
  for (std::size_t k = 0; k < env.size(); ++k)
    if (env.amplitudes[k] != 0)
      light += sg_inner_product(w_axis, w_sharp, ndf_amp, env.axes[k], env.sharpness[k], env.amplitudes[k]);
  const double n_dot_l = std::clamp(dot(n, w_axis), 0.0, 1.0);
  const double a2 = alpha * alpha;
  const double vis = ggx_v1(a2, n_dot_l) * ggx_v1(a2, std::clamp(dot(n, v), 0.0, 1.0));
  const Vec3 h = normalize(w_axis + v);
  const double fw = std::pow(1.0 - std::clamp(dot(w_axis, h), 0.0, 1.0), 5.0);
  const Vec3 f0 = Vec3{0.04, 0.04, 0.04} * (1.0 - metallic) + albedo * metallic;
  const Vec3 fresnel = f0 + (Vec3{1, 1, 1} - f0) * fw;
  out.specular = fresnel * std::max(0.0, light * vis * n_dot_l);
  return out;
}

TextureImage shade_deferred(const ShadingInputs& in, const SgEnvironment& env) {
  validate(env);
  if (!in.position || !in.normal || !in.albedo) throw ValidationError("shade: missing input image");
  const TextureImage& P = *in.position;
  const TextureImage& N = *in.normal;
  const TextureImage& A = *in.albedo;
  if (P.width != N.width || P.width != A.width || P.height != N.height || P.height != A.height)
    throw ValidationError("shade: image dimensions differ");
  if (P.channels != 3 || N.channels != 3 || A.channels != 3) throw ValidationError("shade: 3-channel inputs required");
  if (!(in.material.metallic >= 0 && in.material.metallic <= 1 && in.material.roughness >= 0 &&
        in.material.roughness <= 1))
    throw ValidationError("shade: metallic and roughness must lie in [0, 1]");
  TextureImage out(P.width, P.height, 4);
  parallel_for(0, static_cast<std::size_t>(P.height), 4, [&](std::size_t y0, std::size_t y1) {
    for (std::size_t y = y0; y < y1; ++y)
      for (int x = 0; x < P.width; ++x) {
        const std::size_t id = P.texel(x, static_cast<int>(y));
        if (!P.occupancy[id]) continue;
        const float* pp = P.data.data() + id * 3;
        const float* np = N.data.data() + id * 3;
        const float* ap = A.data.data() + id * 3;
        const Vec3 p{pp[0], pp[1], pp[2]};
        const Vec3 n = normalize(Vec3{np[0], np[1], np[2]});
        const Vec3 v = in.view_direction ? normalize(*in.view_direction) : normalize(in.camera_position - p);
        const Vec3 c = shade_point(env, Vec3{ap[0], ap[1], ap[2]}, n, v, in.material).total();
        float* o = out.data.data() + id * 4;
        for (int i = 0; i < 3; ++i) o[i] = static_cast<float>(std::max(0.0, c[i]));
        o[3] = 1.0f;
        out.occupancy[id] = 1;
      }
  });
  return out;
}

double demodulation_metric(const TextureImage& white, const TextureImage& target,
                           std::span<const std::uint8_t> mask) {
  if (white.width != target.width || white.height != target.height || mask.size() != white.num_texels())
    throw ValidationError("demodulation: dimensions differ");
  if (white.channels < 3 || target.channels < 3) throw ValidationError("demodulation: RGB images required");
  double sum = 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    const double d = luminance(white.data.data() + i * white.channels) -
                     luminance(target.data.data() + i * target.channels);
    sum += d * d;
    ++count;
  }
  if (count == 0) throw ValidationError("demodulation: empty mask");
  return sum / static_cast<double>(count);
}

void save_environment(const std::filesystem::path& path, const SgEnvironment& env) {
  validate(env);
  nlohmann::json j;
  j["lobes"] = env.size();
  const auto& std_axes = standard_sg_axes();
  bool standard = env.size() == kStandardLobes;
  for (std::size_t k = 0; standard && k < env.size(); ++k)
    standard = env.axes[k] == std_axes[k] && env.sharpness[k] == standard_sg_sharpness();
  if (standard) {
    j["axes"] = "standard";
    j["sharpness"] = standard_sg_sharpness();
  } else {
    nlohmann::json axes = nlohmann::json::array();
    for (const Vec3& a : env.axes) axes.push_back({a.x, a.y, a.z});
    j["axes"] = axes;
    j["sharpness"] = env.sharpness;
  }
  j["amplitudes"] = env.amplitudes;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

SgEnvironment load_environment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  SgEnvironment env;
  try {
    const auto j = nlohmann::json::parse(in);
    for (const auto& [key, value] : j.items())
      if (key != "lobes" && key != "axes" && key != "sharpness" && key != "amplitudes")
        throw ValidationError("environment: unknown key '" + key + "'");
    env.amplitudes = j.at("amplitudes").get<std::vector<double>>();
    const auto& axes = j.contains("axes") ? j.at("axes") : nlohmann::json("standard");
    if (axes.is_string()) {
      if (axes.get<std::string>() != "standard") throw ValidationError("environment: unknown axes preset");
      return SgEnvironment::standard(env.amplitudes);
    }
    for (const auto& a : axes) env.axes.push_back({a.at(0).get<double>(), a.at(1).get<double>(), a.at(2).get<double>()});
    const auto& s = j.at("sharpness");
    if (s.is_number()) {
      env.sharpness.assign(env.axes.size(), s.get<double>());
    } else {
      env.sharpness = s.get<std::vector<double>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("environment: ") + e.what());
  }
  validate(env);
  return env;
}

std::vector<double> nnls(std::span<const double> a_data, std::size_t rows, std::size_t cols,
                         std::span<const double> b_data) {
  if (a_data.size() != rows * cols || b_data.size() != rows) throw ValidationError("nnls: size mismatch");
  using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const Mat> A(a_data.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  const Eigen::Map<const Eigen::VectorXd> b(b_data.data(), static_cast<Eigen::Index>(rows));
  const auto n = static_cast<Eigen::Index>(cols);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(cols, false);
  const double tol = 1e-12 * std::max(1.0, A.cwiseAbs().maxCoeff()) * std::max<double>(rows, cols);

  auto solve_passive = [&]() {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < n; ++j)
      if (passive[j]) idx.push_back(j);
    Eigen::MatrixXd ap(A.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) ap.col(static_cast<Eigen::Index>(k)) = A.col(idx[k]);
    const Eigen::VectorXd sp = ap.colPivHouseholderQr().solve(b);
    Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k < idx.size(); ++k) s[idx[k]] = sp[static_cast<Eigen::Index>(k)];
    return s;
  };

  for (int outer = 0; outer < 3 * n + 10; ++outer) {
    const Eigen::VectorXd w = A.transpose() * (b - A * x);
    Eigen::Index best = -1;
    for (Eigen::Index j = 0; j < n; ++j)
      if (!passive[j] && w[j] > tol && (best < 0 || w[j] > w[best])) best = j;
    if (best < 0) break;
    passive[best] = true;
    for (int inner = 0; inner < 3 * n + 10; ++inner) {
      Eigen::VectorXd s = solve_passive();
      bool feasible = true;
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[j] && s[j] <= 0) feasible = false;
      if (feasible) {
        x = s;
        break;
      }
      double step = 1.0;
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[j] && s[j] <= 0) step = std::min(step, x[j] / (x[j] - s[j]));
      x += step * (s - x);
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[j] && x[j] <= tol) {
          passive[j] = false;
          x[j] = 0;
        }
    }
  }
  std::vector<double> out(cols);
  for (Eigen::Index j = 0; j < n; ++j) out[static_cast<std::size_t>(j)] = std::max(0.0, x[j]);
  return out;
}

namespace {

// Equirectangular convention: +Y up, row 0 at the zenith, column 0 at -Z
// turning toward +X.
Vec3 equirect_direction(double u, double v) {
  const double phi = 2.0 * kPi * u;
  const double theta = kPi * v;
  return {std::sin(theta) * std::sin(phi), std::cos(theta), -std::sin(theta) * std::cos(phi)};
}

}  // namespace

SgEnvironment fit_environment(const TextureImage& img) {
  if (img.channels < 3) throw ValidationError("environment fit: RGB image required");
  // Box-filter down to at most 128 x 64 samples.
  const int gw = std::min(img.width, 128), gh = std::min(img.height, 64);
  std::vector<double> target(static_cast<std::size_t>(gw) * gh, 0.0), weight(target.size(), 0.0);
  std::vector<int> count(target.size(), 0);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      const int cx = x * gw / img.width, cy = y * gh / img.height;
      const double l = luminance(img.at(x, y));
      if (!std::isfinite(l)) throw ValidationError("environment fit: non-finite radiance");
      target[static_cast<std::size_t>(cy) * gw + cx] += std::max(0.0, l);
      ++count[static_cast<std::size_t>(cy) * gw + cx];
    }
  const double lambda = standard_sg_sharpness();
  const auto& axes = standard_sg_axes();
  std::vector<double> a(target.size() * kStandardLobes), b(target.size());
  for (int cy = 0; cy < gh; ++cy)
    for (int cx = 0; cx < gw; ++cx) {
      const std::size_t i = static_cast<std::size_t>(cy) * gw + cx;
      const double v = (cy + 0.5) / gh;
      const Vec3 d = equirect_direction((cx + 0.5) / gw, v);
      const double w = std::sqrt(std::sin(kPi * v));  // sqrt of the solid-angle weight
      b[i] = w * target[i] / std::max(1, count[i]);
      for (int k = 0; k < kStandardLobes; ++k)
        a[i * kStandardLobes + k] = w * std::exp(lambda * (dot(d, axes[k]) - 1.0));
    }
  const std::vector<double> mu = nnls(a, target.size(), kStandardLobes, b);
  return SgEnvironment::standard(mu);
}

TextureImage read_pfm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string magic;
  int w = 0, h = 0;
  double scale = 0;
  in >> magic >> w >> h >> scale;
  if (!in || (magic != "PF" && magic != "Pf")) throw ParseError("pfm: bad header");
  in.get();  // single whitespace before the raster
  if (w <= 0 || h <= 0 || w > 16384 || h > 16384) throw ParseError("pfm: bad size");
  const int c = magic == "PF" ? 3 : 1;
  std::vector<float> raw(static_cast<std::size_t>(w) * h * c);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size() * 4));
  if (!in) throw ParseError("pfm: truncated raster");
  if (scale > 0) {
    for (float& f : raw) {
      std::uint32_t u;
      std::memcpy(&u, &f, 4);
      u = __builtin_bswap32(u);
      std::memcpy(&f, &u, 4);
    }
  }
  TextureImage img(w, h, 3);
  for (int y = 0; y < h; ++y)  // PFM rows run bottom to top
    for (int x = 0; x < w; ++x)
      for (int k = 0; k < 3; ++k)
        img.at(x, h - 1 - y)[k] = raw[(static_cast<std::size_t>(y) * w + x) * c + (c == 3 ? k : 0)];
  std::fill(img.occupancy.begin(), img.occupancy.end(), std::uint8_t{1});
  return img;
}

}  // namespace meshfinish
