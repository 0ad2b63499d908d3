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

#include "meshfinish/fields.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "meshfinish/error.hpp"

namespace meshfinish {

namespace {

struct Spec {
  std::string name;
  std::vector<double> args;
};

Spec parse_spec(std::string_view text) {
  Spec s;
  const auto colon = text.find(':');
  s.name = std::string(text.substr(0, colon));
  if (colon == std::string_view::npos) return s;
  std::string_view rest = text.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string item(rest.substr(0, comma));
    try {
      std::size_t used = 0;
      s.args.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("field spec: bad number '" + item + "' in " + std::string(text));
    }
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return s;
}

void expect_args(const Spec& s, std::size_t n, std::string_view text) {
  if (s.args.size() != n)
    throw ValidationError("field spec '" + std::string(text) + "' expects " + std::to_string(n) + " arguments");
}

}  // namespace

FieldSampler make_albedo_field(std::string_view text) {
  const Spec s = parse_spec(text);
  if (s.name == "constant") {
    expect_args(s, 3, text);
    const Vec3 c{s.args[0], s.args[1], s.args[2]};
    return [c](const Vec3&, const Vec3&) { return c; };
  }
  if (s.name == "checker" || s.name == "checker_x") {
    expect_args(s, 1, text);
    const double period = s.args[0];
    if (!(period > 0)) throw ValidationError("checker period must be positive");
    const bool only_x = s.name == "checker_x";
    return [period, only_x](const Vec3& p, const Vec3&) {
      long k = static_cast<long>(std::floor(p.x / period));
      if (!only_x) k += static_cast<long>(std::floor(p.y / period)) + static_cast<long>(std::floor(p.z / period));
      return (k & 1) ? Vec3{0.85, 0.25, 0.1} : Vec3{0.95, 0.9, 0.8};
    };
  }
  if (s.name == "gradient") {
    expect_args(s, 0, text);
    return [](const Vec3& p, const Vec3&) {
      auto ramp = [](double v) { return std::clamp(0.5 + 0.35 * v, 0.0, 1.0); };
      return Vec3{ramp(p.x), ramp(0.5 * (p.y + p.z)), ramp(-p.x)};
    };
  }
  if (s.name == "position") {
    expect_args(s, 0, text);
    return [](const Vec3& p, const Vec3&) {
      return Vec3{std::clamp(0.5 + 0.5 * p.x, 0.0, 1.0), std::clamp(0.5 + 0.5 * p.y, 0.0, 1.0),
                  std::clamp(0.5 + 0.5 * p.z, 0.0, 1.0)};
    };
  }
  if (s.name == "bands") {
    expect_args(s, 1, text);
    const double period = s.args[0];
    if (!(period > 0)) throw ValidationError("bands period must be positive");
    return [period](const Vec3& p, const Vec3&) {
      const double t = 0.5 + 0.5 * std::sin(2 * kPi * p.z / period);
      return Vec3{0.2 + 0.6 * t, 0.3 + 0.4 * t, 0.8 - 0.5 * t};
    };
  }
  throw ValidationError("unknown albedo field '" + std::string(text) + "'");
}

FieldSampler make_normal_field(std::string_view text) {
  const Spec s = parse_spec(text);
  if (s.name == "geometry") {
    expect_args(s, 0, text);
    return [](const Vec3&, const Vec3& n) { return n; };
  }
  if (s.name == "bumps") {
    expect_args(s, 2, text);
    const double amp = s.args[0], freq = s.args[1];
    if (!(amp >= 0) || !(freq > 0)) throw ValidationError("bumps: amplitude >= 0 and frequency > 0 required");
    return [amp, freq](const Vec3& p, const Vec3& n) {
      // Gradient of h = amp * sin(f x) sin(f y) sin(f z), projected onto the
      // tangent plane and subtracted from the normal.
      const double sx = std::sin(freq * p.x), sy = std::sin(freq * p.y), sz = std::sin(freq * p.z);
      const double cx = std::cos(freq * p.x), cy = std::cos(freq * p.y), cz = std::cos(freq * p.z);
      Vec3 grad = Vec3{cx * sy * sz, sx * cy * sz, sx * sy * cz} * (amp * freq);
      grad -= n * dot(n, grad);
      return normalize(n - grad);
    };
  }
  throw ValidationError("unknown normal field '" + std::string(text) + "'");
}

}  // namespace meshfinish
