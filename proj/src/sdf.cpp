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

#include "meshfinish/sdf.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <variant>

#include "meshfinish/error.hpp"
#include "meshfinish/parallel.hpp"

namespace meshfinish {

struct Sdf::Node {
  enum class Kind { Sphere, Box, Torus, Translate, Union, Intersect, Subtract };
  Kind kind;
  std::vector<double> params;
  std::vector<std::shared_ptr<const Node>> children;

  double eval(const Vec3& p) const {
    switch (kind) {
      case Kind::Sphere:
        return length(p - Vec3{params[1], params[2], params[3]}) - params[0];
      case Kind::Box: {
        const Vec3 q{std::fabs(p.x) - params[0], std::fabs(p.y) - params[1],
                     std::fabs(p.z) - params[2]};
        const Vec3 outside{std::max(q.x, 0.0), std::max(q.y, 0.0), std::max(q.z, 0.0)};
        return length(outside) + std::min(std::max({q.x, q.y, q.z}), 0.0);
      }
      case Kind::Torus: {
        const double ring = std::hypot(p.x, p.y) - params[0];
        return std::hypot(ring, p.z) - params[1];
      }
      case Kind::Translate:
        return children[0]->eval(p - Vec3{params[0], params[1], params[2]});
      case Kind::Union: {
        double d = children[0]->eval(p);
        for (std::size_t i = 1; i < children.size(); ++i) d = std::min(d, children[i]->eval(p));
        return d;
      }
      case Kind::Intersect: {
        double d = children[0]->eval(p);
        for (std::size_t i = 1; i < children.size(); ++i) d = std::max(d, children[i]->eval(p));
        return d;
      }
      case Kind::Subtract:
        return std::max(children[0]->eval(p), -children[1]->eval(p));
    }
    return 0;
  }
};

namespace {

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  std::shared_ptr<const Sdf::Node> parse_all() {
    auto node = parse_shape();
    skip();
    if (pos_ != s_.size()) fail("trailing characters");
    return node;
  }

 private:
  using Node = Sdf::Node;

  [[noreturn]] void fail(const std::string& what) const {
    throw ValidationError("sdf expression: " + what + " at offset " + std::to_string(pos_) +
                          " in '" + std::string(s_) + "'");
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string identifier() {
    skip();
    const std::size_t b = pos_;
    while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (b == pos_) fail("expected a shape name");
    return std::string(s_.substr(b, pos_ - b));
  }

  double number() {
    skip();
    double v = 0;
    const auto res = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    if (res.ec != std::errc()) fail("expected a number");
    pos_ = static_cast<std::size_t>(res.ptr - s_.data());
    if (!std::isfinite(v)) fail("non-finite number");
    return v;
  }

  std::vector<double> numbers(std::size_t min_count, std::size_t max_count) {
    std::vector<double> out;
    out.push_back(number());
    while (peek(',')) {
      ++pos_;
      out.push_back(number());
    }
    if (out.size() < min_count || out.size() > max_count) fail("wrong number of arguments");
    return out;
  }

  std::shared_ptr<const Node> parse_shape() {
    const std::string name = identifier();
    expect('(');
    auto node = std::make_shared<Node>();
    if (name == "sphere") {
      node->kind = Node::Kind::Sphere;
      node->params = numbers(1, 4);
      if (node->params.size() != 1 && node->params.size() != 4) fail("sphere takes r or r,cx,cy,cz");
      node->params.resize(4, 0.0);
      if (!(node->params[0] > 0)) fail("sphere radius must be positive");
    } else if (name == "box") {
      node->kind = Node::Kind::Box;
      node->params = numbers(3, 3);
      for (double h : node->params)
        if (!(h > 0)) fail("box half extents must be positive");
    } else if (name == "torus") {
      node->kind = Node::Kind::Torus;
      node->params = numbers(2, 2);
      if (!(node->params[0] > 0 && node->params[1] > 0)) fail("torus radii must be positive");
    } else if (name == "translate") {
      node->kind = Node::Kind::Translate;
      for (int i = 0; i < 3; ++i) {
        node->params.push_back(number());
        expect(',');
      }
      node->children.push_back(parse_shape());
    } else if (name == "union" || name == "intersect" || name == "subtract") {
      node->kind = name == "union"       ? Node::Kind::Union
                   : name == "intersect" ? Node::Kind::Intersect
                                         : Node::Kind::Subtract;
      node->children.push_back(parse_shape());
      while (peek(',')) {
        ++pos_;
        node->children.push_back(parse_shape());
      }
      if (node->children.size() < 2) fail(name + " needs at least two shapes");
      if (node->kind == Node::Kind::Subtract && node->children.size() != 2)
        fail("subtract takes exactly two shapes");
    } else {
      fail("unknown shape '" + name + "'");
    }
    expect(')');
    return node;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Sdf Sdf::parse(std::string_view expr) {
  Sdf sdf;
  sdf.root_ = Parser(expr).parse_all();
  sdf.expr_ = std::string(expr);
  return sdf;
}

double Sdf::operator()(const Vec3& p) const { return root_->eval(p); }

Vec3 Sdf::gradient(const Vec3& p, double h) const {
  const double inv = 0.5 / h;
  return {((*this)(p + Vec3{h, 0, 0}) - (*this)(p - Vec3{h, 0, 0})) * inv,
          ((*this)(p + Vec3{0, h, 0}) - (*this)(p - Vec3{0, h, 0})) * inv,
          ((*this)(p + Vec3{0, 0, h}) - (*this)(p - Vec3{0, 0, h})) * inv};
}

DensityGrid sample_sdf(const Sdf& sdf, int res, const Bounds& bounds) {
  if (res < 2) throw ValidationError("sdf sampling resolution must be at least 2");
  DensityGrid grid;
  grid.resolution = {res, res, res};
  grid.bounds = bounds;
  grid.values.resize(static_cast<std::size_t>(res) * res * res);
  parallel_for(0, static_cast<std::size_t>(res), 1, [&](std::size_t kb, std::size_t ke) {
    for (std::size_t k = kb; k < ke; ++k)
      for (int j = 0; j < res; ++j)
        for (int i = 0; i < res; ++i)
          grid.values[grid.index(i, j, static_cast<int>(k))] =
              sdf(grid.node_position(i, j, static_cast<int>(k)));
  });
  return grid;
}

OffsetField sdf_projection_field(const Sdf& sdf) {
  return [sdf](const Vec3& p) {
    const Vec3 g = sdf.gradient(p);
    const double gl2 = length_squared(g);
    if (!(gl2 > 0)) return Vec3{};
    return g * (-sdf(p) / gl2);
  };
}

}  // namespace meshfinish
