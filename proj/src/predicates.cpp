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

#include "meshfinish/predicates.hpp"

#include <cmath>
#include <limits>

namespace meshfinish {
namespace {

// Error-free transformations; expansions are stored in increasing magnitude
// order with zero components removed.
inline void two_sum(double a, double b, double& x, double& y) {
  x = a + b;
  const double bv = x - a;
  const double av = x - bv;
  y = (a - av) + (b - bv);
}

inline void two_diff(double a, double b, double& x, double& y) {
  x = a - b;
  const double bv = a - x;
  const double av = x + bv;
  y = (a - av) + (bv - b);
}

inline void two_product(double a, double b, double& x, double& y) {
  x = a * b;
  y = std::fma(a, b, -x);
}

// h = e + b for an expansion e (nonoverlapping, increasing magnitude).
int grow_expansion(int elen, const double* e, double b, double* h) {
  double q = b;
  int hlen = 0;
  for (int i = 0; i < elen; ++i) {
    double sum, err;
    two_sum(q, e[i], sum, err);
    if (err != 0) h[hlen++] = err;
    q = sum;
  }
  if (q != 0 || hlen == 0) h[hlen++] = q;
  return hlen;
}

// h = e + f, by growing e with each component of f.
int expansion_sum(int elen, const double* e, int flen, const double* f, double* h) {
  double buf[64];
  for (int i = 0; i < elen; ++i) buf[i] = e[i];
  int len = elen;
  for (int j = 0; j < flen; ++j) {
    double tmp[64];
    len = grow_expansion(len, buf, f[j], tmp);
    for (int m = 0; m < len; ++m) buf[m] = tmp[m];
  }
  for (int m = 0; m < len; ++m) h[m] = buf[m];
  return len;
}

// h = e * b.
int scale_expansion(int elen, const double* e, double b, double* h) {
  int hlen = 0;
  for (int i = 0; i < elen; ++i) {
    double p, perr;
    two_product(e[i], b, p, perr);
    const double part[2] = {perr, p};
    double tmp[64];
    const int n = expansion_sum(hlen, h, 2, part, tmp);
    for (int m = 0; m < n; ++m) h[m] = tmp[m];
    hlen = n;
  }
  return hlen;
}

double orient2d_exact(Vec2 a, Vec2 b, Vec2 c) {
  double acx[2], acy[2], bcx[2], bcy[2];
  two_diff(a.x, c.x, acx[1], acx[0]);
  two_diff(a.y, c.y, acy[1], acy[0]);
  two_diff(b.x, c.x, bcx[1], bcx[0]);
  two_diff(b.y, c.y, bcy[1], bcy[0]);

  // left = acx * bcy, right = acy * bcx, each a sum of four exact products.
  double left[16], right[16], tmp[16];
  int llen = 0, rlen = 0;
  for (int i = 0; i < 2; ++i) {
    double s[16];
    const int n = scale_expansion(2, bcy, acx[i], s);
    llen = expansion_sum(llen, left, n, s, tmp);
    for (int m = 0; m < llen; ++m) left[m] = tmp[m];
  }
  for (int i = 0; i < 2; ++i) {
    double s[16];
    const int n = scale_expansion(2, bcx, acy[i], s);
    rlen = expansion_sum(rlen, right, n, s, tmp);
    for (int m = 0; m < rlen; ++m) right[m] = tmp[m];
  }
  for (int m = 0; m < rlen; ++m) right[m] = -right[m];
  double det[32];
  const int dlen = expansion_sum(llen, left, rlen, right, det);
  return dlen == 0 ? 0.0 : det[dlen - 1];
}

}  // namespace

double orient2d(Vec2 a, Vec2 b, Vec2 c) {
  const double detleft = (a.x - c.x) * (b.y - c.y);
  const double detright = (a.y - c.y) * (b.x - c.x);
  const double det = detleft - detright;
  // Shewchuk's first-stage bound for orient2d.
  constexpr double eps = std::numeric_limits<double>::epsilon() * 0.5;
  constexpr double bound = (3.0 + 16.0 * eps) * eps;
  const double detsum = std::fabs(detleft) + std::fabs(detright);
  if (std::fabs(det) > bound * detsum) return det;
  return orient2d_exact(a, b, c);
}

bool triangles_overlap_interior(const Triangle2& a, const Triangle2& b) {
  const double sa = orient2d(a[0], a[1], a[2]);
  const double sb = orient2d(b[0], b[1], b[2]);
  if (sa == 0 || sb == 0) return false;

  // Separating-axis test restricted to edge lines: two convex polygons with
  // disjoint interiors always admit a separating line through an edge.
  auto separated_by = [](const Triangle2& t, double orient, const Triangle2& other) {
    for (int e = 0; e < 3; ++e) {
      const Vec2 p = t[e], q = t[(e + 1) % 3];
      bool all_outside = true;
      for (const Vec2& v : other) {
        const double s = orient2d(p, q, v);
        if ((orient > 0 && s > 0) || (orient < 0 && s < 0)) {
          all_outside = false;
          break;
        }
      }
      if (all_outside) return true;
    }
    return false;
  };
  return !separated_by(a, sa, b) && !separated_by(b, sb, a);
}

}  // namespace meshfinish
