#pragma once

// Independent reference computations shared by the tests. Nothing here calls
// into the library's numerical kernels.

#include "curvmask/geometry.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

/// Uniform cubic B-spline on [0, 4] with unit knot spacing.
inline double cardinal_cubic(double u) {
  if (u < 0.0 || u >= 4.0) return 0.0;
  if (u < 1.0) return u * u * u / 6.0;
  if (u < 2.0) return (-3 * u * u * u + 12 * u * u - 12 * u + 4) / 6.0;
  if (u < 3.0) return (3 * u * u * u - 24 * u * u + 60 * u - 44) / 6.0;
  const double v = 4.0 - u;
  return v * v * v / 6.0;
}

/// Exact integral of x^i y^j over a triangle, by expanding x and y in
/// barycentric coordinates and using int l1^a l2^b l3^c = 2|T| a! b! c! / (a+b+c+2)!.
inline double monomial_integral(curvmask::Vec2 a, curvmask::Vec2 b, curvmask::Vec2 c, int i, int j) {
  const std::array<curvmask::Vec2, 3> v{a, b, c};
  const double area = 0.5 * std::abs((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
  auto fact = [](int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
  };
  const int deg = i + j;
  int combos = 1;
  for (int k = 0; k < deg; ++k) combos *= 3;
  double sum = 0.0;
  for (int code = 0; code < combos; ++code) {
    std::array<int, 3> exps{0, 0, 0};
    double coef = 1.0;
    int rest = code;
    for (int k = 0; k < deg; ++k) {
      const int which = rest % 3;
      rest /= 3;
      ++exps[which];
      coef *= k < i ? v[which].x : v[which].y;
    }
    sum += coef * 2.0 * area * fact(exps[0]) * fact(exps[1]) * fact(exps[2]) / fact(deg + 2);
  }
  return sum;
}

/// Points of a closed polygon at equal arc-length steps: arc length of point q
/// measured from vertex 0 along the boundary, or -1 if q is not on it.
inline double arc_position(const std::vector<curvmask::Vec2>& poly, curvmask::Vec2 q, double tol = 1e-9) {
  double s = 0.0;
  for (std::size_t e = 0; e < poly.size(); ++e) {
    const auto a = poly[e];
    const auto b = poly[(e + 1) % poly.size()];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    const double t = ((q.x - a.x) * (b.x - a.x) + (q.y - a.y) * (b.y - a.y)) / (len * len);
    const double px = a.x + t * (b.x - a.x), py = a.y + t * (b.y - a.y);
    if (t >= -tol && t <= 1 + tol && std::hypot(q.x - px, q.y - py) < tol) return s + t * len;
    s += len;
  }
  return -1.0;
}

}  // namespace oracle
