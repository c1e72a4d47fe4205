#include "curvmask/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace curvmask {

namespace {

constexpr double kSeriesLimit = 4.0;
constexpr double kAsymptoticFrom = 17.0;

double series(int n, double x) {
  double term = 1.0;
  for (int k = 1; k <= n; ++k) term *= 0.5 * x / k;
  const double q = 0.25 * x * x;
  double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= -q / (k * (k + n));
    sum += term;
    if (std::abs(term) < 1e-17 * std::max(1.0, std::abs(sum)) && k > 4) break;
  }
  return sum;
}

// Miller backward recurrence normalised by J0 + 2 sum J_2k = 1. Stable for
// mid-range x where the power series loses digits to cancellation.
double miller(int n, double x) {
  const int start = 2 * static_cast<int>((x + 36.0) / 2.0);
  const double r = 2.0 / x;
  double jp1 = 0.0, j = 1e-30, norm = 0.0, want = 0.0;
  for (int k = start; k > 0; --k) {
    const double jm1 = k * r * j - jp1;
    jp1 = j;
    j = jm1;
    if (k - 1 == n) want = j;
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * j;
    if (std::abs(j) > 1e200) {
      j *= 1e-200;
      jp1 *= 1e-200;
      norm *= 1e-200;
      want *= 1e-200;
    }
  }
  norm += j;
  return want / norm;
}

// Hankel expansion J_n(x) ~ sqrt(2/(pi x)) (P cos chi - Q sin chi), summed
// until the terms stop decreasing.
double asymptotic(int n, double x) {
  const double mu = 4.0 * n * n;
  double a = 1.0;
  double best = std::numeric_limits<double>::infinity();
  double p = 1.0, q = 0.0;
  for (int k = 1; k < 80; ++k) {
    a *= (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (k * 8.0 * x);
    if (std::abs(a) > best || a == 0.0) break;
    best = std::abs(a);
    const double sign = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 1) {
      q += (((k - 1) / 2) % 2 == 0 ? 1.0 : -1.0) * a;
    } else {
      p += sign * a;
    }
  }
  const double chi = x - (0.5 * n + 0.25) * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace

double bessel_j(int order, double x) {
  if (order < 0 || order > 2) throw std::invalid_argument("bessel_j: order must be 0, 1 or 2");
  if (!std::isfinite(x)) throw std::invalid_argument("bessel_j: non-finite argument");
  const double parity = (x < 0.0 && order % 2 == 1) ? -1.0 : 1.0;
  const double ax = std::abs(x);
  if (ax <= kSeriesLimit) return parity * series(order, ax);
  if (ax < kAsymptoticFrom) return parity * miller(order, ax);
  return parity * asymptotic(order, ax);
}

}  // namespace curvmask
