#pragma once

// B-spline and periodic B-spline basis evaluation, collocation, and sampling
// of closed boundary curves.
//
// Indices are 0-based throughout. A knot vector with n basis functions of
// degree p holds n + p + 1 knots; basis function i is supported on
// [knots[i], knots[i + p + 1]).

#include "curvmask/geometry.hpp"

#include <Eigen/Core>

#include <span>
#include <vector>

namespace curvmask {

/// Cox-de Boor recursion for basis function `i` of degree `p` over an
/// arbitrary non-decreasing knot array, with 0/0 := 0 and half-open degree-0
/// supports. No range checking; callers validate.
double cox_de_boor(std::span<const double> knots, std::size_t i, int p, double xi);

class KnotVector {
 public:
  KnotVector(std::vector<double> knots, int degree);

  /// n basis functions of degree p, knots equally spaced on [a, b].
  static KnotVector uniform(int basis_count, int degree, double a = 0.0, double b = 1.0);

  int degree() const { return degree_; }
  int basis_count() const { return static_cast<int>(knots_.size()) - degree_ - 1; }
  double front() const { return knots_.front(); }
  double back() const { return knots_.back(); }
  std::span<const double> knots() const { return knots_; }

  /// Value of basis function i at xi. Throws std::out_of_range for a bad
  /// index or xi outside [front(), back()].
  double basis(int i, double xi) const;

 private:
  std::vector<double> knots_;
  int degree_;
};

/// The knot vector padded with p shifted copies on each side so that every
/// periodic basis function has a full support.
class ExtendedPartition {
 public:
  explicit ExtendedPartition(const KnotVector& knots);

  int degree() const { return degree_; }
  /// Basis count of the underlying (unextended) knot vector.
  int basis_count() const { return basis_count_; }
  /// Number of periodic basis functions, n + p.
  int periodic_count() const { return basis_count_ + degree_; }
  double period() const { return period_; }
  double lower() const { return knots_[static_cast<std::size_t>(degree_)]; }
  double upper() const { return knots_[knots_.size() - 1 - static_cast<std::size_t>(degree_)]; }

  /// All n + 3p + 1 knots, starting p knots before the original first knot.
  std::span<const double> knots() const { return knots_; }

  /// Periodic basis function i in [0, n + p). For i >= n the function wraps:
  /// it is the sum of the raw basis i and the raw basis shifted back by one
  /// period. Throws std::out_of_range for a bad index.
  double periodic_basis(int i, double xi) const;

  /// Nonzero periodic basis values at xi, as (index, value) pairs. At most
  /// p + 1 entries; indices are already folded into [0, n + p).
  std::vector<std::pair<int, double>> nonzero_periodic_basis(double xi) const;

 private:
  std::vector<double> knots_;
  int degree_;
  int basis_count_;
  double period_;
};

/// One closed mask region: a periodic B-spline of the given degree whose n
/// control points repeat cyclically, sampled at m increasing parameters in
/// [0, 1).
struct PeriodicSplineRegion {
  int degree = 3;
  Points controls;
  std::vector<double> params;

  /// Uniform sample parameters t_k = k / m, k = 0..m-1.
  static PeriodicSplineRegion uniform(Points controls, int samples, int degree = 3);

  int control_count() const { return static_cast<int>(controls.rows()); }
  int sample_count() const { return static_cast<int>(params.size()); }

  /// The extended partition realizing this curve: uniform knots on [0, 1]
  /// with n - p raw basis functions, i.e. exactly n periodic ones.
  ExtendedPartition partition() const;

  /// Throws std::invalid_argument if the region cannot form a closed curve.
  void validate() const;
};

/// Dense m x n matrix of periodic basis values at the sample parameters.
using CollocationMatrix = Eigen::MatrixXd;

CollocationMatrix build_collocation(const PeriodicSplineRegion& region);

/// Q = N P for the region's current controls.
Points sample_boundary(const PeriodicSplineRegion& region);

/// Direct evaluation of the closed curve at t by summing every periodic
/// basis function against its control point.
Vec2 evaluate_curve(const PeriodicSplineRegion& region, double t);

/// The curve sampled at `count` uniform parameters (for plotting).
Points dense_curve(const PeriodicSplineRegion& region, int count);

}  // namespace curvmask
