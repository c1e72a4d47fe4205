#pragma once

#include <Eigen/Core>

namespace curvmask {

/// Symmetric quadrature on a triangle in barycentric form. Column q of
/// `barycentric` holds the weights of the three vertices that locate point q;
/// `weights` sum to 1 so that the rule approximates the mean value and the
/// integral is mean * area.
struct TriangleQuadrature {
  Eigen::Matrix<double, 3, Eigen::Dynamic> barycentric;
  Eigen::VectorXd weights;

  int size() const { return static_cast<int>(weights.size()); }

  /// The 4-point rule exact for polynomials of total degree 3 (centroid
  /// weight -27/48, three interior points at (3/5, 1/5, 1/5) weighted 25/48).
  static TriangleQuadrature degree3();

  /// One-point centroid rule (degree 1), used only for comparison in tests.
  static TriangleQuadrature centroid();
};

}  // namespace curvmask
