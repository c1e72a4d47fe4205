#include "curvmask/quadrature.hpp"

namespace curvmask {

TriangleQuadrature TriangleQuadrature::degree3() {
  TriangleQuadrature rule;
  rule.barycentric.resize(3, 4);
  rule.barycentric.col(0) << 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0;
  rule.barycentric.col(1) << 0.6, 0.2, 0.2;
  rule.barycentric.col(2) << 0.2, 0.6, 0.2;
  rule.barycentric.col(3) << 0.2, 0.2, 0.6;
  rule.weights.resize(4);
  rule.weights << -27.0 / 48.0, 25.0 / 48.0, 25.0 / 48.0, 25.0 / 48.0;
  return rule;
}

TriangleQuadrature TriangleQuadrature::centroid() {
  TriangleQuadrature rule;
  rule.barycentric.resize(3, 1);
  rule.barycentric.col(0) << 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0;
  rule.weights.resize(1);
  rule.weights << 1.0;
  return rule;
}

}  // namespace curvmask
