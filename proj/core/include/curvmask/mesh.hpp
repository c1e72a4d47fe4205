#pragma once

// Triangulation of spline-bounded regions with provenance tracking.
//
// Every mesh vertex is a fixed convex combination of the region's boundary
// samples Q: vertices = W * Q. The first m rows of W are the identity (the
// samples themselves); each refinement vertex is the centroid of an existing
// triangle and gets the average of that triangle's three W rows. Since W only
// depends on topology, moving the samples while holding W and the
// connectivity fixed moves every vertex linearly.

#include "curvmask/geometry.hpp"
#include "curvmask/quadrature.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace curvmask {

using Triangle = std::array<int, 3>;
using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Raised when a boundary loop crosses itself and cannot be meshed.
class SelfIntersectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Triangles below this area are dropped before refinement.
inline constexpr double kSliverArea = 1e-14;

struct ProvenancedMesh {
  Points vertices;                  // K x 2
  std::vector<Triangle> triangles;  // counterclockwise vertex indices
  SparseRowMatrix provenance;       // K x m
  int region_id = 0;

  int vertex_count() const { return static_cast<int>(vertices.rows()); }
  int triangle_count() const { return static_cast<int>(triangles.size()); }
  int sample_count() const { return static_cast<int>(provenance.cols()); }

  /// Same topology and provenance, vertices recomputed as W * samples.
  ProvenancedMesh with_samples(const Points& samples) const;
};

/// Triangulates the polygon bounded by `samples` (in order, either
/// orientation). The result is the Delaunay triangulation of the samples
/// restricted to the polygon, with boundary edges kept; W = I_m.
/// Throws SelfIntersectionError if the loop is not simple.
ProvenancedMesh triangulate_region(const Points& samples, int region_id = 0);

/// Inserts centroids of triangles larger than `max_area` until none remain,
/// restoring the Delaunay property by edge flips after each insertion.
ProvenancedMesh refine_mesh(const ProvenancedMesh& mesh, double max_area);

/// Per-triangle vertex coordinates: row p of `x` / `y` holds the three
/// vertices of triangle p in counterclockwise order.
struct TriangleTensor {
  Eigen::MatrixX3d x;
  Eigen::MatrixX3d y;

  int triangle_count() const { return static_cast<int>(x.rows()); }
  Vec2 vertex(int p, int j) const { return {x(p, j), y(p, j)}; }
};

TriangleTensor assemble_tensor(const ProvenancedMesh& mesh);

/// Signed areas of all triangles in the tensor.
Eigen::VectorXd triangle_areas(const TriangleTensor& tensor);

/// Quadrature point coordinates, N_T x N_G each.
struct GaussPoints {
  Eigen::MatrixXd x;
  Eigen::MatrixXd y;
};

GaussPoints gauss_points(const TriangleTensor& tensor, const TriangleQuadrature& quad);

/// Sum of absolute triangle areas.
double polygon_area(const ProvenancedMesh& mesh);

/// Integral of f over one triangle with the given rule.
template <typename F>
double integrate_triangle(Vec2 a, Vec2 b, Vec2 c, const TriangleQuadrature& quad, F&& f) {
  double sum = 0.0;
  for (int q = 0; q < quad.size(); ++q) {
    const double la = quad.barycentric(0, q), lb = quad.barycentric(1, q), lc = quad.barycentric(2, q);
    sum += quad.weights(q) * f(la * a.x + lb * b.x + lc * c.x, la * a.y + lb * b.y + lc * c.y);
  }
  return sum * std::abs(signed_area(a, b, c));
}

}  // namespace curvmask
