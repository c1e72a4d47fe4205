#include "curvmask/mesh.hpp"
#include "curvmask/quadrature.hpp"
#include "curvmask/spline.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>
#include <random>

using namespace curvmask;

namespace {

Points make_points(std::initializer_list<std::pair<double, double>> pts) {
  Points p(static_cast<Eigen::Index>(pts.size()), 2);
  Eigen::Index k = 0;
  for (const auto& [x, y] : pts) p.row(k++) << x, y;
  return p;
}

Points regular_polygon(int m, double r, double phase = 0.0) {
  Points p(m, 2);
  for (int k = 0; k < m; ++k) {
    const double t = phase + 2.0 * std::numbers::pi * k / m;
    p.row(k) << r * std::cos(t), r * std::sin(t);
  }
  return p;
}

double dense_provenance_error(const ProvenancedMesh& mesh, const Points& samples) {
  const Points rebuilt = mesh.provenance * samples;
  return (rebuilt - mesh.vertices).cwiseAbs().maxCoeff();
}

void expect_valid_provenance(const ProvenancedMesh& mesh) {
  const Eigen::MatrixXd w = Eigen::MatrixXd(mesh.provenance);
  const int m = mesh.sample_count();
  EXPECT_TRUE(w.topRows(m).isIdentity(0.0));
  for (Eigen::Index r = 0; r < w.rows(); ++r) {
    EXPECT_NEAR(w.row(r).sum(), 1.0, 1e-14);
    EXPECT_GE(w.row(r).minCoeff(), 0.0);
    EXPECT_LE(w.row(r).maxCoeff(), 1.0);
  }
}

void expect_positive_triangles(const ProvenancedMesh& mesh) {
  const Eigen::VectorXd a = triangle_areas(assemble_tensor(mesh));
  for (Eigen::Index p = 0; p < a.size(); ++p) EXPECT_GT(a(p), 0.0) << "triangle " << p;
}

}  // namespace

TEST(SignedArea, Examples) {
  EXPECT_DOUBLE_EQ(signed_area({0, 0}, {1, 0}, {0, 1}), 0.5);
  EXPECT_DOUBLE_EQ(signed_area({0, 0}, {0, 1}, {1, 0}), -0.5);
  EXPECT_DOUBLE_EQ(signed_area({0, 0}, {1, 1}, {2, 2}), 0.0);
}

TEST(Triangulate, UnitSquare) {
  const Points sq = make_points({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  const ProvenancedMesh mesh = triangulate_region(sq);
  EXPECT_EQ(mesh.triangle_count(), 2);
  EXPECT_NEAR(polygon_area(mesh), 1.0, 1e-15);
  expect_positive_triangles(mesh);
  expect_valid_provenance(mesh);
}

TEST(Triangulate, ConvexPolygonFan) {
  for (int m : {5, 9, 16, 33}) {
    const Points poly = regular_polygon(m, 1.3, 0.2);
    const ProvenancedMesh mesh = triangulate_region(poly);
    EXPECT_EQ(mesh.triangle_count(), m - 2);
    EXPECT_NEAR(polygon_area(mesh), std::abs(polygon_signed_area(poly)), 1e-13);
    expect_positive_triangles(mesh);
  }
}

TEST(Triangulate, LShapeDropsExterior) {
  const Points l = make_points({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}});
  const ProvenancedMesh mesh = triangulate_region(l);
  EXPECT_EQ(mesh.triangle_count(), 4);
  EXPECT_NEAR(polygon_area(mesh), 3.0, 1e-14);
  // No triangle covers the notch.
  const auto t = assemble_tensor(mesh);
  for (int p = 0; p < t.triangle_count(); ++p) {
    const Vec2 c{t.x.row(p).mean(), t.y.row(p).mean()};
    EXPECT_FALSE(c.x > 1.0 && c.y > 1.0);
  }
}

TEST(Triangulate, ClockwiseInputIsReoriented) {
  const Points cw = make_points({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
  const ProvenancedMesh mesh = triangulate_region(cw);
  expect_positive_triangles(mesh);
  EXPECT_NEAR(polygon_area(mesh), 1.0, 1e-15);
}

TEST(Triangulate, DelaunayOnConvexInput) {
  // No vertex of a convex polygon lies inside the circumcircle of a triangle.
  const Points poly = make_points({{0, 0}, {3, 0}, {4, 1}, {4, 3}, {2, 4}, {-0.5, 2.5}, {-1, 1}});
  const ProvenancedMesh mesh = triangulate_region(poly);
  for (const auto& tri : mesh.triangles) {
    const Vec2 a = row_point(mesh.vertices, tri[0]), b = row_point(mesh.vertices, tri[1]),
               c = row_point(mesh.vertices, tri[2]);
    for (Eigen::Index k = 0; k < poly.rows(); ++k) {
      if (k == tri[0] || k == tri[1] || k == tri[2]) continue;
      const Vec2 d = row_point(poly, k);
      const double adx = a.x - d.x, ady = a.y - d.y, bdx = b.x - d.x, bdy = b.y - d.y, cdx = c.x - d.x,
                   cdy = c.y - d.y;
      const double det = (adx * adx + ady * ady) * (bdx * cdy - cdx * bdy) -
                         (bdx * bdx + bdy * bdy) * (adx * cdy - cdx * ady) +
                         (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady);
      EXPECT_LE(det, 1e-12);
    }
  }
}

TEST(Triangulate, Errors) {
  EXPECT_THROW(triangulate_region(make_points({{0, 0}, {1, 0}})), std::invalid_argument);
  const Points bowtie = make_points({{0, 0}, {1, 1}, {1, 0}, {0, 1}});
  EXPECT_THROW(triangulate_region(bowtie), SelfIntersectionError);
}

TEST(Refine, SingleTriangleOnePass) {
  const Points tri = make_points({{0, 0}, {1, 0}, {0, 1}});
  const ProvenancedMesh base = triangulate_region(tri);
  const ProvenancedMesh mesh = refine_mesh(base, 0.2);
  EXPECT_EQ(mesh.vertex_count(), 4);
  EXPECT_EQ(mesh.triangle_count(), 3);
  const Eigen::MatrixXd w = Eigen::MatrixXd(mesh.provenance);
  for (int j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(w(3, j), 1.0 / 3.0);
  EXPECT_NEAR(mesh.vertices(3, 0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(mesh.vertices(3, 1), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(polygon_area(mesh), 0.5, 1e-15);
}

TEST(Refine, UnitSquareProvenanceAndArea) {
  const Points sq = make_points({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  const ProvenancedMesh mesh = refine_mesh(triangulate_region(sq), 0.01);
  EXPECT_LT(dense_provenance_error(mesh, sq), 1e-12);
  EXPECT_NEAR(polygon_area(mesh), 1.0, 1e-12);
  const Eigen::VectorXd a = triangle_areas(assemble_tensor(mesh));
  EXPECT_LE(a.maxCoeff(), 0.01);
  expect_positive_triangles(mesh);
  expect_valid_provenance(mesh);
}

TEST(Refine, RepeatedRefinementKeepsInvariants) {
  Points spl(10, 2);
  for (int k = 0; k < 10; ++k) {
    const double t = 2 * std::numbers::pi * k / 10;
    spl.row(k) << (1.0 + 0.3 * std::cos(3 * t)) * std::cos(t), (1.0 + 0.3 * std::cos(3 * t)) * std::sin(t);
  }
  const Points q = sample_boundary(PeriodicSplineRegion::uniform(spl, 60));
  ProvenancedMesh mesh = triangulate_region(q);
  const double area0 = polygon_area(mesh);
  EXPECT_NEAR(area0, std::abs(polygon_signed_area(q)), 1e-12);
  for (double tol : {0.2, 0.05, 0.01, 0.003}) {
    mesh = refine_mesh(mesh, tol);
    EXPECT_LT(dense_provenance_error(mesh, q), 1e-12);
    EXPECT_NEAR(polygon_area(mesh), area0, 1e-12);
    expect_positive_triangles(mesh);
    expect_valid_provenance(mesh);
  }
}

TEST(Refine, RejectsNonPositiveTolerance) {
  const ProvenancedMesh mesh = triangulate_region(make_points({{0, 0}, {1, 0}, {0, 1}}));
  EXPECT_THROW(refine_mesh(mesh, 0.0), std::invalid_argument);
  EXPECT_THROW(refine_mesh(mesh, -1.0), std::invalid_argument);
}

TEST(Refine, FrozenTopologyFollowsSamples) {
  const Points sq = make_points({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  const ProvenancedMesh mesh = refine_mesh(triangulate_region(sq), 0.05);
  Points moved = sq;
  moved(2, 0) = 1.4;
  const ProvenancedMesh m2 = mesh.with_samples(moved);
  EXPECT_EQ(m2.triangles, mesh.triangles);
  EXPECT_LT(dense_provenance_error(m2, moved), 1e-15);
}

TEST(Tensor, MatchesConnectivity) {
  const ProvenancedMesh mesh = refine_mesh(triangulate_region(regular_polygon(12, 1.0)), 0.05);
  const TriangleTensor t = assemble_tensor(mesh);
  ASSERT_EQ(t.triangle_count(), mesh.triangle_count());
  for (int p = 0; p < t.triangle_count(); ++p) {
    for (int j = 0; j < 3; ++j) {
      EXPECT_EQ(t.x(p, j), mesh.vertices(mesh.triangles[p][j], 0));
      EXPECT_EQ(t.y(p, j), mesh.vertices(mesh.triangles[p][j], 1));
    }
  }
  expect_positive_triangles(mesh);
}

TEST(Tensor, ConnectivityPermutationKeepsAreas) {
  ProvenancedMesh mesh = refine_mesh(triangulate_region(regular_polygon(9, 1.0)), 0.1);
  const Eigen::VectorXd a = triangle_areas(assemble_tensor(mesh)).cwiseAbs();
  for (auto& tri : mesh.triangles) std::swap(tri[0], tri[1]);
  const Eigen::VectorXd b = triangle_areas(assemble_tensor(mesh)).cwiseAbs();
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Quadrature, RuleShape) {
  const auto q = TriangleQuadrature::degree3();
  ASSERT_EQ(q.size(), 4);
  EXPECT_NEAR(q.weights.sum(), 1.0, 1e-15);
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(q.barycentric.col(k).sum(), 1.0, 1e-15);
  EXPECT_NEAR(q.weights(0), -27.0 / 48.0, 1e-15);
}

TEST(Quadrature, CentroidGaussPoint) {
  const ProvenancedMesh mesh = triangulate_region(make_points({{0, 0}, {1, 0}, {0, 1}}));
  const GaussPoints g = gauss_points(assemble_tensor(mesh), TriangleQuadrature::centroid());
  EXPECT_NEAR(g.x(0, 0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(g.y(0, 0), 1.0 / 3.0, 1e-15);
}

TEST(Quadrature, ReferenceTriangleMonomials) {
  const auto q = TriangleQuadrature::degree3();
  const Vec2 a{0, 0}, b{1, 0}, c{0, 1};
  EXPECT_NEAR(integrate_triangle(a, b, c, q, [](double x, double) { return x * x * x; }), 1.0 / 20.0, 1e-15);
  EXPECT_NEAR(integrate_triangle(a, b, c, q, [](double x, double) { return x; }), 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(oracle::monomial_integral(a, b, c, 3, 0), 1.0 / 20.0, 1e-15);
  EXPECT_NEAR(oracle::monomial_integral(a, b, c, 1, 1), 1.0 / 24.0, 1e-15);
}

TEST(Quadrature, ConstantIntegratesToArea) {
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(-3, 3);
  const auto q = TriangleQuadrature::degree3();
  for (int t = 0; t < 50; ++t) {
    const Vec2 a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)};
    EXPECT_NEAR(integrate_triangle(a, b, c, q, [](double, double) { return 1.0; }), std::abs(signed_area(a, b, c)),
                1e-13);
  }
}

TEST(Quadrature, DegreeThreeExactness) {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(0.1, 1.1);
  const auto q = TriangleQuadrature::degree3();
  for (int t = 0; t < 100; ++t) {
    Vec2 a, b, c;
    do {
      a = {u(rng), u(rng)};
      b = {u(rng), u(rng)};
      c = {u(rng), u(rng)};
    } while (std::abs(signed_area(a, b, c)) < 1e-3);
    for (int i = 0; i <= 3; ++i) {
      for (int j = 0; i + j <= 3; ++j) {
        const double got = integrate_triangle(a, b, c, q, [&](double x, double y) {
          return std::pow(x, i) * std::pow(y, j);
        });
        const double ref = oracle::monomial_integral(a, b, c, i, j);
        EXPECT_LT(std::abs(got - ref) / std::abs(ref), 1e-12) << "x^" << i << " y^" << j;
      }
    }
  }
}

TEST(Quadrature, CentroidRuleIsNotDegreeThree) {
  const Vec2 a{0, 0}, b{1, 0}, c{0, 1};
  const double got =
      integrate_triangle(a, b, c, TriangleQuadrature::centroid(), [](double x, double) { return x * x * x; });
  EXPECT_GT(std::abs(got - 1.0 / 20.0), 1e-3);
}

TEST(PolygonArea, UnitSquareAndRefinement) {
  const Points sq = make_points({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  const ProvenancedMesh mesh = triangulate_region(sq);
  EXPECT_DOUBLE_EQ(polygon_area(mesh), 1.0);
  EXPECT_NEAR(polygon_area(refine_mesh(mesh, 0.02)), 1.0, 1e-12);
}

TEST(PolygonArea, CircleConvergesQuadratically) {
  const double r = 0.5;
  const double exact = std::numbers::pi * r * r;
  for (int m : {32, 64, 128}) {
    const double e1 = exact - polygon_area(triangulate_region(regular_polygon(m, r)));
    const double e2 = exact - polygon_area(triangulate_region(regular_polygon(2 * m, r)));
    EXPECT_NEAR(e1 / e2, 4.0, 0.6) << "m=" << m;
  }
}
