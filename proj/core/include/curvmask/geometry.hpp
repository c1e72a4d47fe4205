#pragma once

#include <Eigen/Core>

#include <span>
#include <vector>

namespace curvmask {

/// Planar point / vector.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) = default;
};

/// An ordered list of planar points stored as a K x 2 matrix (column 0 = x,
/// column 1 = y). Control points, boundary samples and mesh vertices all use
/// this layout so the linear maps between them are plain matrix products.
using Points = Eigen::Matrix<double, Eigen::Dynamic, 2>;

/// A closed polygon given by its vertices in order (no repeated endpoint).
using Polygon = std::vector<Vec2>;

inline Vec2 row_point(const Points& pts, Eigen::Index i) { return {pts(i, 0), pts(i, 1)}; }

Points to_points(std::span<const Vec2> pts);
std::vector<Vec2> to_vec2(const Points& pts);

/// Half the cross product (b - a) x (c - a); positive iff a, b, c are
/// counterclockwise.
double signed_area(Vec2 a, Vec2 b, Vec2 c);

/// Shoelace area of a closed polyline, positive for counterclockwise order.
double polygon_signed_area(std::span<const Vec2> poly);
double polygon_signed_area(const Points& poly);

double polygon_perimeter(std::span<const Vec2> poly);

/// Even-odd ray casting test.
bool point_in_polygon(Vec2 p, std::span<const Vec2> poly);
bool point_in_polygon(Vec2 p, const Points& poly);

/// True if the closed segments [a,b] and [c,d] share at least one point.
bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d);

/// True if any two non-adjacent edges of the closed polyline intersect, or if
/// two consecutive vertices coincide.
bool polyline_self_intersects(const Points& loop);

}  // namespace curvmask
