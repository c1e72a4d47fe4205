#include "curvmask/geometry.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>

namespace curvmask {

Points to_points(std::span<const Vec2> pts) {
  Points out(static_cast<Eigen::Index>(pts.size()), 2);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out(static_cast<Eigen::Index>(i), 0) = pts[i].x;
    out(static_cast<Eigen::Index>(i), 1) = pts[i].y;
  }
  return out;
}

std::vector<Vec2> to_vec2(const Points& pts) {
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(pts.rows()));
  for (Eigen::Index i = 0; i < pts.rows(); ++i) out.push_back(row_point(pts, i));
  return out;
}

double signed_area(Vec2 a, Vec2 b, Vec2 c) {
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
}

double polygon_signed_area(std::span<const Vec2> poly) {
  const std::size_t n = poly.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[(i + 1) % n];
    twice += a.x * b.y - b.x * a.y;
  }
  return 0.5 * twice;
}

double polygon_signed_area(const Points& poly) {
  const auto v = to_vec2(poly);
  return polygon_signed_area(std::span<const Vec2>(v));
}

double polygon_perimeter(std::span<const Vec2> poly) {
  double len = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 d = poly[(i + 1) % poly.size()] - poly[i];
    len += std::hypot(d.x, d.y);
  }
  return len;
}

bool point_in_polygon(Vec2 p, std::span<const Vec2> poly) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

bool point_in_polygon(Vec2 p, const Points& poly) {
  const auto v = to_vec2(poly);
  return point_in_polygon(p, std::span<const Vec2>(v));
}

namespace {

int orientation_sign(Vec2 a, Vec2 b, Vec2 c) {
  const double v = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  return (v > 0.0) - (v < 0.0);
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

}  // namespace

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const int o1 = orientation_sign(a, b, c);
  const int o2 = orientation_sign(a, b, d);
  const int o3 = orientation_sign(c, d, a);
  const int o4 = orientation_sign(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

bool polyline_self_intersects(const Points& loop) {
  const Eigen::Index n = loop.rows();
  if (n < 3) return true;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (row_point(loop, i) == row_point(loop, (i + 1) % n)) return true;
  }
  if (n == 3) return std::abs(signed_area(row_point(loop, 0), row_point(loop, 1), row_point(loop, 2))) == 0.0;

  // Bounding boxes prune most pairs; the O(n^2) sweep is fine for the few
  // hundred samples per region used here.
  std::vector<Eigen::AlignedBox2d> boxes(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    auto& box = boxes[static_cast<std::size_t>(i)];
    box.extend(Eigen::Vector2d(loop(i, 0), loop(i, 1)));
    box.extend(Eigen::Vector2d(loop((i + 1) % n, 0), loop((i + 1) % n, 1)));
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec2 a = row_point(loop, i);
    const Vec2 b = row_point(loop, (i + 1) % n);
    for (Eigen::Index j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // adjacent through the wrap
      if (!boxes[static_cast<std::size_t>(i)].intersects(boxes[static_cast<std::size_t>(j)])) continue;
      if (segments_intersect(a, b, row_point(loop, j), row_point(loop, (j + 1) % n))) return true;
    }
  }
  // Adjacent edges that fold back onto each other.
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec2 a = row_point(loop, (i + n - 1) % n);
    const Vec2 b = row_point(loop, i);
    const Vec2 c = row_point(loop, (i + 1) % n);
    if (orientation_sign(a, b, c) == 0) {
      const Vec2 u = b - a;
      const Vec2 v = c - b;
      if (u.x * v.x + u.y * v.y < 0.0) return true;
    }
  }
  return false;
}

}  // namespace curvmask
