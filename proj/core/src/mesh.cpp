#include "curvmask/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>

namespace curvmask {

namespace {

using SparseRow = std::vector<std::pair<int, double>>;

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

// d strictly inside the circumcircle of the counterclockwise triangle abc.
bool in_circumcircle(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;
  const double ad = adx * adx + ady * ady;
  const double bd = bdx * bdx + bdy * bdy;
  const double cd = cdx * cdx + cdy * cdy;
  const double det = adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
  const double scale = std::max({ad, bd, cd});
  // Cocircular configurations (squares, regular polygons) stay unflipped.
  return det > 1e-12 * scale * scale;
}

// Triangle soup with edge adjacency, supporting Lawson flips and centroid
// splits. Edges referenced by a single triangle are the region boundary and
// are never flipped.
class FlipMesh {
 public:
  FlipMesh(std::vector<Vec2> pts, std::vector<Triangle> tris) : pts_(std::move(pts)), tris_(std::move(tris)) {
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t) link(t);
  }

  std::vector<Vec2>& points() { return pts_; }
  const std::vector<Triangle>& triangles() const { return tris_; }

  double area(int t) const {
    const auto& tri = tris_[static_cast<std::size_t>(t)];
    return signed_area(pts_[tri[0]], pts_[tri[1]], pts_[tri[2]]);
  }

  void legalize_all() {
    std::vector<std::pair<int, int>> stack;
    for (const auto& tri : tris_) {
      for (int j = 0; j < 3; ++j) stack.emplace_back(tri[j], tri[(j + 1) % 3]);
    }
    std::reverse(stack.begin(), stack.end());
    legalize(std::move(stack));
  }

  // Replaces triangle t by three triangles fanning around new vertex v.
  void split(int t, int v) {
    const Triangle tri = tris_[static_cast<std::size_t>(t)];
    unlink(t);
    tris_[static_cast<std::size_t>(t)] = {tri[0], tri[1], v};
    tris_.push_back({tri[1], tri[2], v});
    tris_.push_back({tri[2], tri[0], v});
    link(t);
    link(static_cast<int>(tris_.size()) - 2);
    link(static_cast<int>(tris_.size()) - 1);
    legalize({{tri[2], tri[0]}, {tri[1], tri[2]}, {tri[0], tri[1]}});
  }

 private:
  void link(int t) {
    const auto& tri = tris_[static_cast<std::size_t>(t)];
    for (int j = 0; j < 3; ++j) {
      auto [it, inserted] = edges_.try_emplace(edge_key(tri[j], tri[(j + 1) % 3]), std::array<int, 2>{-1, -1});
      auto& slot = it->second;
      if (slot[0] < 0) {
        slot[0] = t;
      } else if (slot[1] < 0) {
        slot[1] = t;
      } else {
        throw std::logic_error("mesh: edge shared by more than two triangles");
      }
    }
  }

  void unlink(int t) {
    const auto& tri = tris_[static_cast<std::size_t>(t)];
    for (int j = 0; j < 3; ++j) {
      auto it = edges_.find(edge_key(tri[j], tri[(j + 1) % 3]));
      auto& slot = it->second;
      if (slot[0] == t) {
        slot[0] = slot[1];
        slot[1] = -1;
      } else if (slot[1] == t) {
        slot[1] = -1;
      }
      if (slot[0] < 0) edges_.erase(it);
    }
  }

  // Vertex following edge u->v in triangle t, or -1 if t does not traverse u->v.
  int apex(int t, int u, int v) const {
    const auto& tri = tris_[static_cast<std::size_t>(t)];
    for (int j = 0; j < 3; ++j) {
      if (tri[j] == u && tri[(j + 1) % 3] == v) return tri[(j + 2) % 3];
    }
    return -1;
  }

  void legalize(std::vector<std::pair<int, int>> stack) {
    std::size_t flips = 0;
    const std::size_t max_flips = 64 * (tris_.size() + 16) * (tris_.size() + 16);
    while (!stack.empty()) {
      auto [u, v] = stack.back();
      stack.pop_back();
      auto it = edges_.find(edge_key(u, v));
      if (it == edges_.end() || it->second[1] < 0) continue;
      int t1 = it->second[0];
      int t2 = it->second[1];
      int a = u, b = v;
      int c = apex(t1, a, b);
      if (c < 0) {
        std::swap(a, b);
        c = apex(t1, a, b);
      }
      const int d = apex(t2, b, a);
      if (c < 0 || d < 0) throw std::logic_error("mesh: inconsistent edge adjacency");

      const Vec2 pa = pts_[a], pb = pts_[b], pc = pts_[c], pd = pts_[d];
      if (!in_circumcircle(pa, pb, pc, pd)) continue;
      if (signed_area(pa, pd, pc) <= 0.0 || signed_area(pd, pb, pc) <= 0.0) continue;
      if (++flips > max_flips) throw std::runtime_error("mesh: edge flipping did not terminate");

      unlink(t1);
      unlink(t2);
      tris_[static_cast<std::size_t>(t1)] = {a, d, c};
      tris_[static_cast<std::size_t>(t2)] = {d, b, c};
      link(t1);
      link(t2);
      stack.emplace_back(a, d);
      stack.emplace_back(d, b);
      stack.emplace_back(b, c);
      stack.emplace_back(c, a);
    }
  }

  std::vector<Vec2> pts_;
  std::vector<Triangle> tris_;
  std::unordered_map<std::uint64_t, std::array<int, 2>> edges_;
};

bool inside_or_on(Vec2 a, Vec2 b, Vec2 c, Vec2 p) {
  return signed_area(a, b, p) >= 0.0 && signed_area(b, c, p) >= 0.0 && signed_area(c, a, p) >= 0.0;
}

// Ear clipping of a simple counterclockwise polygon given as indices into pts.
std::vector<Triangle> clip_ears(const std::vector<Vec2>& pts, std::vector<int> ring) {
  std::vector<Triangle> tris;
  tris.reserve(ring.size());
  std::size_t cursor = 0;
  while (ring.size() > 3) {
    const std::size_t n = ring.size();
    bool clipped = false;
    for (std::size_t attempt = 0; attempt < n && !clipped; ++attempt) {
      const std::size_t i = (cursor + attempt) % n;
      const int prev = ring[(i + n - 1) % n], cur = ring[i], next = ring[(i + 1) % n];
      const Vec2 a = pts[prev], b = pts[cur], c = pts[next];
      if (signed_area(a, b, c) <= 0.0) continue;
      bool ear = true;
      for (const int w : ring) {
        if (w == prev || w == cur || w == next) continue;
        const Vec2 p = pts[w];
        if (p == a || p == b || p == c) continue;
        if (inside_or_on(a, b, c, p)) {
          ear = false;
          break;
        }
      }
      if (!ear) continue;
      tris.push_back({prev, cur, next});
      ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(i));
      cursor = i == 0 ? 0 : i - 1;
      clipped = true;
    }
    if (clipped) continue;

    // No strictly convex ear: drop the flattest reflex-or-collinear vertex.
    std::size_t best = n;
    double best_area = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double s = signed_area(pts[ring[(i + n - 1) % n]], pts[ring[i]], pts[ring[(i + 1) % n]]);
      if (best == n || std::abs(s) < best_area) {
        best = i;
        best_area = std::abs(s);
      }
    }
    const Vec2 lo = pts[ring[0]];
    double scale = 0.0;
    for (const int w : ring) scale = std::max({scale, std::abs(pts[w].x - lo.x), std::abs(pts[w].y - lo.y)});
    if (best_area > 1e-12 * scale * scale)
      throw SelfIntersectionError("mesh: boundary polygon could not be triangulated");
    ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(best));
    cursor = 0;
  }
  if (signed_area(pts[ring[0]], pts[ring[1]], pts[ring[2]]) > 0.0) tris.push_back({ring[0], ring[1], ring[2]});
  return tris;
}

std::vector<SparseRow> rows_of(const SparseRowMatrix& w) {
  std::vector<SparseRow> rows(static_cast<std::size_t>(w.rows()));
  for (Eigen::Index r = 0; r < w.outerSize(); ++r) {
    for (SparseRowMatrix::InnerIterator it(w, r); it; ++it)
      rows[static_cast<std::size_t>(r)].emplace_back(static_cast<int>(it.col()), it.value());
  }
  return rows;
}

SparseRowMatrix matrix_of(const std::vector<SparseRow>& rows, int cols) {
  std::vector<Eigen::Triplet<double>> trips;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (const auto& [c, v] : rows[r]) trips.emplace_back(static_cast<int>(r), c, v);
  }
  SparseRowMatrix w(static_cast<Eigen::Index>(rows.size()), cols);
  w.setFromTriplets(trips.begin(), trips.end());
  return w;
}

SparseRow centroid_row(const SparseRow& a, const SparseRow& b, const SparseRow& c) {
  std::map<int, double> acc;
  for (const auto* row : {&a, &b, &c}) {
    for (const auto& [col, v] : *row) acc[col] += v / 3.0;
  }
  return {acc.begin(), acc.end()};
}

}  // namespace

ProvenancedMesh ProvenancedMesh::with_samples(const Points& samples) const {
  if (samples.rows() != provenance.cols())
    throw std::invalid_argument("mesh: sample count does not match provenance matrix");
  ProvenancedMesh out = *this;
  out.vertices = provenance * samples;
  return out;
}

ProvenancedMesh triangulate_region(const Points& samples, int region_id) {
  const int m = static_cast<int>(samples.rows());
  if (m < 3) throw std::invalid_argument("mesh: need at least 3 boundary samples, got " + std::to_string(m));
  if (!samples.allFinite()) throw std::invalid_argument("mesh: non-finite boundary sample");
  if (polyline_self_intersects(samples)) throw SelfIntersectionError("mesh: boundary is self-intersecting");

  std::vector<Vec2> pts = to_vec2(samples);
  std::vector<int> ring(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) ring[static_cast<std::size_t>(i)] = i;
  if (polygon_signed_area(std::span<const Vec2>(pts)) < 0.0) std::reverse(ring.begin(), ring.end());

  std::vector<Triangle> tris = clip_ears(pts, std::move(ring));
  std::erase_if(tris, [&](const Triangle& t) { return signed_area(pts[t[0]], pts[t[1]], pts[t[2]]) < kSliverArea; });

  FlipMesh fm(std::move(pts), std::move(tris));
  fm.legalize_all();

  ProvenancedMesh mesh;
  mesh.vertices = samples;
  mesh.triangles = fm.triangles();
  SparseRowMatrix identity(m, m);
  identity.setIdentity();
  mesh.provenance = std::move(identity);
  mesh.region_id = region_id;
  return mesh;
}

ProvenancedMesh refine_mesh(const ProvenancedMesh& mesh, double max_area) {
  if (!(max_area > 0.0)) throw std::invalid_argument("mesh: refinement area tolerance must be positive");

  std::vector<Triangle> tris = mesh.triangles;
  std::vector<Vec2> pts = to_vec2(mesh.vertices);
  std::erase_if(tris, [&](const Triangle& t) { return signed_area(pts[t[0]], pts[t[1]], pts[t[2]]) < kSliverArea; });
  std::vector<SparseRow> rows = rows_of(mesh.provenance);

  FlipMesh fm(std::move(pts), std::move(tris));
  const std::size_t max_vertices = 2'000'000;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int t = 0; t < static_cast<int>(fm.triangles().size()); ++t) {
      if (fm.area(t) <= max_area) continue;
      const Triangle tri = fm.triangles()[static_cast<std::size_t>(t)];
      auto& p = fm.points();
      p.push_back((1.0 / 3.0) * (p[tri[0]] + p[tri[1]] + p[tri[2]]));
      rows.push_back(centroid_row(rows[tri[0]], rows[tri[1]], rows[tri[2]]));
      if (p.size() > max_vertices) throw std::runtime_error("mesh: refinement exceeded vertex budget");
      fm.split(t, static_cast<int>(p.size()) - 1);
      changed = true;
    }
  }

  ProvenancedMesh out;
  out.vertices = to_points(fm.points());
  out.triangles = fm.triangles();
  out.provenance = matrix_of(rows, mesh.sample_count());
  out.region_id = mesh.region_id;
  return out;
}

TriangleTensor assemble_tensor(const ProvenancedMesh& mesh) {
  TriangleTensor tensor;
  const auto nt = static_cast<Eigen::Index>(mesh.triangles.size());
  tensor.x.resize(nt, 3);
  tensor.y.resize(nt, 3);
  for (Eigen::Index p = 0; p < nt; ++p) {
    const auto& tri = mesh.triangles[static_cast<std::size_t>(p)];
    for (int j = 0; j < 3; ++j) {
      tensor.x(p, j) = mesh.vertices(tri[j], 0);
      tensor.y(p, j) = mesh.vertices(tri[j], 1);
    }
  }
  return tensor;
}

Eigen::VectorXd triangle_areas(const TriangleTensor& tensor) {
  Eigen::VectorXd areas(tensor.triangle_count());
  for (int p = 0; p < tensor.triangle_count(); ++p)
    areas(p) = signed_area(tensor.vertex(p, 0), tensor.vertex(p, 1), tensor.vertex(p, 2));
  return areas;
}

GaussPoints gauss_points(const TriangleTensor& tensor, const TriangleQuadrature& quad) {
  return {tensor.x * quad.barycentric, tensor.y * quad.barycentric};
}

double polygon_area(const ProvenancedMesh& mesh) {
  return triangle_areas(assemble_tensor(mesh)).cwiseAbs().sum();
}

}  // namespace curvmask
