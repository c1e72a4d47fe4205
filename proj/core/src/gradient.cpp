#include "curvmask/gradient.hpp"

#include "curvmask/bessel.hpp"
#include "curvmask/parallel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace curvmask {

namespace {

// Controls that move at least one vertex of a triangle, with the per-vertex
// sensitivities T(C(p, j), k) for each of them.
struct TriangleSupport {
  std::vector<int> controls;
  std::vector<std::array<double, 3>> vertex_sens;
};

std::vector<TriangleSupport> triangle_supports(const SensitivityMatrix& sens, std::span<const Triangle> connectivity) {
  std::vector<TriangleSupport> out(connectivity.size());
  for (std::size_t p = 0; p < connectivity.size(); ++p) {
    const auto& tri = connectivity[p];
    for (Eigen::Index k = 0; k < sens.cols(); ++k) {
      const std::array<double, 3> s{sens(tri[0], k), sens(tri[1], k), sens(tri[2], k)};
      if (s[0] == 0.0 && s[1] == 0.0 && s[2] == 0.0) continue;
      out[p].controls.push_back(static_cast<int>(k));
      out[p].vertex_sens.push_back(s);
    }
  }
  return out;
}

}  // namespace

SensitivityMatrix sensitivity(const ProvenancedMesh& mesh, const CollocationMatrix& collocation) {
  if (mesh.provenance.cols() != collocation.rows())
    throw std::invalid_argument("sensitivity: provenance has " + std::to_string(mesh.provenance.cols()) +
                                " columns but collocation has " + std::to_string(collocation.rows()) + " rows");
  return mesh.provenance * collocation;
}

double kernel_slope(double rho, const GradientOptions& opts) {
  if (!opts.corrupt_kernel_derivative) return psf_radial_slope(rho);
  constexpr double pi = std::numbers::pi;
  rho = std::abs(rho);
  if (rho < kSmallRho) return 0.0;
  const double z = 2.0 * pi * rho;
  return (pi * (bessel_j(0, z) + bessel_j(2, z)) * rho - bessel_j(1, z)) / (rho * rho);
}

AreaGradient area_gradient(const TriangleTensor& tensor, const SensitivityMatrix& sens,
                           std::span<const Triangle> connectivity) {
  const int nt = tensor.triangle_count();
  if (static_cast<std::size_t>(nt) != connectivity.size())
    throw std::invalid_argument("area_gradient: tensor and connectivity sizes differ");
  AreaGradient g{Eigen::MatrixXd::Zero(nt, sens.cols()), Eigen::MatrixXd::Zero(nt, sens.cols())};
  const auto supports = triangle_supports(sens, connectivity);
  for (int p = 0; p < nt; ++p) {
    const double ax = tensor.x(p, 0), bx = tensor.x(p, 1), cx = tensor.x(p, 2);
    const double ay = tensor.y(p, 0), by = tensor.y(p, 1), cy = tensor.y(p, 2);
    const auto& sup = supports[static_cast<std::size_t>(p)];
    for (std::size_t s = 0; s < sup.controls.size(); ++s) {
      const auto [ta, tb, tc] = sup.vertex_sens[s];
      const int k = sup.controls[s];
      g.dx(p, k) = 0.5 * ((tb - ta) * (cy - ay) - (by - ay) * (tc - ta));
      g.dy(p, k) = 0.5 * ((bx - ax) * (tc - ta) - (tb - ta) * (cx - ax));
    }
  }
  return g;
}

ControlGradient kernel_gradient(const TriangleTensor& tensor, int p, int q, Vec2 sample,
                                const SensitivityMatrix& sens, const TriangleQuadrature& quad,
                                std::span<const Triangle> connectivity, const GradientOptions& opts) {
  const auto n = sens.cols();
  ControlGradient g{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
  const auto& tri = connectivity[static_cast<std::size_t>(p)];
  const double la = quad.barycentric(0, q), lb = quad.barycentric(1, q), lc = quad.barycentric(2, q);
  const double xo = la * tensor.x(p, 0) + lb * tensor.x(p, 1) + lc * tensor.x(p, 2);
  const double yo = la * tensor.y(p, 0) + lb * tensor.y(p, 1) + lc * tensor.y(p, 2);
  const double rho = std::hypot(sample.x - xo, sample.y - yo);
  if (rho < kSmallRho) return g;
  const double slope = kernel_slope(rho, opts);
  for (Eigen::Index k = 0; k < n; ++k) {
    // d x_o / d P_kx and d y_o / d P_ky coincide: both are L^T T(C(p,:), k).
    const double dgo = la * sens(tri[0], k) + lb * sens(tri[1], k) + lc * sens(tri[2], k);
    if (dgo == 0.0) continue;
    g.dx(k) = slope * (xo - sample.x) / rho * dgo;
    g.dy(k) = slope * (yo - sample.y) / rho * dgo;
  }
  return g;
}

AmplitudeGradient amplitude_gradient_block(const ProvenancedMesh& mesh, const SensitivityMatrix& sens,
                                           const TriangleQuadrature& quad, const ImageGrid& grid,
                                           const GradientOptions& opts) {
  grid.validate();
  if (sens.rows() != mesh.vertex_count())
    throw std::invalid_argument("amplitude_gradient: sensitivity rows do not match mesh vertices");
  const auto n = sens.cols();
  AmplitudeGradient out{Eigen::MatrixXd::Zero(grid.size(), n), Eigen::MatrixXd::Zero(grid.size(), n)};

  const TriangleTensor tensor = assemble_tensor(mesh);
  const GaussPoints gp = gauss_points(tensor, quad);
  const Eigen::VectorXd areas = triangle_areas(tensor);
  const AreaGradient dS = area_gradient(tensor, sens, mesh.triangles);
  const auto supports = triangle_supports(sens, mesh.triangles);
  const int nt = tensor.triangle_count();
  const int ng = quad.size();

  // Quadrature-point sensitivities per (triangle, point, active control).
  std::vector<std::vector<double>> dgo(static_cast<std::size_t>(nt));
  for (int p = 0; p < nt; ++p) {
    const auto& sup = supports[static_cast<std::size_t>(p)];
    auto& d = dgo[static_cast<std::size_t>(p)];
    d.resize(sup.controls.size() * static_cast<std::size_t>(ng));
    for (int q = 0; q < ng; ++q) {
      for (std::size_t s = 0; s < sup.controls.size(); ++s) {
        const auto& t = sup.vertex_sens[s];
        d[static_cast<std::size_t>(q) * sup.controls.size() + s] =
            quad.barycentric(0, q) * t[0] + quad.barycentric(1, q) * t[1] + quad.barycentric(2, q) * t[2];
      }
    }
  }

  parallel_for(static_cast<std::size_t>(grid.size()), [&](std::size_t idx) {
    const auto row = static_cast<Eigen::Index>(idx);
    const Vec2 s = grid.sample(static_cast<int>(idx) % grid.nx, static_cast<int>(idx) / grid.nx);
    for (int p = 0; p < nt; ++p) {
      const auto& sup = supports[static_cast<std::size_t>(p)];
      if (sup.controls.empty()) continue;
      const double area = std::abs(areas(p));
      const double sign = areas(p) < 0.0 ? -1.0 : 1.0;
      for (int q = 0; q < ng; ++q) {
        const double ex = gp.x(p, q) - s.x;
        const double ey = gp.y(p, q) - s.y;
        const double rho = std::hypot(ex, ey);
        const double h = psf_radial(rho);
        const double coef = rho < kSmallRho ? 0.0 : kernel_slope(rho, opts) / rho;
        const double wq = quad.weights(q);
        const double* d = dgo[static_cast<std::size_t>(p)].data() + static_cast<std::size_t>(q) * sup.controls.size();
        for (std::size_t c = 0; c < sup.controls.size(); ++c) {
          const int k = sup.controls[c];
          out.dx(row, k) += wq * (coef * ex * d[c] * area + h * sign * dS.dx(p, k));
          out.dy(row, k) += wq * (coef * ey * d[c] * area + h * sign * dS.dy(p, k));
        }
      }
    }
  });
  return out;
}

std::vector<AmplitudeGradient> amplitude_gradient(std::span<const ProvenancedMesh> meshes,
                                                  std::span<const SensitivityMatrix> sens,
                                                  const TriangleQuadrature& quad, const ImageGrid& grid,
                                                  const GradientOptions& opts) {
  if (meshes.size() != sens.size()) throw std::invalid_argument("amplitude_gradient: one sensitivity per mesh");
  std::vector<AmplitudeGradient> out;
  out.reserve(meshes.size());
  for (std::size_t r = 0; r < meshes.size(); ++r)
    out.push_back(amplitude_gradient_block(meshes[r], sens[r], quad, grid, opts));
  return out;
}

Eigen::ArrayXd objective_adjoint(const AmplitudeField& field, const TargetRaster& target, const ResistModel& model,
                                 const ImageGrid& grid, bool weight_by_cell_area) {
  if (field.values.size() != static_cast<Eigen::Index>(target.values.size()) || field.values.size() != grid.size())
    throw std::invalid_argument("objective gradient: field, target and grid shapes differ");
  const double w = weight_by_cell_area ? grid.cell_area() : 1.0;
  Eigen::ArrayXd lambda(field.values.size());
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    const double u = field.values(k);
    const double i = u * u;
    const double residual = sigmoid(i, model) - target.values[static_cast<std::size_t>(k)];
    lambda(k) = 2.0 * residual * sigmoid_derivative(i, model) * 2.0 * u * w;
  }
  return lambda;
}

std::vector<Points> objective_gradient(std::span<const ProvenancedMesh> meshes,
                                       std::span<const SensitivityMatrix> sens, const AmplitudeField& field,
                                       const TargetRaster& target, const ResistModel& model, const ImageGrid& grid,
                                       const TriangleQuadrature& quad, bool weight_by_cell_area,
                                       const GradientOptions& opts) {
  if (meshes.size() != sens.size()) throw std::invalid_argument("objective_gradient: one sensitivity per mesh");
  const Eigen::ArrayXd lambda = objective_adjoint(field, target, model, grid, weight_by_cell_area);
  const int ng = quad.size();

  std::vector<Points> out;
  out.reserve(meshes.size());
  for (std::size_t r = 0; r < meshes.size(); ++r) {
    const ProvenancedMesh& mesh = meshes[r];
    const TriangleTensor tensor = assemble_tensor(mesh);
    const GaussPoints gp = gauss_points(tensor, quad);
    const Eigen::VectorXd areas = triangle_areas(tensor);
    const int nt = tensor.triangle_count();

    // Per image row, accumulate for each triangle dJ/d|S_p| and dJ/dg_pq
    // already pushed onto the three vertices through L. Rows are merged in
    // order so the result does not depend on the thread count.
    const auto stride = static_cast<std::size_t>(nt) * 7;
    std::vector<double> rows(static_cast<std::size_t>(grid.ny) * stride, 0.0);
    parallel_for(static_cast<std::size_t>(grid.ny), [&](std::size_t j) {
      double* acc = rows.data() + j * stride;
      for (int i = 0; i < grid.nx; ++i) {
        const double lam = lambda(grid.index(i, static_cast<int>(j)));
        if (lam == 0.0) continue;
        const Vec2 s = grid.sample(i, static_cast<int>(j));
        for (int p = 0; p < nt; ++p) {
          double* a = acc + static_cast<std::size_t>(p) * 7;
          const double area = std::abs(areas(p));
          for (int q = 0; q < ng; ++q) {
            const double ex = gp.x(p, q) - s.x;
            const double ey = gp.y(p, q) - s.y;
            const double rho = std::hypot(ex, ey);
            const double wq = lam * quad.weights(q);
            a[0] += wq * psf_radial(rho);
            if (rho < kSmallRho) continue;
            const double c = wq * area * kernel_slope(rho, opts) / rho;
            for (int v = 0; v < 3; ++v) {
              a[1 + 2 * v] += c * quad.barycentric(v, q) * ex;
              a[2 + 2 * v] += c * quad.barycentric(v, q) * ey;
            }
          }
        }
      }
    });

    Eigen::MatrixXd vertex_adj = Eigen::MatrixXd::Zero(mesh.vertex_count(), 2);
    for (int p = 0; p < nt; ++p) {
      std::array<double, 7> a{};
      for (int j = 0; j < grid.ny; ++j) {
        const double* src = rows.data() + static_cast<std::size_t>(j) * stride + static_cast<std::size_t>(p) * 7;
        for (int c = 0; c < 7; ++c) a[static_cast<std::size_t>(c)] += src[c];
      }
      const auto& tri = mesh.triangles[static_cast<std::size_t>(p)];
      const double ax = tensor.x(p, 0), bx = tensor.x(p, 1), cx = tensor.x(p, 2);
      const double ay = tensor.y(p, 0), by = tensor.y(p, 1), cy = tensor.y(p, 2);
      const double ds = (areas(p) < 0.0 ? -1.0 : 1.0) * a[0];
      const std::array<double, 3> dsdx{0.5 * (by - cy), 0.5 * (cy - ay), 0.5 * (ay - by)};
      const std::array<double, 3> dsdy{0.5 * (cx - bx), 0.5 * (ax - cx), 0.5 * (bx - ax)};
      for (int v = 0; v < 3; ++v) {
        vertex_adj(tri[v], 0) += ds * dsdx[static_cast<std::size_t>(v)] + a[static_cast<std::size_t>(1 + 2 * v)];
        vertex_adj(tri[v], 1) += ds * dsdy[static_cast<std::size_t>(v)] + a[static_cast<std::size_t>(2 + 2 * v)];
      }
    }
    out.emplace_back(sens[r].transpose() * vertex_adj);
  }
  return out;
}

}  // namespace curvmask
