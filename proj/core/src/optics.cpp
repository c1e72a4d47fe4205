#include "curvmask/optics.hpp"

#include "curvmask/bessel.hpp"
#include "curvmask/parallel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace curvmask {

void OpticalConfig::validate() const {
  if (!(lambda0_nm > 0.0)) throw std::invalid_argument("optical.lambda0_nm must be positive");
  if (!(na > 0.0 && na < 1.5)) throw std::invalid_argument("optical.na must be in (0, 1.5)");
  if (magnification == 0.0 || !std::isfinite(magnification))
    throw std::invalid_argument("optical.magnification must be nonzero");
}

Vec2 normalize_mask_point(Vec2 p, const OpticalConfig& cfg) {
  const double s = -cfg.magnification / cfg.length_unit_nm();
  return {s * p.x, s * p.y};
}

Vec2 denormalize_mask_point(Vec2 p, const OpticalConfig& cfg) {
  const double s = -cfg.lambda0_nm / (cfg.magnification * cfg.na);
  return {s * p.x, s * p.y};
}

Vec2 normalize_image_point(Vec2 p, const OpticalConfig& cfg) {
  const double s = 1.0 / cfg.length_unit_nm();
  return {s * p.x, s * p.y};
}

Vec2 denormalize_image_point(Vec2 p, const OpticalConfig& cfg) {
  const double s = cfg.lambda0_nm / cfg.na;
  return {s * p.x, s * p.y};
}

Points normalize_mask_points(const Points& p, const OpticalConfig& cfg) {
  return p * (-cfg.magnification / cfg.length_unit_nm());
}

Points denormalize_mask_points(const Points& p, const OpticalConfig& cfg) {
  return p * (-cfg.lambda0_nm / (cfg.magnification * cfg.na));
}

double psf_radial(double rho) {
  constexpr double pi = std::numbers::pi;
  rho = std::abs(rho);
  if (rho < kSmallRho) return pi - 0.5 * pi * pi * pi * rho * rho;
  return bessel_j(1, 2.0 * pi * rho) / rho;
}

double psf(double dx, double dy) { return psf_radial(std::hypot(dx, dy)); }

double psf_radial_slope(double rho) {
  constexpr double pi = std::numbers::pi;
  rho = std::abs(rho);
  if (rho < kSmallRho) return 0.0;
  // d/drho [J1(2 pi rho) / rho] collapses to -2 pi J2(2 pi rho) / rho.
  return -2.0 * pi * bessel_j(2, 2.0 * pi * rho) / rho;
}

ImageGrid ImageGrid::centered(Vec2 center, int nx, int ny, double pitch) {
  ImageGrid g;
  g.nx = nx;
  g.ny = ny;
  g.pitch = pitch;
  g.origin = {center.x - 0.5 * (nx - 1) * pitch, center.y - 0.5 * (ny - 1) * pitch};
  return g;
}

void ImageGrid::validate() const {
  if (nx < 2 || ny < 2) throw std::invalid_argument("image grid needs at least 2 x 2 samples");
  if (!(pitch > 0.0)) throw std::invalid_argument("image grid pitch must be positive");
}

QuadratureCloud quadrature_cloud(const ProvenancedMesh& mesh, const TriangleQuadrature& quad) {
  const TriangleTensor tensor = assemble_tensor(mesh);
  const GaussPoints g = gauss_points(tensor, quad);
  const Eigen::VectorXd areas = triangle_areas(tensor);
  const int nt = tensor.triangle_count();
  const int ng = quad.size();
  QuadratureCloud cloud;
  cloud.x.resize(nt * ng);
  cloud.y.resize(nt * ng);
  cloud.weight.resize(nt * ng);
  for (int p = 0; p < nt; ++p) {
    for (int q = 0; q < ng; ++q) {
      cloud.x(p * ng + q) = g.x(p, q);
      cloud.y(p * ng + q) = g.y(p, q);
      cloud.weight(p * ng + q) = quad.weights(q) * std::abs(areas(p));
    }
  }
  return cloud;
}

AmplitudeField forward_amplitude(std::span<const ProvenancedMesh> meshes, const TriangleQuadrature& quad,
                                 const ImageGrid& grid) {
  grid.validate();
  std::vector<QuadratureCloud> clouds;
  clouds.reserve(meshes.size());
  for (const auto& mesh : meshes) clouds.push_back(quadrature_cloud(mesh, quad));

  AmplitudeField field{grid.nx, grid.ny, Eigen::ArrayXd::Zero(grid.size())};
  parallel_for(static_cast<std::size_t>(grid.size()), [&](std::size_t idx) {
    const int i = static_cast<int>(idx) % grid.nx;
    const int j = static_cast<int>(idx) / grid.nx;
    const double xs = grid.x(i), ys = grid.y(j);
    double u = 0.0;
    for (const auto& cloud : clouds) {
      for (Eigen::Index k = 0; k < cloud.x.size(); ++k)
        u += cloud.weight(k) * psf(xs - cloud.x(k), ys - cloud.y(k));
    }
    field.values(static_cast<Eigen::Index>(idx)) = u;
  });
  return field;
}

Eigen::ArrayXd intensity(const AmplitudeField& field) { return field.values.square(); }

}  // namespace curvmask
