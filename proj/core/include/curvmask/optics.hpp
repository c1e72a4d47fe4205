#pragma once

// Coherent on-axis imaging: coordinate normalization, the Airy amplitude
// kernel, and the forward aerial image of triangulated mask regions.
//
// All lengths inside the library are normalized by lambda0 / NA. Mask-plane
// coordinates additionally carry the factor -M, so with M = -1 both planes
// share one scale.

#include "curvmask/geometry.hpp"
#include "curvmask/mesh.hpp"
#include "curvmask/quadrature.hpp"

#include <Eigen/Core>

#include <span>

namespace curvmask {

struct OpticalConfig {
  double lambda0_nm = 193.0;
  double na = 0.93;
  double magnification = -1.0;

  /// lambda0 / NA in nm.
  double length_unit_nm() const { return lambda0_nm / na; }
  void validate() const;
};

Vec2 normalize_mask_point(Vec2 p_nm, const OpticalConfig& cfg);
Vec2 denormalize_mask_point(Vec2 p, const OpticalConfig& cfg);
Vec2 normalize_image_point(Vec2 p_nm, const OpticalConfig& cfg);
Vec2 denormalize_image_point(Vec2 p, const OpticalConfig& cfg);

Points normalize_mask_points(const Points& p_nm, const OpticalConfig& cfg);
Points denormalize_mask_points(const Points& p, const OpticalConfig& cfg);

/// Below this radius the kernel switches to its Taylor expansion.
inline constexpr double kSmallRho = 1e-6;

/// H(rho) = J1(2 pi rho) / rho, with H(0) = pi.
double psf_radial(double rho);

/// Amplitude kernel at offset (dx, dy) between image and object points.
double psf(double dx, double dy);

/// dH/drho = [pi (J0(2 pi rho) - J2(2 pi rho)) rho - J1(2 pi rho)] / rho^2,
/// taken as 0 below kSmallRho where H has its smooth maximum.
double psf_radial_slope(double rho);

/// Equidistant image-plane lattice in normalized coordinates. Sample (i, j)
/// sits at origin + (i, j) * pitch; fields are stored with index j * nx + i.
struct ImageGrid {
  int nx = 0;
  int ny = 0;
  Vec2 origin;
  double pitch = 0.0;

  /// nx x ny lattice whose sample midpoint is `center`.
  static ImageGrid centered(Vec2 center, int nx, int ny, double pitch);

  int size() const { return nx * ny; }
  int index(int i, int j) const { return j * nx + i; }
  double x(int i) const { return origin.x + i * pitch; }
  double y(int j) const { return origin.y + j * pitch; }
  Vec2 sample(int i, int j) const { return {x(i), y(j)}; }
  /// Delta x * Delta y.
  double cell_area() const { return pitch * pitch; }
  void validate() const;
};

/// Real amplitude U on an image grid (the coherent on-axis kernel is real).
struct AmplitudeField {
  int nx = 0;
  int ny = 0;
  Eigen::ArrayXd values;
};

/// Quadrature points of a mesh flattened in triangle-major order, each with
/// weight W_q * |S_p|.
struct QuadratureCloud {
  Eigen::ArrayXd x;
  Eigen::ArrayXd y;
  Eigen::ArrayXd weight;
};

QuadratureCloud quadrature_cloud(const ProvenancedMesh& mesh, const TriangleQuadrature& quad);

/// U at every grid sample: the sum over all regions, triangles and
/// quadrature points of W_q H(sample - g_pq) |S_p|.
AmplitudeField forward_amplitude(std::span<const ProvenancedMesh> meshes, const TriangleQuadrature& quad,
                                 const ImageGrid& grid);

/// I = U * conj(U); for a real field, U^2.
Eigen::ArrayXd intensity(const AmplitudeField& field);

}  // namespace curvmask
