#pragma once

// Analytic derivatives of the image and the objective with respect to the
// spline control points, for a frozen mesh topology.
//
// With connectivity C and provenance W fixed, the mesh vertices are the
// linear function W * N * P of the controls, so dVertex_k / dP_j = T(k, j)
// with T = W * N, applied identically to the x and y coordinates. Everything
// else is the product rule through triangle areas, quadrature points and the
// Airy kernel.

#include "curvmask/mesh.hpp"
#include "curvmask/objective.hpp"
#include "curvmask/optics.hpp"
#include "curvmask/quadrature.hpp"
#include "curvmask/spline.hpp"

#include <Eigen/Core>

#include <span>
#include <vector>

namespace curvmask {

/// K x n matrix T = W * N.
using SensitivityMatrix = Eigen::MatrixXd;

SensitivityMatrix sensitivity(const ProvenancedMesh& mesh, const CollocationMatrix& collocation);

struct GradientOptions {
  /// Test hook: evaluates dJ1(2 pi rho)/drho as pi (J0 + J2) instead of
  /// pi (J0 - J2). Only used to check that gradient verification fails.
  bool corrupt_kernel_derivative = false;
};

/// dH/drho, honouring the corruption hook.
double kernel_slope(double rho, const GradientOptions& opts = {});

/// d|S_p| / dP_kx and d|S_p| / dP_ky as N_T x n matrices.
struct AreaGradient {
  Eigen::MatrixXd dx;
  Eigen::MatrixXd dy;
};

AreaGradient area_gradient(const TriangleTensor& tensor, const SensitivityMatrix& sens,
                           std::span<const Triangle> connectivity);

/// Length-n vectors of partial derivatives with respect to P_kx and P_ky.
struct ControlGradient {
  Eigen::VectorXd dx;
  Eigen::VectorXd dy;
};

/// Derivatives of H(sample - g_pq) for quadrature point q of triangle p.
ControlGradient kernel_gradient(const TriangleTensor& tensor, int p, int q, Vec2 sample,
                                const SensitivityMatrix& sens, const TriangleQuadrature& quad,
                                std::span<const Triangle> connectivity, const GradientOptions& opts = {});

/// dU / dP_kx and dU / dP_ky for every grid sample, as (Nx * Ny) x n matrices.
struct AmplitudeGradient {
  Eigen::MatrixXd dx;
  Eigen::MatrixXd dy;
};

/// Contribution of one mesh's triangles to dU/dP for the controls whose
/// vertex sensitivities are `sens` (K x n_controls). Passing a zero block
/// gives the contribution of this mesh to another region's controls.
AmplitudeGradient amplitude_gradient_block(const ProvenancedMesh& mesh, const SensitivityMatrix& sens,
                                           const TriangleQuadrature& quad, const ImageGrid& grid,
                                           const GradientOptions& opts = {});

/// dU/dP for each region's controls. U sums over every region, but only the
/// triangles of region r move with region r's controls.
std::vector<AmplitudeGradient> amplitude_gradient(std::span<const ProvenancedMesh> meshes,
                                                  std::span<const SensitivityMatrix> sens,
                                                  const TriangleQuadrature& quad, const ImageGrid& grid,
                                                  const GradientOptions& opts = {});

/// Per-pixel factor dJ/dU = 2 (sig(I) - target) sig'(I) 2U [dx dy].
Eigen::ArrayXd objective_adjoint(const AmplitudeField& field, const TargetRaster& target, const ResistModel& model,
                                 const ImageGrid& grid, bool weight_by_cell_area = true);

/// dJ/dP per region as n x 2 matrices (columns: x, y).
std::vector<Points> objective_gradient(std::span<const ProvenancedMesh> meshes,
                                       std::span<const SensitivityMatrix> sens, const AmplitudeField& field,
                                       const TargetRaster& target, const ResistModel& model, const ImageGrid& grid,
                                       const TriangleQuadrature& quad, bool weight_by_cell_area = true,
                                       const GradientOptions& opts = {});

}  // namespace curvmask
