#pragma once

// Glue from control points to objective value and gradient. All coordinates
// here are normalized.

#include "curvmask/gradient.hpp"
#include "curvmask/mesh.hpp"
#include "curvmask/objective.hpp"
#include "curvmask/optics.hpp"
#include "curvmask/quadrature.hpp"
#include "curvmask/spline.hpp"

#include <span>
#include <vector>

namespace curvmask {

/// Everything derived from one region's control points.
struct RegionState {
  PeriodicSplineRegion spline;
  CollocationMatrix collocation;  // m x n
  Points samples;                 // Q = N P
  ProvenancedMesh mesh;
  SensitivityMatrix sens;  // T = W N
};

/// Samples the boundary, triangulates, refines to `refine_area` and builds T.
/// Throws SelfIntersectionError if the sampled boundary is not simple.
RegionState build_region(const PeriodicSplineRegion& spline, double refine_area, int region_id = 0);

/// Same topology and provenance as `base`, with vertices moved to W N P for
/// the new controls.
RegionState with_controls(const RegionState& base, const Points& controls);

struct Problem {
  ResistModel resist;
  ImageGrid grid;
  TargetRaster target;
  TriangleQuadrature quad = TriangleQuadrature::degree3();
  double refine_area = 0.02;
  bool weight_by_cell_area = true;
};

struct Evaluation {
  AmplitudeField field;
  Eigen::ArrayXd intensity;
  double objective = 0.0;
};

std::vector<ProvenancedMesh> meshes_of(std::span<const RegionState> regions);

Evaluation evaluate(const Problem& problem, std::span<const RegionState> regions);

/// dJ/dP per region (n x 2), topology frozen at the given states.
std::vector<Points> evaluate_gradient(const Problem& problem, std::span<const RegionState> regions,
                                      const Evaluation& eval, const GradientOptions& opts = {});

}  // namespace curvmask
