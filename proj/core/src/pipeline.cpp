#include "curvmask/pipeline.hpp"

#include <stdexcept>

namespace curvmask {

RegionState build_region(const PeriodicSplineRegion& spline, double refine_area, int region_id) {
  spline.validate();
  RegionState s;
  s.spline = spline;
  s.collocation = build_collocation(spline);
  s.samples = s.collocation * spline.controls;
  s.mesh = refine_mesh(triangulate_region(s.samples, region_id), refine_area);
  s.sens = sensitivity(s.mesh, s.collocation);
  return s;
}

RegionState with_controls(const RegionState& base, const Points& controls) {
  if (controls.rows() != base.spline.controls.rows())
    throw std::invalid_argument("with_controls: control count changed");
  RegionState s = base;
  s.spline.controls = controls;
  s.samples = s.collocation * controls;
  s.mesh = base.mesh.with_samples(s.samples);
  return s;
}

std::vector<ProvenancedMesh> meshes_of(std::span<const RegionState> regions) {
  std::vector<ProvenancedMesh> out;
  out.reserve(regions.size());
  for (const auto& r : regions) out.push_back(r.mesh);
  return out;
}

Evaluation evaluate(const Problem& problem, std::span<const RegionState> regions) {
  const auto meshes = meshes_of(regions);
  Evaluation e;
  e.field = forward_amplitude(meshes, problem.quad, problem.grid);
  e.intensity = intensity(e.field);
  e.objective = objective_value(e.intensity, problem.target, problem.resist, problem.grid, problem.weight_by_cell_area);
  return e;
}

std::vector<Points> evaluate_gradient(const Problem& problem, std::span<const RegionState> regions,
                                      const Evaluation& eval, const GradientOptions& opts) {
  const auto meshes = meshes_of(regions);
  std::vector<SensitivityMatrix> sens;
  sens.reserve(regions.size());
  for (const auto& r : regions) sens.push_back(r.sens);
  return objective_gradient(meshes, sens, eval.field, problem.target, problem.resist, problem.grid, problem.quad,
                            problem.weight_by_cell_area, opts);
}

}  // namespace curvmask
