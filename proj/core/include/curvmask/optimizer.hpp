#pragma once

#include "curvmask/pipeline.hpp"

#include <functional>
#include <string>
#include <vector>

namespace curvmask {

struct OptimizerConfig {
  int max_iters = 100;
  double eps = 1e-4;        // stop once J <= eps
  double alpha_eps = 1e-4;  // stop once the accepted step length drops below this
  /// Line-search bracket [0, alpha_max]. 0 picks it per step so that the
  /// largest control displacement equals `max_displacement`.
  double alpha_max = 0.0;
  double max_displacement = 0.5;
  double gs_tol = 1e-3;  // golden-section tolerance, relative to the bracket
  int max_halvings = 8;

  void validate() const;
};

struct GoldenResult {
  double alpha = 0.0;
  double value = 0.0;
  int evaluations = 0;
};

/// Golden-section search for a minimum of phi on [a, b]. Stops when the
/// bracket is narrower than `tol` and returns the best point evaluated.
/// Infinite values are allowed; ties keep the left part of the bracket.
GoldenResult golden_section(const std::function<double(double)>& phi, double a, double b, double tol);

struct TraceEntry {
  int iter = 0;
  double objective = 0.0;
  double alpha = 0.0;
};

struct OptimizationState {
  std::vector<RegionState> regions;
  Evaluation eval;
  std::vector<Points> gradient;
  int iter = 0;
  std::vector<TraceEntry> trace;
};

/// Initial state: builds every region and evaluates J and its gradient.
/// Throws SelfIntersectionError if any starting boundary is not simple.
OptimizationState initial_state(const Problem& problem, const std::vector<PeriodicSplineRegion>& regions);

struct StepResult {
  bool accepted = false;
  double alpha = 0.0;
};

/// One steepest-descent step with a golden-section line search. On success the
/// state is rebuilt at the new controls (fresh mesh, provenance and T).
StepResult step(const Problem& problem, const OptimizerConfig& cfg, OptimizationState& state);

enum class StopReason { Converged, MaxIterations, SmallStep };

std::string to_string(StopReason reason);

struct OptimizationResult {
  OptimizationState state;
  StopReason reason = StopReason::MaxIterations;
};

using ProgressCallback = std::function<void(const TraceEntry&)>;

OptimizationResult optimize(const Problem& problem, const std::vector<PeriodicSplineRegion>& regions,
                            const OptimizerConfig& cfg, const ProgressCallback& progress = {});

/// n controls at equal arc-length spacing along the polygon, starting at its
/// first vertex.
Points init_controls_from_target(const Polygon& target, int n, int degree = 3);

}  // namespace curvmask
