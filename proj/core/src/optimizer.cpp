#include "curvmask/optimizer.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace curvmask {

void OptimizerConfig::validate() const {
  if (max_iters < 1) throw std::invalid_argument("optimizer.max_iters must be at least 1");
  if (!(eps > 0.0)) throw std::invalid_argument("optimizer.eps must be positive");
  if (!(alpha_eps > 0.0)) throw std::invalid_argument("optimizer.alpha_eps must be positive");
  if (!(alpha_max >= 0.0)) throw std::invalid_argument("optimizer.alpha_max must be positive (0 = auto)");
  if (alpha_max == 0.0 && !(max_displacement > 0.0))
    throw std::invalid_argument("optimizer.max_displacement must be positive");
  if (!(gs_tol > 0.0 && gs_tol < 1.0)) throw std::invalid_argument("optimizer.gs_tol must be in (0, 1)");
  if (max_halvings < 0) throw std::invalid_argument("optimizer.max_halvings must be non-negative");
}

GoldenResult golden_section(const std::function<double(double)>& phi, double a, double b, double tol) {
  if (!(b > a)) throw std::invalid_argument("golden_section: empty bracket");
  if (!(tol > 0.0)) throw std::invalid_argument("golden_section: tolerance must be positive");
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  GoldenResult best{a, std::numeric_limits<double>::infinity(), 0};
  auto eval = [&](double x) {
    const double f = phi(x);
    ++best.evaluations;
    if (f < best.value || (f == best.value && x < best.alpha)) {
      best.value = f;
      best.alpha = x;
    }
    return f;
  };
  double c = b - r * (b - a);
  double d = a + r * (b - a);
  double fc = eval(c);
  double fd = eval(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = eval(d);
    }
  }
  return best;
}

namespace {

std::vector<RegionState> build_all(const Problem& problem, const std::vector<PeriodicSplineRegion>& splines) {
  std::vector<RegionState> out;
  out.reserve(splines.size());
  for (std::size_t r = 0; r < splines.size(); ++r)
    out.push_back(build_region(splines[r], problem.refine_area, static_cast<int>(r)));
  return out;
}

struct Trial {
  std::vector<RegionState> regions;
  Evaluation eval;
};

// Rebuilds every region at P - alpha g. Boundaries that self-intersect, or
// whose mesh cannot be built, make the trial infeasible.
std::optional<Trial> try_step(const Problem& problem, const OptimizationState& state, double alpha) {
  std::vector<PeriodicSplineRegion> splines;
  splines.reserve(state.regions.size());
  for (std::size_t r = 0; r < state.regions.size(); ++r) {
    PeriodicSplineRegion s = state.regions[r].spline;
    s.controls -= alpha * state.gradient[r];
    splines.push_back(std::move(s));
  }
  try {
    Trial t{build_all(problem, splines), {}};
    t.eval = evaluate(problem, t.regions);
    if (!std::isfinite(t.eval.objective)) return std::nullopt;
    return t;
  } catch (const SelfIntersectionError&) {
    return std::nullopt;
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

}  // namespace

OptimizationState initial_state(const Problem& problem, const std::vector<PeriodicSplineRegion>& regions) {
  OptimizationState s;
  s.regions = build_all(problem, regions);
  s.eval = evaluate(problem, s.regions);
  s.gradient = evaluate_gradient(problem, s.regions, s.eval);
  s.trace.push_back({0, s.eval.objective, 0.0});
  return s;
}

StepResult step(const Problem& problem, const OptimizerConfig& cfg, OptimizationState& state) {
  double gmax = 0.0;
  for (const auto& g : state.gradient) {
    for (Eigen::Index k = 0; k < g.rows(); ++k) gmax = std::max(gmax, g.row(k).norm());
  }
  if (gmax == 0.0 || !std::isfinite(gmax)) return {};

  const double alpha_max = cfg.alpha_max > 0.0 ? cfg.alpha_max : cfg.max_displacement / gmax;
  const double j0 = state.eval.objective;

  std::optional<Trial> best;
  double best_alpha = 0.0;
  auto phi = [&](double alpha) {
    auto t = try_step(problem, state, alpha);
    if (!t) return std::numeric_limits<double>::infinity();
    const double v = t->eval.objective;
    if (!best || v < best->eval.objective || (v == best->eval.objective && alpha < best_alpha)) {
      best = std::move(t);
      best_alpha = alpha;
    }
    return v;
  };
  const GoldenResult gs = golden_section(phi, 0.0, alpha_max, cfg.gs_tol * alpha_max);

  double alpha = gs.alpha;
  for (int h = 0; h < cfg.max_halvings && !(best && best->eval.objective < j0); ++h) {
    alpha *= 0.5;
    phi(alpha);
  }
  if (!best || !(best->eval.objective < j0)) return {};

  state.regions = std::move(best->regions);
  state.eval = std::move(best->eval);
  state.gradient = evaluate_gradient(problem, state.regions, state.eval);
  ++state.iter;
  state.trace.push_back({state.iter, state.eval.objective, best_alpha});
  return {true, best_alpha};
}

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::Converged:
      return "converged";
    case StopReason::MaxIterations:
      return "max_iterations";
    case StopReason::SmallStep:
      return "small_step";
  }
  return "unknown";
}

OptimizationResult optimize(const Problem& problem, const std::vector<PeriodicSplineRegion>& regions,
                            const OptimizerConfig& cfg, const ProgressCallback& progress) {
  cfg.validate();
  OptimizationResult res{initial_state(problem, regions), StopReason::MaxIterations};
  auto& s = res.state;
  if (progress) progress(s.trace.back());
  for (int k = 0; k < cfg.max_iters; ++k) {
    if (s.eval.objective <= cfg.eps) {
      res.reason = StopReason::Converged;
      return res;
    }
    const StepResult r = step(problem, cfg, s);
    if (!r.accepted || r.alpha < cfg.alpha_eps) {
      res.reason = StopReason::SmallStep;
      return res;
    }
    if (progress) progress(s.trace.back());
  }
  if (s.eval.objective <= cfg.eps) res.reason = StopReason::Converged;
  return res;
}

Points init_controls_from_target(const Polygon& target, int n, int degree) {
  if (n < degree + 2)
    throw std::invalid_argument("need at least " + std::to_string(degree + 2) + " control points, got " +
                                std::to_string(n));
  if (target.size() < 3) throw std::invalid_argument("target polygon needs at least 3 vertices");
  const double perimeter = polygon_perimeter(std::span<const Vec2>(target));
  if (!(perimeter > 0.0)) throw std::invalid_argument("target polygon is degenerate");

  Points out(n, 2);
  const double spacing = perimeter / n;
  std::size_t edge = 0;
  double edge_start = 0.0;  // arc length at target[edge]
  for (int k = 0; k < n; ++k) {
    const double s = k * spacing;
    auto edge_length = [&](std::size_t e) {
      const Vec2 d = target[(e + 1) % target.size()] - target[e];
      return std::hypot(d.x, d.y);
    };
    while (edge + 1 < target.size() && edge_start + edge_length(edge) <= s) {
      edge_start += edge_length(edge);
      ++edge;
    }
    const double len = edge_length(edge);
    const double u = len > 0.0 ? (s - edge_start) / len : 0.0;
    const Vec2 a = target[edge];
    const Vec2 b = target[(edge + 1) % target.size()];
    out(k, 0) = a.x + u * (b.x - a.x);
    out(k, 1) = a.y + u * (b.y - a.y);
  }
  return out;
}

}  // namespace curvmask
