#include "curvmask/optimizer.hpp"
#include "curvmask/parallel.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace curvmask;

namespace {

// Desk-scale square: 200 nm target on a 20 x 20 grid with 20 nm pixels.
struct SquareCase {
  Problem problem;
  std::vector<PeriodicSplineRegion> regions;
};

SquareCase square_case() {
  const OpticalConfig opt;
  SquareCase sc;
  Polygon target;
  for (Vec2 v : std::vector<Vec2>{{-100, -100}, {100, -100}, {100, 100}, {-100, 100}})
    target.push_back(normalize_image_point(v, opt));
  const double pitch = 20.0 / opt.length_unit_nm();
  sc.problem.grid = ImageGrid::centered({0, 0}, 20, 20, pitch);
  sc.problem.target = rasterize_target(std::vector<Polygon>{target}, sc.problem.grid);
  sc.regions.push_back(PeriodicSplineRegion::uniform(init_controls_from_target(target, 12), 48));
  return sc;
}

}  // namespace

TEST(GoldenSection, Quadratic) {
  const double tol = 1e-6;
  const auto r = golden_section([](double a) { return (a - 1) * (a - 1); }, 0.0, 3.0, tol);
  EXPECT_NEAR(r.alpha, 1.0, tol);
}

TEST(GoldenSection, MonotoneIncreasing) {
  const double tol = 1e-4;
  const auto r = golden_section([](double a) { return a; }, 0.0, 2.0, tol);
  EXPECT_LE(r.alpha, tol);
}

TEST(GoldenSection, MatchesDenseScan) {
  auto phi = [](double a) { return (a - 0.37) * (a - 0.37) + 0.1 * std::pow(std::sin(10 * a), 2); };
  // Dense scan on the basin around 0.37.
  double best = 0.2, fbest = phi(0.2);
  for (double a = 0.2; a <= 0.5; a += 1e-5) {
    if (phi(a) < fbest) {
      fbest = phi(a);
      best = a;
    }
  }
  const double tol = 1e-4;
  const auto r = golden_section(phi, 0.2, 0.5, tol);
  EXPECT_NEAR(r.alpha, best, tol);
}

TEST(GoldenSection, InfiniteTrialsShrinkTowardZero) {
  // Feasible only below 0.05; beyond that every trial is rejected.
  auto phi = [](double a) { return a < 0.05 ? 1.0 - a : std::numeric_limits<double>::infinity(); };
  const auto r = golden_section(phi, 0.0, 1.0, 1e-4);
  EXPECT_LT(r.alpha, 0.05);
  EXPECT_TRUE(std::isfinite(r.value));
  EXPECT_THROW(golden_section(phi, 1.0, 1.0, 1e-3), std::invalid_argument);
}

TEST(InitControls, SquareCorners) {
  const Polygon sq{{0, 0}, {2, 0}, {2, 2}, {0, 2}};
  const Points p = init_controls_from_target(sq, 8);
  ASSERT_EQ(p.rows(), 8);
  for (int k : {0, 2, 4, 6}) {
    const Vec2 c = sq[static_cast<std::size_t>(k / 2)];
    EXPECT_NEAR(p(k, 0), c.x, 1e-15);
    EXPECT_NEAR(p(k, 1), c.y, 1e-15);
  }
}

TEST(InitControls, TranslationEquivariant) {
  const Polygon sq{{0, 0}, {3, 0}, {3, 1}, {0, 1}};
  Polygon moved;
  for (auto v : sq) moved.push_back({v.x + 7.0, v.y - 2.0});
  const Points a = init_controls_from_target(sq, 10), b = init_controls_from_target(moved, 10);
  EXPECT_LT((b.col(0).array() - a.col(0).array() - 7.0).abs().maxCoeff(), 1e-12);
  EXPECT_LT((b.col(1).array() - a.col(1).array() + 2.0).abs().maxCoeff(), 1e-12);
}

TEST(InitControls, LShapeArcLengthSpacing) {
  const Polygon l{{0, 0}, {150, 0}, {150, 75}, {75, 75}, {75, 150}, {0, 150}};
  ASSERT_NEAR(polygon_perimeter(std::span<const Vec2>(l)), 600.0, 1e-12);
  const Points p = init_controls_from_target(l, 12);
  for (int k = 0; k < 12; ++k) EXPECT_NEAR(oracle::arc_position(l, row_point(p, k)), 50.0 * k, 1e-9) << k;
}

TEST(InitControls, TooFewControls) {
  const Polygon sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  EXPECT_THROW(init_controls_from_target(sq, 4), std::invalid_argument);
  EXPECT_NO_THROW(init_controls_from_target(sq, 5));
}

TEST(Step, ZeroGradientLeavesStateUnchanged) {
  const SquareCase sc = square_case();
  OptimizationState s = initial_state(sc.problem, sc.regions);
  for (auto& g : s.gradient) g.setZero();
  const Points before = s.regions[0].spline.controls;
  const StepResult r = step(sc.problem, OptimizerConfig{}, s);
  EXPECT_FALSE(r.accepted);
  EXPECT_EQ(r.alpha, 0.0);
  EXPECT_EQ(s.iter, 0);
  EXPECT_TRUE((s.regions[0].spline.controls.array() == before.array()).all());
}

TEST(Step, SquareStepDecreasesAndRegenerates) {
  const SquareCase sc = square_case();
  OptimizationState s = initial_state(sc.problem, sc.regions);
  const double j0 = s.eval.objective;
  const StepResult r = step(sc.problem, OptimizerConfig{}, s);
  ASSERT_TRUE(r.accepted);
  EXPECT_GT(r.alpha, 0.0);
  EXPECT_LT(s.eval.objective, j0);
  const RegionState& st = s.regions[0];
  // Fresh state at the new controls.
  EXPECT_LT((st.samples - st.collocation * st.spline.controls).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((Points(st.mesh.provenance * st.samples) - st.mesh.vertices).cwiseAbs().maxCoeff(), 1e-12);
  const Eigen::VectorXd a = triangle_areas(assemble_tensor(st.mesh));
  EXPECT_GT(a.minCoeff(), 0.0);
  EXPECT_LE(a.maxCoeff(), sc.problem.refine_area);
  const Evaluation again = evaluate(sc.problem, s.regions);
  EXPECT_EQ(again.objective, s.eval.objective);
}

TEST(Optimize, StopsImmediatelyWhenConverged) {
  const SquareCase sc = square_case();
  OptimizerConfig cfg;
  cfg.eps = 10.0;  // above the initial J
  const OptimizationResult r = optimize(sc.problem, sc.regions, cfg);
  EXPECT_EQ(r.reason, StopReason::Converged);
  EXPECT_EQ(r.state.iter, 0);
  EXPECT_EQ(r.state.trace.size(), 1u);
}

TEST(Optimize, SingleIterationBudget) {
  const SquareCase sc = square_case();
  OptimizerConfig cfg;
  cfg.max_iters = 1;
  const OptimizationResult r = optimize(sc.problem, sc.regions, cfg);
  EXPECT_EQ(r.state.iter, 1);
  EXPECT_EQ(r.state.trace.size(), 2u);
  EXPECT_EQ(r.reason, StopReason::MaxIterations);
}

TEST(Optimize, TraceIsMonotoneAndDeterministic) {
  const SquareCase sc = square_case();
  OptimizerConfig cfg;
  cfg.max_iters = 4;
  set_thread_count(1);
  const OptimizationResult a = optimize(sc.problem, sc.regions, cfg);
  set_thread_count(3);
  const OptimizationResult b = optimize(sc.problem, sc.regions, cfg);
  set_thread_count(0);
  ASSERT_EQ(a.state.trace.size(), b.state.trace.size());
  for (std::size_t k = 0; k < a.state.trace.size(); ++k) {
    EXPECT_EQ(a.state.trace[k].objective, b.state.trace[k].objective);
    EXPECT_EQ(a.state.trace[k].alpha, b.state.trace[k].alpha);
    if (k > 0) {
      EXPECT_LE(a.state.trace[k].objective, a.state.trace[k - 1].objective + 1e-12);
    }
  }
  EXPECT_LE(a.state.iter, cfg.max_iters);
}

TEST(Optimize, SelfIntersectingStartThrows) {
  SquareCase sc = square_case();
  Points& p = sc.regions[0].controls;
  // Swap two far-apart controls to fold the loop over itself.
  p.row(1).swap(p.row(7));
  p.row(2).swap(p.row(8));
  EXPECT_THROW(optimize(sc.problem, sc.regions, OptimizerConfig{}), SelfIntersectionError);
}

TEST(OptimizerConfigTest, Validation) {
  OptimizerConfig c;
  EXPECT_NO_THROW(c.validate());
  c.max_iters = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.eps = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.alpha_max = -1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}
