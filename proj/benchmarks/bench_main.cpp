#include "curvmask/gradient.hpp"
#include "curvmask/pipeline.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

using namespace curvmask;

namespace {

PeriodicSplineRegion blob(int n) {
  Points p(n, 2);
  for (int k = 0; k < n; ++k) {
    const double t = 2 * std::numbers::pi * k / n;
    const double r = 0.6 + 0.1 * std::cos(3 * t);
    p.row(k) << r * std::cos(t), r * std::sin(t);
  }
  return PeriodicSplineRegion::uniform(p, 4 * n);
}

Problem problem(int pixels) {
  Problem pr;
  pr.grid = ImageGrid::centered({0, 0}, pixels, pixels, 2.0 / pixels);
  pr.target = rasterize_target(std::vector<Polygon>{{{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}}}, pr.grid);
  return pr;
}

void BM_BuildRegion(benchmark::State& state) {
  const auto spline = blob(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_region(spline, 0.01));
}
BENCHMARK(BM_BuildRegion)->Arg(12)->Arg(40);

void BM_Forward(benchmark::State& state) {
  const Problem pr = problem(static_cast<int>(state.range(0)));
  const std::vector<RegionState> regions{build_region(blob(12), pr.refine_area)};
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(pr, regions));
}
BENCHMARK(BM_Forward)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_Gradient(benchmark::State& state) {
  const Problem pr = problem(static_cast<int>(state.range(0)));
  const std::vector<RegionState> regions{build_region(blob(12), pr.refine_area)};
  const Evaluation e = evaluate(pr, regions);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_gradient(pr, regions, e));
}
BENCHMARK(BM_Gradient)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_AmplitudeGradientBlock(benchmark::State& state) {
  const Problem pr = problem(20);
  const RegionState s = build_region(blob(12), pr.refine_area);
  for (auto _ : state) benchmark::DoNotOptimize(amplitude_gradient_block(s.mesh, s.sens, pr.quad, pr.grid));
}
BENCHMARK(BM_AmplitudeGradientBlock)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
