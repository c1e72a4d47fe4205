#include "curvmask/app/commands.hpp"

#include "curvmask/app/io.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace curvmask::app {

namespace fs = std::filesystem;

namespace {

std::vector<RegionState> build_states(const Scenario& sc) {
  std::vector<RegionState> out;
  for (std::size_t r = 0; r < sc.regions.size(); ++r)
    out.push_back(build_region(sc.regions[r], sc.problem.refine_area, static_cast<int>(r)));
  return out;
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw std::runtime_error("cannot create output directory " + dir.string());
}

nlohmann::json write_images(const fs::path& dir, const std::string& suffix, const Scenario& sc, const Evaluation& e) {
  const auto& g = sc.problem.grid;
  const PrintResult pr = print_and_epe(e.intensity, sc.problem.target, sc.problem.resist);
  write_pgm(dir / ("intensity" + suffix + ".pgm"), e.intensity, g.nx, g.ny);
  write_pgm(dir / ("print" + suffix + ".pgm"), pr.print, g.nx, g.ny);
  write_pgm(dir / ("epe" + suffix + ".pgm"), pr.epe, g.nx, g.ny);
  const int printed = static_cast<int>(std::count(pr.print.begin(), pr.print.end(), 1));
  return {{"J", e.objective},
          {"epe_count", pr.epe_count},
          {"print_count", printed},
          {"target_count", sc.problem.target.count()}};
}

// Runs fn and maps exceptions onto exit codes.
template <typename F>
int guarded(std::ostream& log, F&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const SelfIntersectionError& e) {
    log << "error: initial mask boundary is self-intersecting (" << e.what() << ")\n";
    return kRuntimeError;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
}

}  // namespace

GradcheckReport run_gradcheck(const Scenario& sc, const GradientOptions& opts, double h) {
  const std::vector<RegionState> base = build_states(sc);
  const Evaluation e0 = evaluate(sc.problem, base);
  const auto grad = evaluate_gradient(sc.problem, base, e0, opts);

  GradcheckReport rep;
  for (std::size_t r = 0; r < base.size(); ++r) {
    const Points& p0 = base[r].spline.controls;
    for (Eigen::Index k = 0; k < p0.rows(); ++k) {
      for (int c = 0; c < 2; ++c) {
        std::vector<RegionState> plus = base, minus = base;
        Points pp = p0, pm = p0;
        pp(k, c) += h;
        pm(k, c) -= h;
        plus[r] = with_controls(base[r], pp);
        minus[r] = with_controls(base[r], pm);
        const double fd = (evaluate(sc.problem, plus).objective - evaluate(sc.problem, minus).objective) / (2.0 * h);
        GradcheckRow row{static_cast<int>(r), static_cast<int>(k), c == 0 ? 'x' : 'y', grad[r](k, c), fd, 0.0};
        row.error = std::abs(row.analytic - fd) / std::max(1.0, std::abs(fd));
        rep.max_error = std::max(rep.max_error, row.error);
        rep.rows.push_back(row);
      }
    }
  }

  // Region s's samples do not depend on region r's controls, so the cross
  // collocation block is zero and T_sr = W_s * 0.
  for (std::size_t r = 0; r < base.size(); ++r) {
    for (std::size_t s = 0; s < base.size(); ++s) {
      if (r == s) continue;
      const CollocationMatrix cross = CollocationMatrix::Zero(base[s].samples.rows(), base[r].spline.controls.rows());
      const SensitivityMatrix t = sensitivity(base[s].mesh, cross);
      const AmplitudeGradient g = amplitude_gradient_block(base[s].mesh, t, sc.problem.quad, sc.problem.grid, opts);
      const double m = std::max(g.dx.cwiseAbs().maxCoeff(), g.dy.cwiseAbs().maxCoeff());
      rep.locality.push_back({static_cast<int>(r), static_cast<int>(s), m});
    }
  }
  return rep;
}

int cmd_simulate(const fs::path& config, const fs::path& out_dir, std::ostream& log, const CommandOptions& opts) {
  return guarded(log, [&] {
    const Scenario sc = build_scenario(load_config(config.string()));
    prepare_dir(out_dir);
    const auto states = build_states(sc);
    const Evaluation e = evaluate(sc.problem, states);
    const nlohmann::json summary = write_images(out_dir, "", sc, e);
    write_text(out_dir / "summary.json", summary.dump(2) + "\n");
    if (!opts.quiet) log << "J = " << std::setprecision(10) << e.objective << ", EPE pixels = " << summary["epe_count"]
                         << "\n";
    return static_cast<int>(kOk);
  });
}

int cmd_gradcheck(const fs::path& config, std::ostream& log, const CommandOptions& opts) {
  return guarded(log, [&] {
    const Scenario sc = build_scenario(load_config(config.string()));
    GradientOptions gopts;
    gopts.corrupt_kernel_derivative = opts.corrupt_kernel_gradient;
    const GradcheckReport rep = run_gradcheck(sc, gopts);
    if (!opts.quiet) {
      log << "region control axis analytic finite_difference mixed_error\n" << std::setprecision(10);
      for (const auto& r : rep.rows)
        log << r.region << " " << r.control << " " << r.axis << " " << r.analytic << " " << r.fd << " " << r.error
            << "\n";
      for (const auto& l : rep.locality)
        log << "locality controls_of=" << l.region << " triangles_of=" << l.other << " max|dU/dP|=" << l.max_abs
            << "\n";
    }
    log << "max mixed error " << std::setprecision(6) << rep.max_error << " -> " << (rep.pass() ? "PASS" : "FAIL")
        << "\n";
    return static_cast<int>(rep.pass() ? kOk : kRuntimeError);
  });
}

int cmd_optimize(const fs::path& config, const fs::path& out_dir, std::ostream& log, const CommandOptions& opts) {
  return guarded(log, [&] {
    const Scenario sc = build_scenario(load_config(config.string()));
    if (sc.regions.empty()) throw ConfigError("regions: optimize needs at least one region");
    if (sc.target.empty()) throw ConfigError("target: optimize needs a target");

    // Fails on a self-intersecting start before anything is written.
    const OptimizationState start = initial_state(sc.problem, sc.regions);
    prepare_dir(out_dir);

    std::vector<PeriodicSplineRegion> initial;
    for (const auto& r : start.regions) initial.push_back(r.spline);
    write_text(out_dir / "mask_initial.json", mask_json(initial, sc.optical).dump(2) + "\n");
    nlohmann::json summary;
    summary["initial"] = write_images(out_dir, "_initial", sc, start.eval);

    auto progress = [&](const TraceEntry& t) {
      if (!opts.quiet)
        log << "iter " << t.iter << "  J = " << std::setprecision(10) << t.objective << "  alpha = " << t.alpha << "\n";
    };
    const OptimizationResult res = optimize(sc.problem, sc.regions, sc.optimizer, progress);

    write_convergence_csv(out_dir / "convergence.csv", res.state.trace);
    std::vector<PeriodicSplineRegion> final_regions;
    for (const auto& r : res.state.regions) final_regions.push_back(r.spline);
    write_text(out_dir / "mask_final.json", mask_json(final_regions, sc.optical).dump(2) + "\n");
    write_text(out_dir / "boundary_final.svg", boundary_svg(final_regions, sc.target, sc.optical));
    summary["final"] = write_images(out_dir, "_final", sc, res.state.eval);
    summary["steps"] = res.state.iter;
    summary["stop_reason"] = to_string(res.reason);
    write_text(out_dir / "summary.json", summary.dump(2) + "\n");
    if (!opts.quiet)
      log << "stopped (" << to_string(res.reason) << ") after " << res.state.iter << " steps, EPE pixels "
          << summary["initial"]["epe_count"] << " -> " << summary["final"]["epe_count"] << "\n";
    return static_cast<int>(kOk);
  });
}

}  // namespace curvmask::app
