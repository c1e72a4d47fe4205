#pragma once

#include "curvmask/app/config.hpp"
#include "curvmask/gradient.hpp"

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace curvmask::app {

enum ExitCode : int { kOk = 0, kRuntimeError = 1, kConfigError = 2 };

struct GradcheckRow {
  int region = 0;
  int control = 0;
  char axis = 'x';
  double analytic = 0.0;
  double fd = 0.0;
  double error = 0.0;  // |a - f| / max(1, |f|)
};

/// Largest contribution of region `other`'s triangles to dU/dP of region
/// `region`'s controls.
struct LocalityRow {
  int region = 0;
  int other = 0;
  double max_abs = 0.0;
};

struct GradcheckReport {
  std::vector<GradcheckRow> rows;
  std::vector<LocalityRow> locality;
  double max_error = 0.0;
  bool pass() const { return max_error < 1e-4; }
};

/// Analytic gradient against central differences of the objective with every
/// mesh topology frozen at the starting controls.
GradcheckReport run_gradcheck(const Scenario& sc, const GradientOptions& opts = {}, double h = 1e-6);

struct CommandOptions {
  bool quiet = false;
  bool corrupt_kernel_gradient = false;
};

int cmd_simulate(const std::filesystem::path& config, const std::filesystem::path& out_dir, std::ostream& log,
                 const CommandOptions& opts = {});
int cmd_gradcheck(const std::filesystem::path& config, std::ostream& log, const CommandOptions& opts = {});
int cmd_optimize(const std::filesystem::path& config, const std::filesystem::path& out_dir, std::ostream& log,
                 const CommandOptions& opts = {});

}  // namespace curvmask::app
