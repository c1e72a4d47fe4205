#include "curvmask/app/commands.hpp"
#include "curvmask/parallel.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace curvmask::app;

  CLI::App app{"Curvilinear mask simulation and optimization"};
  app.require_subcommand(1);
  app.fallthrough();
  int threads = 0;
  CommandOptions opts;
  app.add_option("--threads", threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  app.add_flag("--quiet", opts.quiet, "Only print errors and the final verdict");

  std::string config, out;
  auto* sim = app.add_subcommand("simulate", "Image a mask and write intensity, print and EPE rasters");
  sim->add_option("--config", config, "Run configuration (JSON)")->required();
  sim->add_option("--out", out, "Output directory")->required();

  auto* grad = app.add_subcommand("gradcheck", "Compare the analytic gradient with finite differences");
  grad->add_option("--config", config, "Run configuration (JSON)")->required();
  grad->add_flag("--corrupt-kernel-gradient", opts.corrupt_kernel_gradient)->group("");

  auto* opt = app.add_subcommand("optimize", "Optimize control points against the target");
  opt->add_option("--config", config, "Run configuration (JSON)")->required();
  opt->add_option("--out", out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  curvmask::set_thread_count(threads);
  if (sim->parsed()) return cmd_simulate(config, out, std::cerr, opts);
  if (grad->parsed()) return cmd_gradcheck(config, std::cout, opts);
  return cmd_optimize(config, out, std::cerr, opts);
}
