#pragma once

// Run configuration: a JSON document with lengths in nanometres.
//
//   {
//     "optical":   {"lambda0_nm": 193, "na": 0.93, "magnification": -1},
//     "resist":    {"a": 90, "tr": 0.3},
//     "grid":      {"nx": 20, "ny": 20, "pixel_nm": 20, "origin_nm": [x, y], "margin": 0.2},
//     "target":    [[[x, y], ...], ...],
//     "regions":   [{"controls_nm": [[x, y], ...], "samples": 48},
//                   {"init_from_target": 0, "n": 12, "samples": 48}],
//     "optimizer": {"max_iters": 100, "eps": 1e-4, ...},
//     "objective": {"weight_by_cell_area": true},
//     "deterministic": true
//   }
//
// origin_nm is the centre of pixel (0, 0) on the wafer. Without it the grid is
// centred on the target bounding box; without pixel_nm the pitch is chosen so
// the box plus `margin` on each side fits.

#include "curvmask/geometry.hpp"
#include "curvmask/objective.hpp"
#include "curvmask/optics.hpp"
#include "curvmask/optimizer.hpp"
#include "curvmask/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace curvmask::app {

/// Invalid or unreadable configuration. what() names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GridConfig {
  int nx = 20;
  int ny = 20;
  std::optional<double> pixel_nm;
  std::optional<Vec2> origin_nm;
  double margin = 0.2;

  bool operator==(const GridConfig&) const = default;
};

struct RegionConfig {
  std::vector<Vec2> controls_nm;       // explicit controls, mask plane
  std::optional<int> init_from_target;  // or: index into the target list
  int n = 0;                            // control count when initialised from the target
  int samples = 0;                      // boundary samples m; 0 means 4 n

  bool operator==(const RegionConfig&) const = default;
};

struct OptimizerSettings {
  int max_iters = 100;
  double eps = 1e-4;
  double alpha_eps = 1e-4;
  double alpha_max = 0.0;
  double max_displacement = 0.5;
  double gs_tol = 1e-3;
  double refine_area_tol = 0.02;

  bool operator==(const OptimizerSettings&) const = default;
};

struct RunConfig {
  OpticalConfig optical;
  ResistModel resist;
  GridConfig grid;
  std::vector<Polygon> target;
  std::vector<RegionConfig> regions;
  OptimizerSettings optimizer;
  bool weight_by_cell_area = true;
  bool deterministic = true;

  bool operator==(const RunConfig& other) const;
};

RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);
nlohmann::json to_json(const RunConfig& cfg);

/// Everything a command needs, in normalized coordinates.
struct Scenario {
  OpticalConfig optical;
  Problem problem;
  std::vector<PeriodicSplineRegion> regions;
  std::vector<Polygon> target;  // normalized
  OptimizerConfig optimizer;
};

Scenario build_scenario(const RunConfig& cfg);

}  // namespace curvmask::app
