#pragma once

#include "curvmask/geometry.hpp"
#include "curvmask/optics.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <vector>

namespace curvmask {

/// Smooth resist threshold sig(x) = 1 / (1 + exp(-a (x - tr))).
struct ResistModel {
  double a = 90.0;
  double tr = 0.3;

  void validate() const;
};

double sigmoid(double x, const ResistModel& model);
double sigmoid_derivative(double x, const ResistModel& model);

/// Binary target pattern aligned with an ImageGrid (index j * nx + i).
struct TargetRaster {
  int nx = 0;
  int ny = 0;
  std::vector<std::uint8_t> values;

  int count() const;
};

/// A pixel is 1 iff its sample lies inside any polygon (even-odd rule).
/// Polygons are in the grid's (normalized) coordinates.
TargetRaster rasterize_target(std::span<const Polygon> polygons, const ImageGrid& grid);

/// J = sum (sig(I) - target)^2 * dx * dy. With `weight_by_cell_area` false
/// the dx * dy factor is dropped.
double objective_value(const Eigen::ArrayXd& intensity, const TargetRaster& target, const ResistModel& model,
                       const ImageGrid& grid, bool weight_by_cell_area = true);

struct PrintResult {
  std::vector<std::uint8_t> print;  // hard threshold I >= tr
  std::vector<std::uint8_t> epe;    // print XOR target
  int epe_count = 0;
};

PrintResult print_and_epe(const Eigen::ArrayXd& intensity, const TargetRaster& target, const ResistModel& model);

}  // namespace curvmask
