#include "curvmask/objective.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace curvmask {

void ResistModel::validate() const {
  if (!(a > 0.0)) throw std::invalid_argument("resist.a must be positive");
  if (!(tr > 0.0)) throw std::invalid_argument("resist.tr must be positive");
}

double sigmoid(double x, const ResistModel& model) {
  const double z = model.a * (x - model.tr);
  // Branch on the sign so exp never overflows.
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double sigmoid_derivative(double x, const ResistModel& model) {
  const double s = sigmoid(x, model);
  return model.a * s * (1.0 - s);
}

int TargetRaster::count() const { return std::accumulate(values.begin(), values.end(), 0); }

TargetRaster rasterize_target(std::span<const Polygon> polygons, const ImageGrid& grid) {
  grid.validate();
  for (const auto& poly : polygons) {
    if (poly.size() < 3 || polygon_signed_area(std::span<const Vec2>(poly)) == 0.0)
      throw std::invalid_argument("target polygon is degenerate");
  }
  TargetRaster raster{grid.nx, grid.ny, std::vector<std::uint8_t>(static_cast<std::size_t>(grid.size()), 0)};
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const Vec2 s = grid.sample(i, j);
      for (const auto& poly : polygons) {
        if (point_in_polygon(s, std::span<const Vec2>(poly))) {
          raster.values[static_cast<std::size_t>(grid.index(i, j))] = 1;
          break;
        }
      }
    }
  }
  return raster;
}

double objective_value(const Eigen::ArrayXd& intensity, const TargetRaster& target, const ResistModel& model,
                       const ImageGrid& grid, bool weight_by_cell_area) {
  if (intensity.size() != static_cast<Eigen::Index>(target.values.size()) || target.nx != grid.nx ||
      target.ny != grid.ny || intensity.size() != grid.size())
    throw std::invalid_argument("objective: intensity, target and grid shapes differ");
  double j = 0.0;
  for (Eigen::Index k = 0; k < intensity.size(); ++k) {
    const double r = sigmoid(intensity(k), model) - target.values[static_cast<std::size_t>(k)];
    j += r * r;
  }
  return weight_by_cell_area ? j * grid.cell_area() : j;
}

PrintResult print_and_epe(const Eigen::ArrayXd& intensity, const TargetRaster& target, const ResistModel& model) {
  if (intensity.size() != static_cast<Eigen::Index>(target.values.size()))
    throw std::invalid_argument("print: intensity and target shapes differ");
  PrintResult out;
  out.print.resize(target.values.size());
  out.epe.resize(target.values.size());
  for (std::size_t k = 0; k < target.values.size(); ++k) {
    out.print[k] = intensity(static_cast<Eigen::Index>(k)) >= model.tr ? 1 : 0;
    out.epe[k] = out.print[k] != target.values[k] ? 1 : 0;
    out.epe_count += out.epe[k];
  }
  return out;
}

}  // namespace curvmask
