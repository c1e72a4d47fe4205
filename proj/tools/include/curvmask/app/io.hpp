#pragma once

#include "curvmask/app/config.hpp"
#include "curvmask/optimizer.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace curvmask::app {

/// ASCII P2 with maxval 65535. Row 0 of the file is the largest y. Values are
/// written as round(v * scale); the scale is recorded in a "# scale" comment.
/// A scale of 0 picks 65535 / max(v) (or 1 for an all-zero image).
void write_pgm(const std::filesystem::path& path, const Eigen::ArrayXd& values, int nx, int ny, double scale = 0.0);
void write_pgm(const std::filesystem::path& path, const std::vector<std::uint8_t>& mask, int nx, int ny);

struct Pgm {
  int nx = 0;
  int ny = 0;
  int maxval = 0;
  double scale = 0.0;
  std::vector<int> pixels;  // file order: top row first
};

Pgm read_pgm(const std::filesystem::path& path);

void write_convergence_csv(const std::filesystem::path& path, const std::vector<TraceEntry>& trace);

/// Denormalized control points per region.
nlohmann::json mask_json(const std::vector<PeriodicSplineRegion>& regions, const OpticalConfig& optical);

/// Boundaries sampled at 512 points per region plus the target outline, in nm.
std::string boundary_svg(const std::vector<PeriodicSplineRegion>& regions, const std::vector<Polygon>& target,
                         const OpticalConfig& optical);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace curvmask::app
