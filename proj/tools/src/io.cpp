#include "curvmask/app/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace curvmask::app {

namespace {

constexpr int kMaxval = 65535;
constexpr int kSvgSamples = 512;

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void write_p2(const std::filesystem::path& path, int nx, int ny, double scale, const auto& level) {
  auto out = open_out(path);
  out << "P2\n# scale " << std::setprecision(17) << scale << "\n" << nx << " " << ny << "\n" << kMaxval << "\n";
  for (int row = 0; row < ny; ++row) {
    const int j = ny - 1 - row;
    for (int i = 0; i < nx; ++i) out << (i ? " " : "") << level(j * nx + i);
    out << "\n";
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

void write_pgm(const std::filesystem::path& path, const Eigen::ArrayXd& values, int nx, int ny, double scale) {
  if (values.size() != static_cast<Eigen::Index>(nx) * ny) throw std::invalid_argument("pgm: size mismatch");
  if (scale <= 0.0) {
    const double vmax = values.size() ? values.maxCoeff() : 0.0;
    scale = vmax > 0.0 ? kMaxval / vmax : 1.0;
  }
  write_p2(path, nx, ny, scale, [&](int k) {
    const double v = std::round(values(k) * scale);
    return static_cast<int>(std::clamp(v, 0.0, static_cast<double>(kMaxval)));
  });
}

void write_pgm(const std::filesystem::path& path, const std::vector<std::uint8_t>& mask, int nx, int ny) {
  if (mask.size() != static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny))
    throw std::invalid_argument("pgm: size mismatch");
  write_p2(path, nx, ny, static_cast<double>(kMaxval),
           [&](int k) { return mask[static_cast<std::size_t>(k)] ? kMaxval : 0; });
}

Pgm read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  Pgm pgm;
  std::string magic;
  in >> magic;
  if (magic != "P2") throw std::runtime_error(path.string() + ": not an ASCII PGM");
  // Header tokens, skipping comments but keeping the scale.
  std::vector<long long> header;
  while (header.size() < 3 && in) {
    in >> std::ws;
    if (in.peek() == '#') {
      std::string line;
      std::getline(in, line);
      std::istringstream ls(line);
      std::string hash, key;
      ls >> hash >> key;
      if (key == "scale") ls >> pgm.scale;
      continue;
    }
    long long v;
    if (!(in >> v)) break;
    header.push_back(v);
  }
  if (header.size() != 3) throw std::runtime_error(path.string() + ": truncated PGM header");
  pgm.nx = static_cast<int>(header[0]);
  pgm.ny = static_cast<int>(header[1]);
  pgm.maxval = static_cast<int>(header[2]);
  int v;
  while (in >> v) pgm.pixels.push_back(v);
  if (pgm.pixels.size() != static_cast<std::size_t>(pgm.nx) * static_cast<std::size_t>(pgm.ny))
    throw std::runtime_error(path.string() + ": pixel count does not match header");
  return pgm;
}

void write_convergence_csv(const std::filesystem::path& path, const std::vector<TraceEntry>& trace) {
  std::ostringstream s;
  s << "iter,J,alpha\n" << std::setprecision(17);
  for (const auto& t : trace) s << t.iter << "," << t.objective << "," << t.alpha << "\n";
  write_text(path, s.str());
}

nlohmann::json mask_json(const std::vector<PeriodicSplineRegion>& regions, const OpticalConfig& optical) {
  nlohmann::json doc;
  doc["units"] = "nm";
  doc["degree"] = regions.empty() ? 3 : regions.front().degree;
  nlohmann::json list = nlohmann::json::array();
  for (const auto& r : regions) {
    const Points nm = denormalize_mask_points(r.controls, optical);
    nlohmann::json pts = nlohmann::json::array();
    for (Eigen::Index k = 0; k < nm.rows(); ++k) pts.push_back({nm(k, 0), nm(k, 1)});
    list.push_back({{"controls_nm", pts}, {"samples", r.sample_count()}});
  }
  doc["regions"] = list;
  return doc;
}

std::string boundary_svg(const std::vector<PeriodicSplineRegion>& regions, const std::vector<Polygon>& target,
                         const OpticalConfig& optical) {
  std::vector<Points> curves;
  for (const auto& r : regions) curves.push_back(denormalize_mask_points(dense_curve(r, kSvgSamples), optical));
  std::vector<std::vector<Vec2>> outlines;
  for (const auto& poly : target) {
    std::vector<Vec2> nm;
    for (const auto& v : poly) nm.push_back(denormalize_image_point(v, optical));
    outlines.push_back(std::move(nm));
  }

  double x0 = 0, y0 = 0, x1 = 1, y1 = 1;
  bool first = true;
  auto grow = [&](double x, double y) {
    if (first) {
      x0 = x1 = x;
      y0 = y1 = y;
      first = false;
    }
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  };
  for (const auto& c : curves)
    for (Eigen::Index k = 0; k < c.rows(); ++k) grow(c(k, 0), c(k, 1));
  for (const auto& o : outlines)
    for (const auto& v : o) grow(v.x, v.y);
  const double pad = 0.05 * std::max({x1 - x0, y1 - y0, 1.0});
  x0 -= pad;
  y0 -= pad;
  x1 += pad;
  y1 += pad;

  std::ostringstream s;
  s << std::setprecision(10);
  // SVG y grows downwards, so flip about the box.
  auto px = [&](double x, double y) {
    std::ostringstream p;
    p << std::setprecision(10) << (x - x0) << "," << (y1 - y);
    return p.str();
  };
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << (x1 - x0) << " " << (y1 - y0) << "\">\n";
  for (const auto& o : outlines) {
    s << "  <polygon fill=\"none\" stroke=\"#888\" stroke-dasharray=\"4 2\" points=\"";
    for (std::size_t k = 0; k < o.size(); ++k) s << (k ? " " : "") << px(o[k].x, o[k].y);
    s << "\"/>\n";
  }
  for (const auto& c : curves) {
    s << "  <path fill=\"none\" stroke=\"#c00\" d=\"";
    for (Eigen::Index k = 0; k < c.rows(); ++k) s << (k ? " L" : "M") << px(c(k, 0), c(k, 1));
    s << " Z\"/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace curvmask::app
