#include "curvmask/app/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

namespace curvmask::app {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& msg) { throw ConfigError(field + ": " + msg); }

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(path, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items()) {
    if (!ok.contains(key)) fail(path.empty() ? key : path + "." + key, "unknown field");
  }
}

double get_number(const json& obj, const std::string& path, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(path + "." + key, "must be finite");
  return d;
}

double get_positive(const json& obj, const std::string& path, const char* key, double fallback) {
  const double d = get_number(obj, path, key, fallback);
  if (!(d > 0.0)) fail(path + "." + key, "must be positive");
  return d;
}

int get_int(const json& obj, const std::string& path, const char* key, int fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
  const auto i = v.get<long long>();
  if (i < std::numeric_limits<int>::min() || i > std::numeric_limits<int>::max())
    fail(path + "." + key, "out of range");
  return static_cast<int>(i);
}

bool get_bool(const json& obj, const std::string& path, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_boolean()) fail(path + "." + key, "expected true or false");
  return v.get<bool>();
}

Vec2 parse_point(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    fail(path, "expected a point [x, y]");
  const Vec2 p{v[0].get<double>(), v[1].get<double>()};
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) fail(path, "must be finite");
  return p;
}

std::vector<Vec2> parse_points(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected a list of points");
  std::vector<Vec2> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(parse_point(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

json point_json(Vec2 p) { return json::array({p.x, p.y}); }

json points_json(const std::vector<Vec2>& pts) {
  json a = json::array();
  for (const auto& p : pts) a.push_back(point_json(p));
  return a;
}

}  // namespace

bool RunConfig::operator==(const RunConfig& o) const {
  return optical.lambda0_nm == o.optical.lambda0_nm && optical.na == o.optical.na &&
         optical.magnification == o.optical.magnification && resist.a == o.resist.a && resist.tr == o.resist.tr &&
         grid == o.grid && target == o.target && regions == o.regions && optimizer == o.optimizer &&
         weight_by_cell_area == o.weight_by_cell_area && deterministic == o.deterministic;
}

RunConfig parse_config(const json& doc) {
  check_keys(doc, "", {"optical", "resist", "grid", "target", "regions", "optimizer", "objective", "deterministic"});
  RunConfig cfg;

  if (doc.contains("optical")) {
    const auto& o = doc.at("optical");
    check_keys(o, "optical", {"lambda0_nm", "na", "magnification"});
    cfg.optical.lambda0_nm = get_positive(o, "optical", "lambda0_nm", cfg.optical.lambda0_nm);
    cfg.optical.na = get_positive(o, "optical", "na", cfg.optical.na);
    cfg.optical.magnification = get_number(o, "optical", "magnification", cfg.optical.magnification);
    if (cfg.optical.magnification == 0.0) fail("optical.magnification", "must be nonzero");
    if (!(cfg.optical.na < 1.5)) fail("optical.na", "must be below 1.5");
  }

  if (doc.contains("resist")) {
    const auto& r = doc.at("resist");
    check_keys(r, "resist", {"a", "tr"});
    cfg.resist.a = get_positive(r, "resist", "a", cfg.resist.a);
    cfg.resist.tr = get_positive(r, "resist", "tr", cfg.resist.tr);
  }

  if (doc.contains("grid")) {
    const auto& g = doc.at("grid");
    check_keys(g, "grid", {"nx", "ny", "pixel_nm", "origin_nm", "margin"});
    cfg.grid.nx = get_int(g, "grid", "nx", cfg.grid.nx);
    cfg.grid.ny = get_int(g, "grid", "ny", cfg.grid.ny);
    if (cfg.grid.nx < 2) fail("grid.nx", "must be at least 2");
    if (cfg.grid.ny < 2) fail("grid.ny", "must be at least 2");
    if (g.contains("pixel_nm")) cfg.grid.pixel_nm = get_positive(g, "grid", "pixel_nm", 1.0);
    if (g.contains("origin_nm")) cfg.grid.origin_nm = parse_point(g.at("origin_nm"), "grid.origin_nm");
    cfg.grid.margin = get_number(g, "grid", "margin", cfg.grid.margin);
    if (cfg.grid.margin < 0.0) fail("grid.margin", "must be non-negative");
  }

  if (doc.contains("target")) {
    const auto& t = doc.at("target");
    if (!t.is_array()) fail("target", "expected a list of polygons");
    for (std::size_t i = 0; i < t.size(); ++i) {
      const std::string path = "target[" + std::to_string(i) + "]";
      auto poly = parse_points(t[i], path);
      if (poly.size() < 3) fail(path, "polygon needs at least 3 vertices");
      if (polygon_signed_area(std::span<const Vec2>(poly)) == 0.0) fail(path, "polygon has zero area");
      cfg.target.push_back(std::move(poly));
    }
  }

  if (doc.contains("regions")) {
    const auto& rs = doc.at("regions");
    if (!rs.is_array()) fail("regions", "expected a list");
    for (std::size_t i = 0; i < rs.size(); ++i) {
      const std::string path = "regions[" + std::to_string(i) + "]";
      const auto& r = rs[i];
      check_keys(r, path, {"controls_nm", "init_from_target", "n", "samples"});
      RegionConfig rc;
      const bool has_controls = r.contains("controls_nm");
      const bool has_init = r.contains("init_from_target");
      if (has_controls == has_init) fail(path, "give exactly one of controls_nm or init_from_target");
      if (has_controls) {
        rc.controls_nm = parse_points(r.at("controls_nm"), path + ".controls_nm");
        if (rc.controls_nm.size() < 5) fail(path + ".controls_nm", "need at least 5 control points");
        if (r.contains("n")) fail(path + ".n", "only valid with init_from_target");
      } else {
        const int idx = get_int(r, path, "init_from_target", -1);
        if (idx < 0 || idx >= static_cast<int>(cfg.target.size()))
          fail(path + ".init_from_target", "no target polygon with index " + std::to_string(idx));
        rc.init_from_target = idx;
        if (!r.contains("n")) fail(path + ".n", "required with init_from_target");
        rc.n = get_int(r, path, "n", 0);
        if (rc.n < 5) fail(path + ".n", "need at least 5 control points");
      }
      rc.samples = get_int(r, path, "samples", 0);
      if (rc.samples != 0 && rc.samples < 3) fail(path + ".samples", "need at least 3 samples");
      cfg.regions.push_back(std::move(rc));
    }
  }

  if (doc.contains("optimizer")) {
    const auto& o = doc.at("optimizer");
    auto& s = cfg.optimizer;
    check_keys(o, "optimizer",
               {"max_iters", "eps", "alpha_eps", "alpha_max", "max_displacement", "gs_tol", "refine_area_tol"});
    s.max_iters = get_int(o, "optimizer", "max_iters", s.max_iters);
    if (s.max_iters < 1) fail("optimizer.max_iters", "must be at least 1");
    s.eps = get_positive(o, "optimizer", "eps", s.eps);
    s.alpha_eps = get_positive(o, "optimizer", "alpha_eps", s.alpha_eps);
    s.alpha_max = get_number(o, "optimizer", "alpha_max", s.alpha_max);
    if (s.alpha_max < 0.0) fail("optimizer.alpha_max", "must be positive, or 0 for automatic");
    s.max_displacement = get_positive(o, "optimizer", "max_displacement", s.max_displacement);
    s.gs_tol = get_positive(o, "optimizer", "gs_tol", s.gs_tol);
    if (!(s.gs_tol < 1.0)) fail("optimizer.gs_tol", "must be below 1");
    s.refine_area_tol = get_positive(o, "optimizer", "refine_area_tol", s.refine_area_tol);
  }

  if (doc.contains("objective")) {
    const auto& o = doc.at("objective");
    check_keys(o, "objective", {"weight_by_cell_area"});
    cfg.weight_by_cell_area = get_bool(o, "objective", "weight_by_cell_area", cfg.weight_by_cell_area);
  }
  cfg.deterministic = get_bool(doc, "", "deterministic", cfg.deterministic);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config(doc);
}

json to_json(const RunConfig& cfg) {
  json doc;
  doc["optical"] = {{"lambda0_nm", cfg.optical.lambda0_nm},
                    {"na", cfg.optical.na},
                    {"magnification", cfg.optical.magnification}};
  doc["resist"] = {{"a", cfg.resist.a}, {"tr", cfg.resist.tr}};
  json grid = {{"nx", cfg.grid.nx}, {"ny", cfg.grid.ny}, {"margin", cfg.grid.margin}};
  if (cfg.grid.pixel_nm) grid["pixel_nm"] = *cfg.grid.pixel_nm;
  if (cfg.grid.origin_nm) grid["origin_nm"] = point_json(*cfg.grid.origin_nm);
  doc["grid"] = grid;
  json target = json::array();
  for (const auto& poly : cfg.target) target.push_back(points_json(poly));
  doc["target"] = target;
  json regions = json::array();
  for (const auto& r : cfg.regions) {
    json rj;
    if (r.init_from_target) {
      rj["init_from_target"] = *r.init_from_target;
      rj["n"] = r.n;
    } else {
      rj["controls_nm"] = points_json(r.controls_nm);
    }
    rj["samples"] = r.samples;
    regions.push_back(rj);
  }
  doc["regions"] = regions;
  const auto& s = cfg.optimizer;
  doc["optimizer"] = {{"max_iters", s.max_iters}, {"eps", s.eps},
                      {"alpha_eps", s.alpha_eps}, {"alpha_max", s.alpha_max},
                      {"max_displacement", s.max_displacement}, {"gs_tol", s.gs_tol},
                      {"refine_area_tol", s.refine_area_tol}};
  doc["objective"] = {{"weight_by_cell_area", cfg.weight_by_cell_area}};
  doc["deterministic"] = cfg.deterministic;
  return doc;
}

Scenario build_scenario(const RunConfig& cfg) {
  Scenario sc;
  sc.optical = cfg.optical;
  sc.optical.validate();
  const double unit = sc.optical.length_unit_nm();

  for (const auto& poly : cfg.target) {
    Polygon p;
    for (const auto& v : poly) p.push_back(normalize_image_point(v, sc.optical));
    sc.target.push_back(std::move(p));
  }

  // Grid placement in nm, then normalized.
  double pixel_nm = 0.0;
  Vec2 origin_nm{};
  if (cfg.grid.pixel_nm && cfg.grid.origin_nm) {
    pixel_nm = *cfg.grid.pixel_nm;
    origin_nm = *cfg.grid.origin_nm;
  } else {
    if (cfg.target.empty()) fail("grid", "pixel_nm and origin_nm are required when there is no target");
    Vec2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    Vec2 hi{-lo.x, -lo.y};
    for (const auto& poly : cfg.target) {
      for (const auto& v : poly) {
        lo = {std::min(lo.x, v.x), std::min(lo.y, v.y)};
        hi = {std::max(hi.x, v.x), std::max(hi.y, v.y)};
      }
    }
    const double extent = std::max(hi.x - lo.x, hi.y - lo.y);
    pixel_nm = cfg.grid.pixel_nm ? *cfg.grid.pixel_nm
                                 : extent * (1.0 + 2.0 * cfg.grid.margin) / std::max(cfg.grid.nx, cfg.grid.ny);
    const Vec2 center{0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y)};
    origin_nm = cfg.grid.origin_nm ? *cfg.grid.origin_nm
                                   : Vec2{center.x - 0.5 * (cfg.grid.nx - 1) * pixel_nm,
                                          center.y - 0.5 * (cfg.grid.ny - 1) * pixel_nm};
  }
  auto& grid = sc.problem.grid;
  grid.nx = cfg.grid.nx;
  grid.ny = cfg.grid.ny;
  grid.pitch = pixel_nm / unit;
  grid.origin = normalize_image_point(origin_nm, sc.optical);
  grid.validate();

  sc.problem.resist = cfg.resist;
  sc.problem.resist.validate();
  sc.problem.target = rasterize_target(sc.target, grid);
  sc.problem.refine_area = cfg.optimizer.refine_area_tol;
  sc.problem.weight_by_cell_area = cfg.weight_by_cell_area;

  for (std::size_t i = 0; i < cfg.regions.size(); ++i) {
    const auto& r = cfg.regions[i];
    Points controls;
    if (r.init_from_target) {
      controls = init_controls_from_target(sc.target[static_cast<std::size_t>(*r.init_from_target)], r.n);
    } else {
      Points nm = to_points(std::span<const Vec2>(r.controls_nm));
      controls = normalize_mask_points(nm, sc.optical);
    }
    const int m = r.samples > 0 ? r.samples : 4 * static_cast<int>(controls.rows());
    sc.regions.push_back(PeriodicSplineRegion::uniform(std::move(controls), m));
    try {
      sc.regions.back().validate();
    } catch (const std::invalid_argument& e) {
      fail("regions[" + std::to_string(i) + "]", e.what());
    }
  }

  auto& o = sc.optimizer;
  o.max_iters = cfg.optimizer.max_iters;
  o.eps = cfg.optimizer.eps;
  o.alpha_eps = cfg.optimizer.alpha_eps;
  o.alpha_max = cfg.optimizer.alpha_max;
  o.max_displacement = cfg.optimizer.max_displacement;
  o.gs_tol = cfg.optimizer.gs_tol;
  return sc;
}

}  // namespace curvmask::app
