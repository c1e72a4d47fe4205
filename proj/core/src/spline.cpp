#include "curvmask/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace curvmask {

double cox_de_boor(std::span<const double> knots, std::size_t i, int p, double xi) {
  if (p == 0) return (knots[i] <= xi && xi < knots[i + 1]) ? 1.0 : 0.0;
  double value = 0.0;
  const double left_den = knots[i + static_cast<std::size_t>(p)] - knots[i];
  if (left_den != 0.0) value += (xi - knots[i]) / left_den * cox_de_boor(knots, i, p - 1, xi);
  const double right_den = knots[i + static_cast<std::size_t>(p) + 1] - knots[i + 1];
  if (right_den != 0.0) {
    value += (knots[i + static_cast<std::size_t>(p) + 1] - xi) / right_den *
             cox_de_boor(knots, i + 1, p - 1, xi);
  }
  return value;
}

KnotVector::KnotVector(std::vector<double> knots, int degree)
    : knots_(std::move(knots)), degree_(degree) {
  if (degree_ < 0) throw std::invalid_argument("knot vector: negative degree");
  if (knots_.size() < static_cast<std::size_t>(degree_) + 2)
    throw std::invalid_argument("knot vector: need at least degree + 2 knots");
  if (!std::is_sorted(knots_.begin(), knots_.end()))
    throw std::invalid_argument("knot vector: knots must be non-decreasing");
  if (!(knots_.back() > knots_.front()))
    throw std::invalid_argument("knot vector: empty parameter interval");
}

KnotVector KnotVector::uniform(int basis_count, int degree, double a, double b) {
  if (basis_count < 1) throw std::invalid_argument("knot vector: need at least one basis function");
  const int count = basis_count + degree + 1;
  std::vector<double> knots(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) knots[static_cast<std::size_t>(k)] = a + (b - a) * k / (count - 1);
  knots.back() = b;
  return KnotVector(std::move(knots), degree);
}

double KnotVector::basis(int i, double xi) const {
  if (i < 0 || i >= basis_count())
    throw std::out_of_range("basis index " + std::to_string(i) + " out of range");
  if (xi < front() || xi > back()) throw std::out_of_range("parameter outside knot span");
  return cox_de_boor(knots_, static_cast<std::size_t>(i), degree_, xi);
}

ExtendedPartition::ExtendedPartition(const KnotVector& kv)
    : degree_(kv.degree()), basis_count_(kv.basis_count()), period_(kv.back() - kv.front()) {
  const auto base = kv.knots();
  const int p = degree_;
  const int n = basis_count_;
  knots_.reserve(base.size() + 2 * static_cast<std::size_t>(p));
  // Leading knots: the p knots just before the end of the period, shifted
  // back by one period.
  for (int j = 0; j < p; ++j) knots_.push_back(base[static_cast<std::size_t>(n + j)] - period_);
  knots_.insert(knots_.end(), base.begin(), base.end());
  for (int j = 0; j < p; ++j) knots_.push_back(base[static_cast<std::size_t>(j + 1)] + period_);
}

double ExtendedPartition::periodic_basis(int i, double xi) const {
  const int n = basis_count_;
  const int p = degree_;
  if (i < 0 || i >= n + p)
    throw std::out_of_range("periodic basis index " + std::to_string(i) + " out of range");
  double value = cox_de_boor(knots_, static_cast<std::size_t>(i + p), p, xi);
  if (i >= n) value += cox_de_boor(knots_, static_cast<std::size_t>(i - n), p, xi);
  return value;
}

std::vector<std::pair<int, double>> ExtendedPartition::nonzero_periodic_basis(double xi) const {
  const int p = degree_;
  const int periodic = basis_count_ + p;
  const auto last = static_cast<std::ptrdiff_t>(knots_.size()) - 1;

  // Knot span s with knots[s] <= xi < knots[s + 1].
  auto it = std::upper_bound(knots_.begin(), knots_.end(), xi);
  std::ptrdiff_t s = std::distance(knots_.begin(), it) - 1;
  s = std::clamp<std::ptrdiff_t>(s, p, last - p - 1);

  // Triangular Cox-de Boor table for the p + 1 raw functions s-p..s.
  std::vector<double> values(static_cast<std::size_t>(p) + 1, 0.0);
  std::vector<double> left(static_cast<std::size_t>(p) + 1), right(static_cast<std::size_t>(p) + 1);
  values[0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[static_cast<std::size_t>(j)] = xi - knots_[static_cast<std::size_t>(s + 1 - j)];
    right[static_cast<std::size_t>(j)] = knots_[static_cast<std::size_t>(s + j)] - xi;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double den = right[static_cast<std::size_t>(r) + 1] + left[static_cast<std::size_t>(j - r)];
      const double temp = den != 0.0 ? values[static_cast<std::size_t>(r)] / den : 0.0;
      values[static_cast<std::size_t>(r)] = saved + right[static_cast<std::size_t>(r) + 1] * temp;
      saved = left[static_cast<std::size_t>(j - r)] * temp;
    }
    values[static_cast<std::size_t>(j)] = saved;
  }

  std::vector<std::pair<int, double>> out;
  out.reserve(values.size());
  for (int r = 0; r <= p; ++r) {
    // Raw function index in the extended array; raw j corresponds to
    // periodic index j - p, wrapped by one period when it falls before 0.
    const auto raw = static_cast<int>(s) - p + r;
    int idx = raw - p;
    if (idx < 0) idx += periodic;
    if (idx >= periodic) continue;  // starts at the right end; zero there for p >= 1
    const double v = values[static_cast<std::size_t>(r)];
    if (v == 0.0) continue;
    auto found = std::find_if(out.begin(), out.end(), [idx](const auto& e) { return e.first == idx; });
    if (found != out.end()) {
      found->second += v;
    } else {
      out.emplace_back(idx, v);
    }
  }
  return out;
}

PeriodicSplineRegion PeriodicSplineRegion::uniform(Points controls, int samples, int degree) {
  if (samples < 3) throw std::invalid_argument("spline region: need at least 3 samples");
  PeriodicSplineRegion region;
  region.degree = degree;
  region.controls = std::move(controls);
  region.params.resize(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k) region.params[static_cast<std::size_t>(k)] = static_cast<double>(k) / samples;
  return region;
}

ExtendedPartition PeriodicSplineRegion::partition() const {
  return ExtendedPartition(KnotVector::uniform(control_count() - degree, degree));
}

void PeriodicSplineRegion::validate() const {
  if (degree < 1) throw std::invalid_argument("spline region: degree must be at least 1");
  if (control_count() < degree + 2)
    throw std::invalid_argument("spline region: need at least degree + 2 control points, got " +
                                std::to_string(control_count()));
  if (!controls.allFinite()) throw std::invalid_argument("spline region: non-finite control point");
  if (params.size() < 3) throw std::invalid_argument("spline region: need at least 3 sample parameters");
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (params[k] < 0.0 || params[k] > 1.0)
      throw std::invalid_argument("spline region: sample parameter outside [0, 1]");
    if (k > 0 && !(params[k] > params[k - 1]))
      throw std::invalid_argument("spline region: sample parameters must be strictly increasing");
  }
}

CollocationMatrix build_collocation(const PeriodicSplineRegion& region) {
  region.validate();
  const ExtendedPartition part = region.partition();
  CollocationMatrix colloc = CollocationMatrix::Zero(region.sample_count(), region.control_count());
  for (int k = 0; k < region.sample_count(); ++k) {
    for (const auto& [idx, v] : part.nonzero_periodic_basis(region.params[static_cast<std::size_t>(k)]))
      colloc(k, idx) += v;
  }
  return colloc;
}

Points sample_boundary(const PeriodicSplineRegion& region) {
  return build_collocation(region) * region.controls;
}

Vec2 evaluate_curve(const PeriodicSplineRegion& region, double t) {
  const ExtendedPartition part = region.partition();
  Vec2 out;
  for (int i = 0; i < region.control_count(); ++i) {
    const double b = part.periodic_basis(i, t);
    out.x += b * region.controls(i, 0);
    out.y += b * region.controls(i, 1);
  }
  return out;
}

Points dense_curve(const PeriodicSplineRegion& region, int count) {
  const PeriodicSplineRegion dense = PeriodicSplineRegion::uniform(region.controls, count, region.degree);
  return sample_boundary(dense);
}

}  // namespace curvmask
