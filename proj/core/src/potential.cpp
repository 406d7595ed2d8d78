#include "multiwell/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "multiwell/error.hpp"

namespace multiwell {

Polynomial::Polynomial(std::vector<double> coefficients) : c_(std::move(coefficients)) {
  while (c_.size() > 1 && c_.back() == 0.0) c_.pop_back();
  if (c_.empty()) c_.push_back(0.0);
}

double Polynomial::operator()(double x) const {
  double acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (c_.size() <= 1) return Polynomial({0.0});
  std::vector<double> d(c_.size() - 1);
  for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
  return Polynomial(std::move(d));
}

Polynomial Polynomial::shifted(double center) const {
  // Repeated synthetic division by (x - center).
  std::vector<double> b = c_;
  const std::size_t n = b.size();
  for (std::size_t k = 0; k + 1 < n; ++k)
    for (std::size_t j = n - 1; j > k; --j) b[j - 1] += center * b[j];
  return Polynomial(std::move(b));
}

LocalExpansion::LocalExpansion(double center, Polynomial q)
    : center_(center), q_(std::move(q)), dq_(q_.derivative()), ddq_(dq_.derivative()) {
  const auto& c = q_.coefficients();
  slope_ = c.size() > 1 ? Polynomial(std::vector<double>(c.begin() + 1, c.end())) : Polynomial({0.0});
}

double LocalExpansion::second_derivative(double u) const {
  return 2.0 * q_(u) + 4.0 * u * dq_(u) + u * u * ddq_(u);
}

PotentialModel::PotentialModel(std::vector<double> coefficients, double zero_shift)
    : poly_(std::move(coefficients)), zero_shift_(zero_shift) {
  const int deg = poly_.degree();
  if (deg < 4 || deg % 2 != 0)
    throw Error(ErrorKind::Config, "potential must be an even-degree polynomial of degree >= 4");
  if (!(poly_.coefficients().back() > 0.0))
    throw Error(ErrorKind::Config, "leading coefficient must be positive (confining potential)");
  for (double c : poly_.coefficients())
    if (!std::isfinite(c)) throw Error(ErrorKind::Config, "non-finite potential coefficient");
  d1_ = poly_.derivative();
  d2_ = d1_.derivative();
}

PotentialModel PotentialModel::with_zero_shift(double shift) const {
  return PotentialModel(poly_.coefficients(), shift);
}

double PotentialModel::critical_point_bound() const {
  const auto& d = d1_.coefficients();
  const double lead = std::abs(d.back());
  double m = 0.0;
  for (std::size_t k = 0; k + 1 < d.size(); ++k) m = std::max(m, std::abs(d[k]) / lead);
  return 1.0 + m;
}

LocalExpansion PotentialModel::expand_about(double center) const {
  const auto& b = poly_.shifted(center).coefficients();
  std::vector<double> q(b.begin() + 2, b.end());
  return LocalExpansion(center, Polynomial(std::move(q)));
}

namespace {

std::pair<double, double> scan_interval(const PotentialModel& model, const ScanOptions& options) {
  const double bound = model.critical_point_bound();
  if (!options.interval) return {-1.0625 * bound, 1.0625 * bound};
  auto [lo, hi] = *options.interval;
  if (!(hi > lo)) throw Error(ErrorKind::Config, "scan interval must satisfy lo < hi");
  if (lo > -bound || hi < bound) {
    std::ostringstream msg;
    msg << "scan interval [" << lo << ", " << hi << "] does not bracket the critical-point bound "
        << bound;
    throw Error(ErrorKind::Config, msg.str());
  }
  return {lo, hi};
}

double refine_root(const PotentialModel& model, double a, double b, double tol) {
  double fa = model.first_derivative(a);
  while (b - a > tol) {
    const double m = 0.5 * (a + b);
    const double fm = model.first_derivative(m);
    if (fm == 0.0) return m;
    if ((fm < 0.0) == (fa < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  double x = 0.5 * (a + b);
  for (int it = 0; it < 3; ++it) {
    const double d2 = model.second_derivative(x);
    if (d2 == 0.0) break;
    const double next = x - model.first_derivative(x) / d2;
    if (!(next >= a && next <= b)) break;
    x = next;
  }
  return x;
}

}  // namespace

CriticalPoints scan_critical_points(const PotentialModel& model, const ScanOptions& options) {
  if (options.n_scan < 8) throw Error(ErrorKind::Config, "n_scan must be >= 8");
  const auto [lo, hi] = scan_interval(model, options);
  const int n = options.n_scan;
  const double h = (hi - lo) / (n - 1);
  const double tol = options.root_tol * 0.5 * (hi - lo);

  std::vector<double> x(n), g(n);
  for (int j = 0; j < n; ++j) {
    x[j] = lo + h * j;
    g[j] = model.first_derivative(x[j]);
  }

  CriticalPoints out;
  for (int j = 0; j < n; ++j) {
    if (g[j] == 0.0) {
      if (j == 0 || j == n - 1) continue;
      if (g[j - 1] < 0.0 && g[j + 1] > 0.0) out.minima.push_back(x[j]);
      if (g[j - 1] > 0.0 && g[j + 1] < 0.0) out.maxima.push_back(x[j]);
      continue;
    }
    if (j + 1 < n && g[j + 1] != 0.0 && (g[j] < 0.0) != (g[j + 1] < 0.0)) {
      const double root = refine_root(model, x[j], x[j + 1], tol);
      (g[j] < 0.0 ? out.minima : out.maxima).push_back(root);
    }
  }
  return out;
}

namespace {

// Largest V over maxima strictly between a and b, or NaN if none.
double barrier_between(const PotentialModel& model, const std::vector<double>& maxima, double a,
                       double b, double* where = nullptr) {
  double best = std::numeric_limits<double>::quiet_NaN();
  for (double m : maxima) {
    if (m <= a || m >= b) continue;
    const double v = model.value(m);
    if (std::isnan(best) || v > best) {
      best = v;
      if (where) *where = m;
    }
  }
  return best;
}

struct WellScan {
  std::vector<Well> wells;
  std::vector<double> maxima;
  double barrier_height = 0.0;  ///< largest barrier above the lowest well
};

WellScan scan_wells(const PotentialModel& model, const ScanOptions& options) {
  const CriticalPoints cp = scan_critical_points(model, options);

  double curvature_scale = 0.0;
  for (double m : cp.minima) curvature_scale = std::max(curvature_scale, std::abs(model.second_derivative(m)));
  for (double m : cp.maxima) curvature_scale = std::max(curvature_scale, std::abs(model.second_derivative(m)));

  WellScan out;
  out.maxima = cp.maxima;
  for (double m : cp.minima) {
    const double v2 = model.second_derivative(m);
    if (!(v2 > 1e-8 * curvature_scale)) continue;  // degenerate Hessian
    out.wells.push_back(Well{m, std::sqrt(v2), model.value(m)});
  }
  std::sort(out.wells.begin(), out.wells.end(),
            [](const Well& a, const Well& b) { return a.position < b.position; });
  if (out.wells.size() < 2)
    throw Error(ErrorKind::NotMultiWell, "not a multi-well: fewer than two nondegenerate minima");

  double lowest = out.wells.front().level;
  for (const auto& w : out.wells) lowest = std::min(lowest, w.level);
  for (std::size_t k = 0; k + 1 < out.wells.size(); ++k) {
    const double top = barrier_between(model, cp.maxima, out.wells[k].position, out.wells[k + 1].position);
    if (!std::isnan(top)) out.barrier_height = std::max(out.barrier_height, top - lowest);
  }
  return out;
}

bool levels_match(std::span<const Well> wells, double barrier_height, double level_tol) {
  double lo = wells.front().level, hi = wells.front().level;
  for (const auto& w : wells) {
    lo = std::min(lo, w.level);
    hi = std::max(hi, w.level);
  }
  return hi - lo <= level_tol * barrier_height;
}

}  // namespace

std::vector<Well> find_wells(const PotentialModel& model, const ScanOptions& options) {
  WellScan scan = scan_wells(model, options);
  if (!levels_match(scan.wells, scan.barrier_height, options.level_tol))
    throw Error(ErrorKind::NotSameLevel, "not same-level: well bottoms differ beyond level_tol");
  return std::move(scan.wells);
}

bool same_level_check(const PotentialModel& model, std::span<const Well> wells, double level_tol) {
  if (wells.empty()) throw Error(ErrorKind::Config, "same_level_check needs at least one well");
  const CriticalPoints cp = scan_critical_points(model);
  double lowest = wells.front().level;
  for (const auto& w : wells) lowest = std::min(lowest, model.value(w.position));
  double height = 0.0;
  for (std::size_t k = 0; k + 1 < wells.size(); ++k) {
    const double top = barrier_between(model, cp.maxima, wells[k].position, wells[k + 1].position);
    if (!std::isnan(top)) height = std::max(height, top - lowest);
  }
  std::vector<Well> current(wells.begin(), wells.end());
  for (auto& w : current) w.level = model.value(w.position);
  return levels_match(current, height, level_tol);
}

PotentialModel level_potential(const PotentialModel& model, const ScanOptions& options) {
  const PotentialModel raw = model.with_zero_shift(0.0);
  const auto wells = find_wells(raw, options);
  double lowest = wells.front().level;
  for (const auto& w : wells) lowest = std::min(lowest, w.level);
  return model.with_zero_shift(-lowest);
}

std::vector<WellPair> adjacent_pairs(const PotentialModel& model, std::span<const Well> wells) {
  const CriticalPoints cp = scan_critical_points(model);
  std::vector<WellPair> pairs;
  for (std::size_t k = 0; k + 1 < wells.size(); ++k) {
    const Well& a = wells[k];
    const Well& b = wells[k + 1];
    if (!(a.position < b.position)) throw Error(ErrorKind::Config, "wells must be sorted by position");
    double where = 0.5 * (a.position + b.position);
    const double top = barrier_between(model, cp.maxima, a.position, b.position, &where);
    if (std::isnan(top)) throw Error(ErrorKind::Numeric, "no barrier found between adjacent wells");
    constexpr int kSamples = 512;
    for (int j = 1; j < kSamples; ++j) {
      const double x = a.position + (b.position - a.position) * j / kSamples;
      if (!(model.value(x) > 0.0))
        throw Error(ErrorKind::NotSameLevel,
                    "potential dips to or below zero between adjacent wells");
    }
    pairs.push_back(WellPair{a, b, where, top});
  }
  return pairs;
}

PotentialModel symmetric_double_well(double lambda, double a) {
  if (!(lambda > 0.0) || !(a > 0.0)) throw Error(ErrorKind::Config, "lambda and a must be positive");
  const double a2 = a * a;
  return PotentialModel({lambda * a2 * a2 / 24.0, 0.0, -lambda * a2 / 12.0, 0.0, lambda / 24.0});
}

PotentialModel triple_well(double lambda, double a) {
  if (!(lambda > 0.0) || !(a > 0.0)) throw Error(ErrorKind::Config, "lambda and a must be positive");
  const double a2 = a * a;
  return PotentialModel({0.0, 0.0, 0.5 * lambda * a2 * a2, 0.0, -lambda * a2, 0.0, 0.5 * lambda});
}

}  // namespace multiwell
