#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace multiwell {

/// Dense polynomial sum_k c[k] x^k with exact derivative evaluation.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coefficients);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<double>& coefficients() const { return c_; }

  double operator()(double x) const;
  Polynomial derivative() const;

  /// Coefficients of p(center + u) as a polynomial in u.
  Polynomial shifted(double center) const;

 private:
  std::vector<double> c_;
};

/// V(center + u) = u^2 q(u). The constant and linear Taylor terms are dropped,
/// which is exact at a same-level well bottom and keeps V relatively accurate
/// deep in the exponential tails of an instanton.
class LocalExpansion {
 public:
  LocalExpansion(double center, Polynomial q);

  double center() const { return center_; }
  double q(double u) const { return q_(u); }
  double dq(double u) const { return dq_(u); }
  double ddq(double u) const { return ddq_(u); }
  /// (q(u) - q(0)) / u, evaluated without cancellation.
  double q_slope(double u) const { return slope_(u); }

  double value(double u) const { return u * u * q_(u); }
  double second_derivative(double u) const;

 private:
  double center_;
  Polynomial q_, dq_, ddq_, slope_;
};

/// Confining polynomial potential (unit mass). `zero_shift` is added to the
/// raw polynomial so that the well bottoms sit at V = 0.
class PotentialModel {
 public:
  explicit PotentialModel(std::vector<double> coefficients, double zero_shift = 0.0);

  const std::vector<double>& coefficients() const { return poly_.coefficients(); }
  double zero_shift() const { return zero_shift_; }
  int degree() const { return poly_.degree(); }

  PotentialModel with_zero_shift(double shift) const;

  double value(double x) const { return poly_(x) + zero_shift_; }
  double first_derivative(double x) const { return d1_(x); }
  double second_derivative(double x) const { return d2_(x); }

  /// Every real root of V' lies in [-bound, bound] (Cauchy bound).
  double critical_point_bound() const;

  LocalExpansion expand_about(double center) const;

 private:
  Polynomial poly_, d1_, d2_;
  double zero_shift_;
};

struct Well {
  double position = 0.0;
  double omega = 0.0;  ///< sqrt(V''(position))
  double level = 0.0;  ///< V(position) including the model's zero shift

  double ground_energy(double hbar) const { return 0.5 * hbar * omega; }
};

struct WellPair {
  Well initial;
  Well final;
  double barrier_position = 0.0;
  double barrier_top = 0.0;
};

struct ScanOptions {
  std::optional<std::pair<double, double>> interval;  ///< defaults to the Cauchy bound
  int n_scan = 4096;
  double root_tol = 1e-12;   ///< relative to the scan half-width
  double level_tol = 1e-9;   ///< relative to the largest barrier height
};

/// Critical points of V found by a sign-change scan of V' with bisection refinement.
struct CriticalPoints {
  std::vector<double> minima;
  std::vector<double> maxima;
};

CriticalPoints scan_critical_points(const PotentialModel& model, const ScanOptions& options = {});

/// All nondegenerate minima, sorted by position. Throws NotMultiWell for fewer
/// than two and NotSameLevel when their levels differ beyond level_tol.
std::vector<Well> find_wells(const PotentialModel& model, const ScanOptions& options = {});

bool same_level_check(const PotentialModel& model, std::span<const Well> wells,
                      double level_tol = 1e-9);

/// Returns the model with zero_shift chosen so the lowest minimum is at V = 0.
PotentialModel level_potential(const PotentialModel& model, const ScanOptions& options = {});

/// Pairs of neighbouring wells with the barrier between them. Throws if V
/// does not stay strictly positive between the two minima.
std::vector<WellPair> adjacent_pairs(const PotentialModel& model, std::span<const Well> wells);

/// (lambda/4!) (X^2 - a^2)^2, omega^2 = lambda a^2 / 3.
PotentialModel symmetric_double_well(double lambda, double a);

/// (lambda/2) X^2 (X^2 - a^2)^2, omega_middle^2 = lambda a^4, omega_outer = 2 omega_middle.
PotentialModel triple_well(double lambda, double a);

}  // namespace multiwell
