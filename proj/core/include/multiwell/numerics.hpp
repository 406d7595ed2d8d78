#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace multiwell::numerics {

/// Adaptive Gauss-Kronrod (G15/K31) on a finite interval.
template <class F>
double integrate(F&& f, double a, double b, double rel_tol, double* error = nullptr) {
  if (a == b) {
    if (error) *error = 0.0;
    return 0.0;
  }
  double err = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, rel_tol, &err);
  if (error) *error = err;
  return value;
}

/// Composite Simpson rule on uniformly spaced samples; falls back to the 3/8
/// rule on the last three intervals when the interval count is odd.
inline double simpson(std::span<const double> y, double h) {
  const std::size_t n = y.size();
  if (n < 2) return 0.0;
  if (n == 2) return 0.5 * h * (y[0] + y[1]);
  const std::size_t intervals = n - 1;
  std::size_t even_end = (intervals % 2 == 0) ? n - 1 : n - 4;
  double s = 0.0;
  if (intervals == 3) {
    even_end = 0;
  } else {
    for (std::size_t k = 0; k + 2 <= even_end; k += 2) s += y[k] + 4.0 * y[k + 1] + y[k + 2];
    s *= h / 3.0;
  }
  if (intervals % 2 == 1) {
    const std::size_t k = even_end;
    s += 3.0 * h / 8.0 * (y[k] + 3.0 * y[k + 1] + 3.0 * y[k + 2] + y[k + 3]);
  }
  return s;
}

/// Running integral F_j = int_{t_0}^{t_j} f by the trapezoid rule with the
/// Euler-Maclaurin endpoint correction, given exact derivatives df. O(h^4).
inline std::vector<double> cumulative_integral(std::span<const double> f, std::span<const double> df,
                                               double h) {
  std::vector<double> out(f.size(), 0.0);
  double trap = 0.0;
  for (std::size_t j = 1; j < f.size(); ++j) {
    trap += 0.5 * h * (f[j - 1] + f[j]);
    out[j] = trap - h * h / 12.0 * (df[j] - df[0]);
  }
  return out;
}

/// Cubic Hermite interpolant on a uniform grid with exact nodal derivatives.
class UniformHermite {
 public:
  UniformHermite() = default;
  UniformHermite(double t0, double h, std::vector<double> y, std::vector<double> dy)
      : t0_(t0), h_(h), y_(std::move(y)), dy_(std::move(dy)) {
    if (y_.size() < 2 || y_.size() != dy_.size() || !(h_ > 0.0))
      throw std::invalid_argument("UniformHermite: need >= 2 samples and h > 0");
  }

  double front() const { return t0_; }
  double back() const { return t0_ + h_ * static_cast<double>(y_.size() - 1); }

  double operator()(double t) const {
    const double s = (t - t0_) / h_;
    std::size_t j = s <= 0.0 ? 0 : static_cast<std::size_t>(s);
    if (j >= y_.size() - 1) j = y_.size() - 2;
    const double x = s - static_cast<double>(j);
    const double x2 = x * x, x3 = x2 * x;
    return (2 * x3 - 3 * x2 + 1) * y_[j] + (x3 - 2 * x2 + x) * h_ * dy_[j] +
           (-2 * x3 + 3 * x2) * y_[j + 1] + (x3 - x2) * h_ * dy_[j + 1];
  }

 private:
  double t0_ = 0.0, h_ = 1.0;
  std::vector<double> y_, dy_;
};

}  // namespace multiwell::numerics
