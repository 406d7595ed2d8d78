#include "multiwell/instanton.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include "multiwell/error.hpp"

namespace multiwell {

namespace {

constexpr double kMaxExponent = 700.0;

double root2q(const LocalExpansion& e, double u) {
  const double q = e.q(u);
  return std::sqrt(2.0 * std::max(q, 0.0));
}

// sign(u) (2q + u q') / sqrt(2q): derivative of ln|u sqrt(2q)| along the flow.
double dlog_x0_local(const LocalExpansion& e, double u) {
  const double s = root2q(e, u);
  const double val = (2.0 * e.q(u) + u * e.dq(u)) / s;
  return u >= 0.0 ? val : -val;
}

void check_pair(const WellPair& pair) {
  if (!(pair.initial.position < pair.final.position))
    throw Error(ErrorKind::Config, "well pair must be ordered: initial.position < final.position");
  if (!(pair.initial.omega > 0.0) || !(pair.final.omega > 0.0))
    throw Error(ErrorKind::Config, "well frequencies must be positive");
}

}  // namespace

InstantonSolution::InstantonSolution(WellPair pair, LocalExpansion initial, LocalExpansion final,
                                     double tau1, double anchor_position, double action,
                                     double step, int half_count, std::vector<double> log_gap_left,
                                     std::vector<double> log_gap_right)
    : pair_(pair),
      initial_(std::move(initial)),
      final_(std::move(final)),
      tau1_(tau1),
      anchor_position_(anchor_position),
      action_(action),
      step_(step),
      half_count_(half_count),
      log_gap_left_(std::move(log_gap_left)),
      log_gap_right_(std::move(log_gap_right)) {
  const int m = half_count_;
  if (m < 1 || static_cast<int>(log_gap_left_.size()) != m + 1 ||
      static_cast<int>(log_gap_right_.size()) != m + 1)
    throw Error(ErrorKind::Config, "instanton samples do not match half_count");
  if (!(action_ > 0.0)) throw Error(ErrorKind::Numeric, "instanton action must be positive");

  // Left interpolant runs in increasing tau: tau1 - m h ... tau1.
  std::vector<double> yl(m + 1), dyl(m + 1), yr(m + 1), dyr(m + 1);
  for (int k = 0; k <= m; ++k) {
    const double r = log_gap_left_[m - k];
    yl[k] = r;
    dyl[k] = root2q(initial_, std::exp(r));
    const double s = log_gap_right_[k];
    yr[k] = s;
    dyr[k] = -root2q(final_, -std::exp(s));
  }
  left_ = numerics::UniformHermite(tau1_ - m * step_, step_, std::move(yl), std::move(dyl));
  right_ = numerics::UniformHermite(tau1_, step_, std::move(yr), std::move(dyr));

  const double half_log_s = 0.5 * std::log(action_);
  const int n = 2 * m + 1;
  tau_.resize(n);
  x_bar_.resize(n);
  x_bar_dot_.resize(n);
  log_x0_.resize(n);
  log_gap_.resize(n);
  for (int j = 0; j < n; ++j) {
    tau_[j] = tau1_ + (j - m) * step_;
    const bool left = j <= m;
    const LocalExpansion& e = left ? initial_ : final_;
    const double lg = left ? log_gap_left_[m - j] : log_gap_right_[j - m];
    const double u = left ? std::exp(lg) : -std::exp(lg);
    const double v = root2q(e, u);
    log_gap_[j] = lg;
    x_bar_[j] = e.center() + u;
    x_bar_dot_[j] = std::abs(u) * v;
    log_x0_[j] = lg + std::log(v) - half_log_s;
  }
}

InstantonSolution::Side InstantonSolution::side_at(double tau) const {
  if (tau <= tau1_) {
    const double lo = left_.front();
    const double r = tau >= lo ? left_(tau) : log_gap_left_.back() + omega_i() * (tau - lo);
    return {std::exp(r), &initial_};
  }
  const double hi = right_.back();
  const double s = tau <= hi ? right_(tau) : log_gap_right_.back() - omega_f() * (tau - hi);
  return {-std::exp(s), &final_};
}

double InstantonSolution::x_bar_at(double tau) const {
  const Side side = side_at(tau);
  return side.expansion->center() + side.u;
}

double InstantonSolution::log_x0_at(double tau) const {
  const Side side = side_at(tau);
  return std::log(std::abs(side.u)) + std::log(root2q(*side.expansion, side.u)) -
         0.5 * std::log(action_);
}

double InstantonSolution::dlog_x0_at(double tau) const {
  const Side side = side_at(tau);
  return dlog_x0_local(*side.expansion, side.u);
}

double InstantonSolution::fluctuation_potential_at(double tau) const {
  const Side side = side_at(tau);
  return side.expansion->second_derivative(side.u);
}

InstantonSolution InstantonSolution::shifted_to(double tau1) const {
  InstantonSolution out(pair_, initial_, final_, tau1, anchor_position_, action_, step_, half_count_,
                        log_gap_left_, log_gap_right_);
  out.amplitudes_ = amplitudes_;
  return out;
}

double action_quadrature(const PotentialModel& model, const WellPair& pair, double quad_tol) {
  const double xi = pair.initial.position, xf = pair.final.position;
  if (xi == xf) return 0.0;
  check_pair(pair);
  const double mid = pair.barrier_position;
  const LocalExpansion ei = model.expand_about(xi);
  const LocalExpansion ef = model.expand_about(xf);
  auto guard = [](double q) {
    if (q < 0.0) throw Error(ErrorKind::NotSameLevel, "potential dips below zero between the wells");
    return q;
  };
  // sqrt(2V) = |u| sqrt(2q(u)) is analytic in u, so plain Gauss-Kronrod converges fast.
  const double left = numerics::integrate(
      [&](double u) { return u * std::sqrt(2.0 * guard(ei.q(u))); }, 0.0, mid - xi, quad_tol);
  const double right = numerics::integrate(
      [&](double u) { return -u * std::sqrt(2.0 * guard(ef.q(u))); }, mid - xf, 0.0, quad_tol);
  return left + right;
}

std::pair<double, double> position_amplitudes_by_quadrature(const PotentialModel& model,
                                                            const WellPair& pair, double anchor,
                                                            double quad_tol) {
  check_pair(pair);
  const double xi = pair.initial.position, xf = pair.final.position;
  if (!(anchor > xi && anchor < xf))
    throw Error(ErrorKind::Config, "anchor must lie strictly between the wells");
  const LocalExpansion ei = model.expand_about(xi);
  const LocalExpansion ef = model.expand_about(xf);
  // omega/sqrt(2V) - 1/|u| rewritten without cancellation near the well.
  auto regular = [](const LocalExpansion& e, double u) {
    const double q = e.q(u);
    if (q <= 0.0) throw Error(ErrorKind::NotSameLevel, "potential dips below zero between the wells");
    const double s = std::sqrt(2.0 * q);
    const double w = std::sqrt(2.0 * e.q(0.0));
    return -2.0 * e.q_slope(u) / ((w + s) * s);
  };
  const double li = numerics::integrate([&](double u) { return regular(ei, u); }, 0.0, anchor - xi,
                                        quad_tol);
  const double lf = numerics::integrate([&](double u) { return -regular(ef, u); }, anchor - xf, 0.0,
                                        quad_tol);
  return {std::exp(std::log(anchor - xi) + li), std::exp(std::log(xf - anchor) + lf)};
}

double anchor_position(const PotentialModel& model, const WellPair& pair, AnchorConvention anchor,
                       double quad_tol) {
  check_pair(pair);
  if (anchor == AnchorConvention::BarrierTop) return pair.barrier_position;
  const double xi = pair.initial.position, xf = pair.final.position;
  const double wi = pair.initial.omega, wf = pair.final.omega;
  // ln(C_i w_i) - ln(C_f w_f) increases strictly with the anchor, so the root is unique.
  auto f = [&](double x) {
    auto [ci, cf] = position_amplitudes_by_quadrature(model, pair, x, quad_tol);
    return std::log(ci * wi) - std::log(cf * wf);
  };
  const double len = xf - xi;
  // Bracket outward from the barrier; q turns tiny near the far well, so stay away from it.
  double a = pair.barrier_position, b = a;
  double fa = f(a), fb = fa;
  if (fa == 0.0) return a;
  for (int it = 0; it < 60 && fa > 0.0; ++it) {
    b = a;
    fb = fa;
    a = xi + 0.5 * (a - xi);
    fa = f(a);
  }
  for (int it = 0; it < 60 && fb < 0.0; ++it) {
    a = b;
    fa = fb;
    b = xf - 0.5 * (xf - b);
    fb = f(b);
  }
  if (!(fa < 0.0 && fb > 0.0))
    throw Error(ErrorKind::Numeric, "equal-amplitude anchor is not bracketed between the wells");
  boost::uintmax_t iters = 200;
  auto tol = [len](double lo, double hi) { return hi - lo <= 1e-15 * len; };
  auto [lo, hi] = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iters);
  return 0.5 * (lo + hi);
}

InstantonSolution solve_trajectory(const PotentialModel& model, const WellPair& pair,
                                   const TrajectoryOptions& options) {
  check_pair(pair);
  const double wi = pair.initial.omega, wf = pair.final.omega;
  const double wmin = std::min(wi, wf), wmax = std::max(wi, wf);
  const double half_window = options.half_window > 0.0 ? options.half_window : 24.0 / wmin;
  const double step = options.step > 0.0 ? options.step : 0.005 / wmax;
  if (half_window * wmin < options.fit_window.second)
    throw Error(ErrorKind::Config, "half_window too small to reach the amplitude fit window");
  if (half_window * wmax > kMaxExponent)
    throw Error(ErrorKind::Config, "window too large for float range");
  if (!(options.ode_tol > 0.0)) throw Error(ErrorKind::Config, "ode_tol must be positive");

  const double x_star = anchor_position(model, pair, options.anchor, options.quad_tol);
  const LocalExpansion ei = model.expand_about(pair.initial.position);
  const LocalExpansion ef = model.expand_about(pair.final.position);
  const int m = static_cast<int>(std::ceil(half_window / step));

  using State = std::array<double, 1>;
  namespace ode = boost::numeric::odeint;
  std::vector<double> times(m + 1);
  for (int k = 0; k <= m; ++k) times[k] = k * step;

  auto integrate_side = [&](auto rhs, double start) {
    std::vector<double> out;
    out.reserve(m + 1);
    State x{start};
    auto stepper = ode::make_controlled(options.ode_tol, options.ode_tol,
                                        ode::runge_kutta_fehlberg78<State>());
    ode::integrate_times(stepper, rhs, x, times.begin(), times.end(), step,
                         [&](const State& s, double) { out.push_back(s[0]); });
    if (static_cast<int>(out.size()) != m + 1)
      throw Error(ErrorKind::Numeric, "trajectory integration returned an incomplete grid");
    for (double v : out)
      if (!std::isfinite(v)) throw Error(ErrorKind::Numeric, "trajectory integration diverged");
    return out;
  };

  // Left half in sigma = tau1 - tau: r = ln(X - X_i) decreases at rate sqrt(2 q_i).
  auto left = integrate_side(
      [&](const State& r, State& dr, double) { dr[0] = -root2q(ei, std::exp(r[0])); },
      std::log(x_star - pair.initial.position));
  // Right half in tau - tau1: s = ln(X_f - X) decreases at rate sqrt(2 q_f).
  auto right = integrate_side(
      [&](const State& s, State& ds, double) { ds[0] = -root2q(ef, -std::exp(s[0])); },
      std::log(pair.final.position - x_star));

  const double action = action_quadrature(model, pair, options.quad_tol);
  InstantonSolution sol(pair, ei, ef, options.tau1, x_star, action, step, m, std::move(left),
                        std::move(right));
  sol.set_amplitudes(extract_amplitudes(sol, options.fit_window));
  return sol;
}

namespace {

// Fits y(t) = c0 + sum_k c_k e^{-k w (t - t_lo)} and returns (c0, rms residual).
std::pair<double, double> tail_fit(const std::vector<double>& t, const std::vector<double>& y,
                                   double w, double t_lo) {
  const Eigen::Index n = static_cast<Eigen::Index>(t.size());
  Eigen::MatrixXd basis(n, 4);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double e = std::exp(-w * (t[j] - t_lo));
    basis(j, 0) = 1.0;
    basis(j, 1) = e;
    basis(j, 2) = e * e;
    basis(j, 3) = e * e * e;
    rhs(j) = y[j];
  }
  const Eigen::VectorXd c = basis.colPivHouseholderQr().solve(rhs);
  const double rms = std::sqrt((basis * c - rhs).squaredNorm() / static_cast<double>(n));
  return {c(0), rms};
}

}  // namespace

Amplitudes extract_amplitudes(const InstantonSolution& sol, std::pair<double, double> fit_window,
                              double max_residual) {
  const auto [lo, hi] = fit_window;
  if (!(lo >= 0.0 && hi > lo)) throw Error(ErrorKind::Config, "fit window must satisfy 0 <= lo < hi");
  const auto& tau = sol.tau_grid();
  const double t1 = sol.tau1();
  const double wi = sol.omega_i(), wf = sol.omega_f();
  if (wi * (t1 - tau.front()) < hi || wf * (tau.back() - t1) < hi)
    throw Error(ErrorKind::Config, "trajectory grid does not cover the amplitude fit window");

  std::vector<double> ti, x0i, gi, tf, x0f, gf;
  for (std::size_t j = 0; j < tau.size(); ++j) {
    const double d = tau[j] - t1;
    if (d < 0.0 && wi * -d >= lo && wi * -d <= hi) {
      ti.push_back(-d);
      x0i.push_back(sol.log_x0()[j] + wi * -d);
      gi.push_back(sol.log_gap()[j] + wi * -d);
    } else if (d > 0.0 && wf * d >= lo && wf * d <= hi) {
      tf.push_back(d);
      x0f.push_back(sol.log_x0()[j] + wf * d);
      gf.push_back(sol.log_gap()[j] + wf * d);
    }
  }
  if (ti.size() < 8 || tf.size() < 8)
    throw Error(ErrorKind::Config, "too few samples in the amplitude fit window");

  const auto fa_i = tail_fit(ti, x0i, wi, lo / wi);
  const auto fa_f = tail_fit(tf, x0f, wf, lo / wf);
  const auto fc_i = tail_fit(ti, gi, wi, lo / wi);
  const auto fc_f = tail_fit(tf, gf, wf, lo / wf);

  Amplitudes a;
  a.amp_i = std::exp(fa_i.first);
  a.amp_f = std::exp(fa_f.first);
  a.c_i = std::exp(fc_i.first);
  a.c_f = std::exp(fc_f.first);
  a.residual = std::max({fa_i.second, fa_f.second, fc_i.second, fc_f.second});
  if (!(a.residual <= max_residual)) {
    std::ostringstream msg;
    msg << "window not asymptotic: tail fit residual " << a.residual << " exceeds " << max_residual;
    throw Error(ErrorKind::Numeric, msg.str());
  }
  return a;
}

std::vector<double> zero_mode(const InstantonSolution& sol) {
  std::vector<double> out(sol.log_x0().size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = std::exp(sol.log_x0()[j]);
  return out;
}

double action_from_trajectory(const InstantonSolution& sol) {
  const auto& v = sol.x_bar_dot();
  std::vector<double> sq(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) sq[j] = v[j] * v[j];
  const double body = numerics::simpson(sq, sol.step());
  const double tails = v.front() * v.front() / (2.0 * sol.omega_i()) +
                       v.back() * v.back() / (2.0 * sol.omega_f());
  return body + tails;
}

}  // namespace multiwell
