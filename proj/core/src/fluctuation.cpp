#include "multiwell/fluctuation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>

#include <boost/numeric/odeint.hpp>

#include "multiwell/error.hpp"

namespace multiwell {

double SignedLog::value() const { return sign * std::exp(log_abs); }

SignedLog SignedLog::from(double x) {
  return SignedLog{x < 0.0 ? -1 : 1, std::log(std::abs(x))};
}

FluctuationOperator FluctuationOperator::from_instanton(const InstantonSolution& sol, double window) {
  const double wmin = std::min(sol.omega_i(), sol.omega_f());
  if (!(window > 0.0)) throw Error(ErrorKind::Config, "GY window must be positive");
  const double half = 0.5 * window / wmin;
  auto shared = std::make_shared<const InstantonSolution>(sol);
  FluctuationOperator op;
  op.w = [shared](double tau) { return shared->fluctuation_potential_at(tau); };
  op.tau_i = sol.tau1() - half;
  op.tau_f = sol.tau1() + half;
  op.omega_i = sol.omega_i();
  op.omega_f = sol.omega_f();
  return op;
}

FluctuationOperator FluctuationOperator::constant(double omega, double tau_i, double tau_f) {
  FluctuationOperator op;
  const double w2 = omega * omega;
  op.w = [w2](double) { return w2; };
  op.tau_i = tau_i;
  op.tau_f = tau_f;
  op.omega_i = op.omega_f = omega;
  return op;
}

FluctuationOperator FluctuationOperator::step(double omega_i, double omega_f, double tau1,
                                              double tau_i, double tau_f) {
  if (!(omega_i > 0.0) || !(omega_f > 0.0))
    throw Error(ErrorKind::Config, "reference frequencies must be positive");
  FluctuationOperator op;
  const double wi2 = omega_i * omega_i, wf2 = omega_f * omega_f;
  // Each segment is integrated separately, so the value at tau1 itself is never sampled.
  op.w = [=](double tau) { return tau < tau1 ? wi2 : wf2; };
  op.tau_i = tau_i;
  op.tau_f = tau_f;
  op.omega_i = omega_i;
  op.omega_f = omega_f;
  if (tau1 > tau_i && tau1 < tau_f) op.breaks.push_back(tau1);
  return op;
}

ForwardSolve gy_forward_solve(const FluctuationOperator& op, double ode_tol) {
  if (!op.w) throw Error(ErrorKind::Config, "fluctuation operator has no potential");
  if (!(op.tau_f > op.tau_i)) throw Error(ErrorKind::Config, "GY window must satisfy tau_i < tau_f");
  if (!(ode_tol > 0.0)) throw Error(ErrorKind::Config, "ode_tol must be positive");

  std::vector<double> edges{op.tau_i};
  for (double b : op.breaks)
    if (b > op.tau_i && b < op.tau_f) edges.push_back(b);
  edges.push_back(op.tau_f);
  std::sort(edges.begin(), edges.end());

  using State = std::array<double, 4>;  // psi1, psi1', psi2, psi2'
  namespace ode = boost::numeric::odeint;
  const double rate = std::max({op.omega_i, op.omega_f, 1e-12});

  State y{0.0, 1.0, 1.0, 0.0};
  const double w0 = y[0] * y[3] - y[2] * y[1];
  double log_scale = 0.0;

  for (std::size_t seg = 0; seg + 1 < edges.size(); ++seg) {
    const double a = edges[seg], b = edges[seg + 1];
    // Sample w strictly inside the segment so a jump at its ends is never seen.
    const double lo = std::nextafter(a, b), hi = std::nextafter(b, a);
    auto rhs = [&](const State& s, State& ds, double t) {
      const double w = op.w(std::clamp(t, lo, hi));
      ds[0] = s[1];
      ds[1] = w * s[0];
      ds[2] = s[3];
      ds[3] = w * s[2];
    };
    const int chunks = std::max(1, static_cast<int>(std::ceil((b - a) * rate / 2.0)));
    const double len = (b - a) / chunks;
    for (int c = 0; c < chunks; ++c) {
      const double t0 = a + c * len;
      const double t1 = c + 1 == chunks ? b : t0 + len;
      auto stepper = ode::make_controlled(ode_tol * 1e-2, ode_tol * 1e-2,
                                          ode::runge_kutta_fehlberg78<State>());
      ode::integrate_adaptive(stepper, rhs, y, t0, t1, std::min(len, 0.1 / rate),
                              [&](const State& s, double t) {
                                if (t > op.tau_i && !(s[0] > 0.0))
                                  throw Error(ErrorKind::Numeric,
                                              "negative eigenvalue present: not a 1-instanton operator");
                              });
      double m = 0.0;
      for (double v : y) m = std::max(m, std::abs(v));
      if (!std::isfinite(m) || m == 0.0) throw Error(ErrorKind::Numeric, "GY integration diverged");
      for (double& v : y) v /= m;
      log_scale += std::log(m);
    }
  }

  ForwardSolve out;
  out.psi_f = SignedLog{y[0] < 0.0 ? -1 : 1, std::log(std::abs(y[0])) + log_scale};
  const double w_end = y[0] * y[3] - y[2] * y[1];
  const double norm = std::abs(y[0] * y[3]) + std::abs(y[2] * y[1]);
  out.wronskian_drift = std::abs(w_end - w0 * std::exp(-2.0 * log_scale)) / norm;
  return out;
}

double reference_log_psi0(const ReferenceOperator& ref) {
  if (!(ref.omega_i > 0.0) || !(ref.omega_f > 0.0))
    throw Error(ErrorKind::Config, "reference frequencies must be positive");
  const double a = ref.omega_i * (ref.tau1 - ref.tau_i);
  const double b = ref.omega_f * (ref.tau_f - ref.tau1);
  if (a < 0.0 || b < 0.0) throw Error(ErrorKind::Config, "tau1 must lie inside the GY window");
  // sinh(a) cosh(b) / w_i + sinh(b) cosh(a) / w_f with e^{a+b}/4 pulled out.
  const double sa = -std::expm1(-2.0 * a), ca = 1.0 + std::exp(-2.0 * a);
  const double sb = -std::expm1(-2.0 * b), cb = 1.0 + std::exp(-2.0 * b);
  return a + b - std::log(4.0) + std::log(sa * cb / ref.omega_i + sb * ca / ref.omega_f);
}

ZeroModeQuadrature zero_mode_quadrature(const InstantonSolution& sol, double tau_i, double tau_f,
                                        double step) {
  if (!(tau_f > tau_i)) throw Error(ErrorKind::Config, "GY window must satisfy tau_i < tau_f");
  if (step <= 0.0) step = 0.005 / std::max(sol.omega_i(), sol.omega_f());
  const int n = std::max(8, static_cast<int>(std::ceil((tau_f - tau_i) / step)));

  ZeroModeQuadrature z;
  z.h = (tau_f - tau_i) / n;
  z.tau.resize(n + 1);
  z.log_x0.resize(n + 1);
  std::vector<double> dlog(n + 1);
  for (int j = 0; j <= n; ++j) {
    z.tau[j] = j == n ? tau_f : tau_i + j * z.h;
    z.log_x0[j] = sol.log_x0_at(z.tau[j]);
    dlog[j] = sol.dlog_x0_at(z.tau[j]);
  }
  z.shift = -2.0 * *std::min_element(z.log_x0.begin(), z.log_x0.end());

  std::vector<double> f(n + 1), df(n + 1);
  for (int j = 0; j <= n; ++j) {
    f[j] = std::exp(-2.0 * z.log_x0[j] - z.shift);
    df[j] = -2.0 * dlog[j] * f[j];
  }
  z.cumulative = numerics::cumulative_integral(f, df, z.h);

  std::reverse(f.begin(), f.end());
  std::reverse(df.begin(), df.end());
  for (double& d : df) d = -d;
  z.remaining = numerics::cumulative_integral(f, df, z.h);
  std::reverse(z.remaining.begin(), z.remaining.end());
  return z;
}

SignedLog zero_mode_psi0(const ZeroModeQuadrature& z) {
  return SignedLog{1, z.log_x0.front() + z.log_x0.back() + z.shift + std::log(z.cumulative.back())};
}

double first_order_log_lambda0(const ZeroModeQuadrature& z) {
  std::vector<double> g(z.tau.size());
  for (std::size_t j = 0; j < g.size(); ++j)
    g[j] = std::exp(2.0 * z.log_x0[j]) * z.cumulative[j] * z.remaining[j];
  const double denom = numerics::simpson(g, z.h);
  if (!(denom > 0.0)) throw Error(ErrorKind::Numeric, "degenerate zero-mode quadrature");
  return -z.shift + std::log(z.cumulative.back()) - std::log(denom);
}

double lambda0_estimate_log(const InstantonSolution& sol, const FluctuationOperator& op,
                            const SignedLog& psi0_f) {
  const Amplitudes& a = sol.amplitudes();
  if (!(a.amp_i * a.amp_f > 0.0) || psi0_f.sign < 0)
    throw Error(ErrorKind::Inconsistent, "zero-mode sign inconsistency");
  const double wi = sol.omega_i(), wf = sol.omega_f();
  return std::log(4.0 * a.amp_i * a.amp_f * wi * wf) + psi0_f.log_abs -
         wi * (sol.tau1() - op.tau_i) - wf * (op.tau_f - sol.tau1());
}

double lambda0_estimate(const InstantonSolution& sol, const FluctuationOperator& op,
                        const SignedLog& psi0_f) {
  return std::exp(lambda0_estimate_log(sol, op, psi0_f));
}

double k0_analytic(double amp_i, double amp_f, double omega_i, double omega_f) {
  if (!(amp_i * amp_f > 0.0))
    throw Error(ErrorKind::Inconsistent, "zero-mode amplitudes of mixed sign: mode is not nodeless");
  return std::sqrt(amp_i * amp_f * (omega_i + omega_f));
}

double k0_numeric(double log_lambda0, double log_psi0_ref, const SignedLog& psi0_f) {
  if (psi0_f.sign < 0) throw Error(ErrorKind::Inconsistent, "negative GY quotient");
  return std::exp(0.5 * (log_lambda0 + log_psi0_ref - psi0_f.log_abs));
}

GYResult gelfand_yaglom(const InstantonSolution& sol, const GYOptions& options) {
  const FluctuationOperator op = FluctuationOperator::from_instanton(sol, options.window);
  if (options.window * std::max(sol.omega_i(), sol.omega_f()) /
          std::min(sol.omega_i(), sol.omega_f()) > 1400.0)
    throw Error(ErrorKind::Config, "window too large for float range");

  GYResult r;
  r.window = options.window;
  r.tau_i = op.tau_i;
  r.tau_f = op.tau_f;

  const ZeroModeQuadrature z = zero_mode_quadrature(sol, op.tau_i, op.tau_f, options.step);
  const SignedLog psi0 = zero_mode_psi0(z);
  const double log_l1 = first_order_log_lambda0(z);
  const ReferenceOperator ref{sol.omega_i(), sol.omega_f(), sol.tau1(), op.tau_i, op.tau_f};
  r.log_psi0_f = psi0.log_abs;
  r.log_psi0_ref_f = reference_log_psi0(ref);
  r.lambda0 = lambda0_estimate(sol, op, psi0);
  r.lambda0_first_order = std::exp(log_l1);
  r.k0_numeric = k0_numeric(log_l1, r.log_psi0_ref_f, psi0);
  const Amplitudes& a = sol.amplitudes();
  r.k0_analytic = k0_analytic(a.amp_i, a.amp_f, sol.omega_i(), sol.omega_f());

  const ForwardSolve step = gy_forward_solve(
      FluctuationOperator::step(sol.omega_i(), sol.omega_f(), sol.tau1(), op.tau_i, op.tau_f),
      options.ode_tol);
  r.log_psi0_ref_numeric = step.psi_f.log_abs;
  r.wronskian_drift = step.wronskian_drift;

  if (options.window <= options.forward_check_window) {
    const ForwardSolve direct = gy_forward_solve(op, options.ode_tol);
    r.log_psi0_forward = direct.psi_f.log_abs;
    r.wronskian_drift = std::max(r.wronskian_drift, direct.wronskian_drift);
  }
  return r;
}

}  // namespace multiwell
