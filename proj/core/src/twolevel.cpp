#include "multiwell/twolevel.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "multiwell/error.hpp"

namespace multiwell {

double TwoLevelSystem::coupling() const {
  return std::sqrt(static_cast<double>(degeneracy)) * hbar * big_k;
}

TwoLevelSystem two_level_energies(double e_i, double e_f, double hbar, double big_k, int degeneracy) {
  if (!(hbar > 0.0)) throw Error(ErrorKind::Config, "hbar must be positive");
  if (!(big_k >= 0.0)) throw Error(ErrorKind::Config, "K must be non-negative");
  if (degeneracy < 1) throw Error(ErrorKind::Config, "degeneracy must be a positive integer");
  TwoLevelSystem s;
  s.e_i = e_i;
  s.e_f = e_f;
  s.hbar = hbar;
  s.big_k = big_k;
  s.degeneracy = degeneracy;
  s.e_split = e_f - e_i;
  const double c = s.coupling();
  const double half = 0.5 * std::abs(s.e_split);
  const double root = std::hypot(half, c);
  const double mean = 0.5 * (e_i + e_f);
  s.e_plus = mean + root;
  s.e_minus = mean - root;
  s.delta_e = root + half > 0.0 ? c * c / (root + half) : 0.0;
  if (s.e_split != 0.0) s.small_k = c / std::abs(s.e_split);
  return s;
}

KayFactor kay_factor(const InstantonSolution& sol, double k0, double hbar, double rel_tol) {
  if (!(hbar > 0.0)) throw Error(ErrorKind::Config, "hbar must be positive");
  if (!(k0 > 0.0)) throw Error(ErrorKind::Config, "K0 must be positive");
  const double s = sol.action();
  const double ratio = s / hbar;
  if (ratio < 1.0) throw Error(ErrorKind::Config, "S/hbar < 1: dilute instanton gas not applicable");
  const double wi = sol.omega_i(), wf = sol.omega_f();
  const Amplitudes& a = sol.amplitudes();
  const double pi_hbar = std::numbers::pi * hbar;

  KayFactor k;
  k.action_over_hbar = ratio;
  k.dilute_gas_marginal = ratio < 5.0;
  k.prefactor = std::pow(0.5 * (std::sqrt(wf / wi) + std::sqrt(wi / wf)), -0.5);
  const double boltz = std::exp(-ratio);
  k.value = k.prefactor * std::sqrt(s / (2.0 * pi_hbar)) * boltz * k0;
  k.via_amplitudes = std::pow(wi * wf / (pi_hbar * pi_hbar), 0.25) * std::sqrt(a.amp_i * a.amp_f * s) * boltz;
  k.via_positions = std::pow(wi * wi * wi * wf * wf * wf / (pi_hbar * pi_hbar), 0.25) *
                    std::sqrt(a.c_i * a.c_f) * boltz;

  const double d1 = std::abs(k.via_amplitudes / k.value - 1.0);
  const double d2 = std::abs(k.via_positions / k.value - 1.0);
  if (!(d1 <= rel_tol && d2 <= rel_tol)) {
    std::ostringstream msg;
    msg << "K forms disagree (A-form " << d1 << ", C-form " << d2 << " relative): amplitude error";
    throw Error(ErrorKind::Inconsistent, msg.str());
  }
  return k;
}

namespace {

void check_tau(double tau) {
  if (!(tau >= 0.0)) throw Error(ErrorKind::Config, "tau must be non-negative");
}

}  // namespace

double overlap_odd(const TwoLevelSystem& sys, double tau) {
  check_tau(tau);
  const double gap = sys.e_plus - sys.e_minus;
  if (gap == 0.0) return 0.0;
  const double x = tau / sys.hbar;
  // c (e^{-E_- x} - e^{-E_+ x}) / gap, with the difference taken through expm1.
  return sys.coupling() / gap * std::exp(-sys.e_minus * x) * -std::expm1(-gap * x);
}

double overlap_even(const TwoLevelSystem& sys, double tau) {
  check_tau(tau);
  const double gap = sys.e_plus - sys.e_minus;
  const double x = tau / sys.hbar;
  if (gap == 0.0) return std::exp(-sys.e_i * x);
  const double bias = sys.e_split / gap;
  return 0.5 * (1.0 + bias) * std::exp(-sys.e_minus * x) + 0.5 * (1.0 - bias) * std::exp(-sys.e_plus * x);
}

namespace {

double resolvent_denominator(const TwoLevelSystem& sys, double energy) {
  const double c = sys.coupling();
  const double d = (sys.e_f - energy) * (sys.e_i - energy) - c * c;
  const double scale = std::abs(sys.e_f - energy) * std::abs(sys.e_i - energy) + c * c;
  if (std::abs(d) <= 1e-14 * scale) throw Error(ErrorKind::Numeric, "resolvent pole");
  return d;
}

}  // namespace

double resolvent_odd(const TwoLevelSystem& sys, double energy) {
  return sys.coupling() / resolvent_denominator(sys, energy);
}

double resolvent_even(const TwoLevelSystem& sys, double energy) {
  return (sys.e_f - energy) / resolvent_denominator(sys, energy);
}

namespace {

// int_0^tau dT T^p/p! (tau-T)^q/q! e^{-e_i T/hbar - e_f (tau-T)/hbar}
double simplex_integral(int p, int q, const TwoLevelSystem& sys, double tau) {
  if (tau == 0.0) return 0.0;
  const double lp = std::lgamma(p + 1.0), lq = std::lgamma(q + 1.0);
  const double hb = sys.hbar;
  auto f = [&](double t) {
    const double r = tau - t;
    const double lt = p > 0 ? p * std::log(t) : 0.0;
    const double lr = q > 0 ? q * std::log(r) : 0.0;
    if ((p > 0 && t <= 0.0) || (q > 0 && r <= 0.0)) return 0.0;
    return std::exp(lt - lp + lr - lq - sys.e_i * t / hb - sys.e_f * r / hb);
  };
  return numerics::integrate(f, 0.0, tau, 1e-13);
}

}  // namespace

double simplex_term_odd(int n, const TwoLevelSystem& sys, double tau) {
  if (n < 0) throw Error(ErrorKind::Config, "instanton order must be non-negative");
  check_tau(tau);
  const double k = std::sqrt(static_cast<double>(sys.degeneracy)) * sys.big_k;
  return std::pow(k, 2 * n + 1) * simplex_integral(n, n, sys, tau);
}

double simplex_term_even(int n, const TwoLevelSystem& sys, double tau) {
  if (n < 0) throw Error(ErrorKind::Config, "instanton order must be non-negative");
  check_tau(tau);
  if (n == 0) return std::exp(-sys.e_i * tau / sys.hbar);
  const double k = std::sqrt(static_cast<double>(sys.degeneracy)) * sys.big_k;
  return std::pow(k, 2 * n) * simplex_integral(n, n - 1, sys, tau);
}

std::vector<WavefunctionValue> wavefunction_amplitudes(const TwoLevelSystem& sys, const Well& initial,
                                                       std::span<const Well> finals) {
  if (static_cast<int>(finals.size()) != sys.degeneracy)
    throw Error(ErrorKind::Config, "number of final wells must equal the degeneracy");
  const double gap = sys.e_plus - sys.e_minus;
  const double bias = gap > 0.0 ? sys.e_split / gap : 0.0;
  // Mixing weights of the initial well in the lower and upper eigenstates.
  const double w_lower = std::sqrt(0.5 * (1.0 + bias));
  const double w_upper = std::sqrt(0.5 * (1.0 - bias));
  const double share = 1.0 / std::sqrt(static_cast<double>(sys.degeneracy));
  auto peak = [&](const Well& w) { return std::pow(w.omega / (std::numbers::pi * sys.hbar), 0.25); };

  std::vector<WavefunctionValue> out;
  out.push_back({"lower", sys.e_minus, initial.position, w_lower * peak(initial)});
  for (const Well& f : finals) out.push_back({"lower", sys.e_minus, f.position, w_upper * share * peak(f)});
  out.push_back({"upper", sys.e_plus, initial.position, w_upper * peak(initial)});
  for (const Well& f : finals) out.push_back({"upper", sys.e_plus, f.position, w_lower * share * peak(f)});
  if (sys.degeneracy == 2) {
    out.push_back({"parity", sys.e_f, initial.position, 0.0});
    for (const Well& f : finals) out.push_back({"parity", sys.e_f, f.position, std::sqrt(0.5) * peak(f)});
  }
  return out;
}

}  // namespace multiwell
