// Prints one PASS/FAIL line per acceptance criterion.
//
//   acceptance [--expect-fail ID]... [ID]...
//
// Exit status is 0 when the set of failing criteria equals the --expect-fail set,
// so a known-red criterion is still run and reported as FAIL, and the run turns
// red if it either keeps failing unannounced or starts passing.

#include <boost/math/quadrature/exp_sinh.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli/pipeline.hpp"
#include "invariants.hpp"
#include "multiwell/error.hpp"
#include "multiwell/fluctuation.hpp"
#include "multiwell/instanton.hpp"
#include "multiwell/oracle.hpp"
#include "multiwell/twolevel.hpp"

using namespace multiwell;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [x]");
  }
};

std::string num(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

struct Preset {
  PotentialModel model;
  std::vector<Well> wells;
  std::vector<WellPair> pairs;
};

Preset preset(const PotentialModel& raw) {
  PotentialModel m = level_potential(raw);
  auto w = find_wells(m);
  auto p = adjacent_pairs(m, w);
  return {m, w, p};
}

double trajectory_sup_error(const InstantonSolution& sol, const std::function<double(double)>& exact) {
  double worst = 0.0;
  for (std::size_t j = 0; j < sol.tau_grid().size(); ++j)
    worst = std::max(worst, std::abs(sol.x_bar()[j] - exact(sol.tau_grid()[j] - sol.tau1())));
  return worst;
}

void a1(Outcome& o) {
  const Preset p = preset(symmetric_double_well(3.0, 1.0));
  const double omega = 1.0, a = 1.0;
  o.check(std::abs(p.wells[0].omega - omega) < 1e-12, "omega = " + num(p.wells[0].omega, 12));
  const double s = action_quadrature(p.model, p.pairs[0]);
  o.check(rel(s, 2.0 * omega * a * a / 3.0) <= 1e-8, "S rel err " + num(rel(s, 2.0 / 3.0), 2));
  const InstantonSolution sol = solve_trajectory(p.model, p.pairs[0]);
  const double sup = trajectory_sup_error(sol, [&](double d) { return a * std::tanh(omega * d / 2.0); });
  o.check(sup <= 1e-8, "trajectory sup err " + num(sup, 2));
  const Amplitudes& am = sol.amplitudes();
  const double ea = std::max(rel(am.amp_i, std::sqrt(6.0)), rel(am.amp_f, std::sqrt(6.0)));
  o.check(ea <= 1e-3, "A rel err " + num(ea, 2));
  const double k0 = k0_analytic(am.amp_i, am.amp_f, sol.omega_i(), sol.omega_f());
  o.check(rel(k0, 2.0 * std::sqrt(3.0)) <= 1e-12, "K0 analytic = " + num(k0, 15));
}

void a2(Outcome& o) {
  const Preset p = preset(triple_well(1.0, 1.0));
  const double wm = 1.0, a = 1.0;
  const double s = action_quadrature(p.model, p.pairs[1]);
  o.check(rel(s, 0.25) <= 1e-8, "S rel err " + num(rel(s, 0.25), 2));
  const InstantonSolution sol = solve_trajectory(p.model, p.pairs[1]);  // middle -> right
  const double sup = trajectory_sup_error(
      sol, [&](double d) { return a / std::sqrt(1.0 + std::exp(-2.0 * wm * d)); });
  o.check(sup <= 1e-8, "trajectory sup err " + num(sup, 2));
  const Amplitudes& am = sol.amplitudes();
  const double ea = std::max(rel(am.amp_i, 2.0), rel(am.amp_f, 2.0));
  o.check(ea <= 1e-3, "A rel err " + num(ea, 2));
  const GYResult gy = gelfand_yaglom(sol);
  const double ek = std::max(rel(gy.k0_analytic, 2.0 * std::sqrt(3.0) * wm), rel(gy.k0_numeric, 2.0 * std::sqrt(3.0) * wm));
  o.check(ek <= 1e-3, "K0 rel err " + num(ek, 2));
  const KayFactor kay = kay_factor(sol, gy.k0_analytic, 0.02);
  const double ep = rel(kay.prefactor, std::sqrt(2.0 * std::sqrt(2.0) / 3.0));
  o.check(ep <= 1e-12, "prefactor rel err " + num(ep, 2));
}

void a3(Outcome& o) {
  for (const auto& [name, raw] : {std::pair{"double", symmetric_double_well(3.0, 1.0)},
                                  std::pair{"triple", triple_well(1.0, 1.0)}}) {
    const Preset p = preset(raw);
    const InstantonSolution sol = solve_trajectory(p.model, p.pairs[0]);
    const GYResult gy = gelfand_yaglom(sol, GYOptions{.window = 40.0});
    const double ek = rel(gy.k0_numeric, gy.k0_analytic);
    o.check(ek <= 1e-4, std::string(name) + " k0 rel err " + num(ek, 2));
    const double er = std::abs(gy.log_psi0_ref_numeric - gy.log_psi0_ref_f);
    o.check(er <= 1e-8, std::string(name) + " reference log-psi diff " + num(er, 2));
  }
}

void a4(Outcome& o) {
  for (const auto& [name, raw] : {std::pair{"double", symmetric_double_well(3.0, 1.0)},
                                  std::pair{"triple", triple_well(1.0, 1.0)}}) {
    const Preset p = preset(raw);
    const InstantonSolution sol = solve_trajectory(p.model, p.pairs[0]);
    const GYResult gy = gelfand_yaglom(sol, GYOptions{.window = 30.0});
    const FluctuationSpectrum fs = diagonalize_fluctuation(FluctuationOperator::from_instanton(sol, 30.0));
    const double e = rel(gy.lambda0, fs.lambda0);
    o.check(e <= 0.05, std::string(name) + " lambda0 " + num(gy.lambda0) + " vs " + num(fs.lambda0) +
                           " rel " + num(e, 2));
    o.check(fs.nodes == 0, std::string(name) + " nodes " + std::to_string(fs.nodes));
  }
}

cli::AnalysisConfig double_well_config(double lambda) {
  cli::AnalysisConfig c = cli::default_config();
  c.potential.preset = "symmetric-double-well";
  c.potential.lambda = lambda;
  c.potential.omega = 1.0;
  return c;
}

void a5(Outcome& o) {
  const cli::Analysis a = cli::analyze(double_well_config(0.2), true);
  o.check(std::abs(a.pairs[0].kay.action_over_hbar - 10.0) < 1e-9,
          "S/hbar = " + num(a.pairs[0].kay.action_over_hbar, 10));
  const auto s = cli::compare_splitting(a);
  const double e = std::abs(s->relative_error);
  o.check(e <= 0.15, "splitting 2hK " + num(s->predicted) + " vs oracle " + num(s->oracle) + " rel " + num(e, 3));
  // Endpoint table: ground state at both wells against the oracle.
  double worst = 0.0;
  for (const auto& v : a.pairs[0].wavefunctions) {
    if (v.level != "lower") continue;
    for (std::size_t j = 0; j < a.oracle->positions.size(); ++j)
      if (a.oracle->positions[j] == v.position)
        worst = std::max(worst, rel(v.value, a.oracle->endpoint_values[0][j]));
  }
  o.check(worst <= 0.10, "endpoint |psi0(+-a)| rel err " + num(worst, 3));
}

void a6(Outcome& o) {
  cli::AnalysisConfig c = double_well_config(0.2);
  c.sweep_values = {1.0 / 3.0, 0.25, 0.2, 1.0 / 6.0, 1.0 / 7.0};
  const auto rows = cli::run_sweep(c);
  double prev = INFINITY;
  std::string trail;
  bool monotone = true;
  for (const auto& r : rows) {
    if (!r.relative_error) {
      o.check(false, "row failed: " + r.error);
      return;
    }
    const double e = std::abs(*r.relative_error);
    trail += (trail.empty() ? "" : " > ") + num(e, 3);
    monotone = monotone && e < prev;
    prev = e;
  }
  o.check(monotone, "S/hbar 6..14 errors " + trail);
}

void a7(Outcome& o) {
  cli::AnalysisConfig c = cli::default_config();
  c.potential = {"triple-well", 1.0, 1.0, std::nullopt, {}};
  c.hbar = 0.02;
  c.oracle_levels = 3;
  const cli::Analysis a = cli::analyze(c, true);
  const double wm = 1.0;
  const auto& e = a.oracle->spectrum.energies;
  const double r1 = e[1] / (c.hbar * wm);
  o.check(std::abs(r1 - 1.0) <= 0.02, "oracle E1/(hbar omega_m) = " + num(r1, 6));
  const TwoLevelSystem& sys = a.pairs[0].system;
  o.check(sys.degeneracy == 2, "g = " + std::to_string(sys.degeneracy));
  const double gap_pred = sys.e_plus - sys.e_minus, gap_oracle = e[2] - e[0];
  const double dev = std::abs(gap_pred - gap_oracle) / sys.delta_e;
  o.check(dev <= 0.2, "E2-E0 instanton " + num(gap_pred, 8) + " vs oracle " + num(gap_oracle, 8) +
                          ", |diff|/dE = " + num(dev, 3));
}

void a8(Outcome& o) {
  std::mt19937_64 rng(8);
  auto u = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  double worst = 0.0;
  std::vector<TwoLevelSystem> systems;
  for (int k = 0; k < 100; ++k) {
    const double hbar = u(0.2, 2.0);
    const TwoLevelSystem s = two_level_energies(hbar * u(0.2, 1.5), hbar * u(0.2, 1.5), hbar,
                                                u(1e-4, 0.3), 1 + static_cast<int>(k % 2));
    systems.push_back(s);
    const double tau = u(0.0, 20.0);
    const auto p = propagator_2x2(s, tau);
    worst = std::max({worst, rel(overlap_odd(s, tau), p[2]), rel(overlap_even(s, tau), p[0])});
  }
  o.check(worst <= 1e-12, "overlaps vs 2x2 exponential " + num(worst, 2));

  double simplex = 0.0;
  for (int k = 0; k < 10; ++k) {
    const TwoLevelSystem& s = systems[k];
    const double tau = 0.5 + k;
    simplex = std::max({simplex, rel(nested_simplex_integral(1, s, tau), simplex_term_odd(0, s, tau)),
                        rel(nested_simplex_integral(2, s, tau), simplex_term_even(1, s, tau)),
                        rel(nested_simplex_integral(3, s, tau), simplex_term_odd(1, s, tau))});
  }
  o.check(simplex <= 1e-8, "simplex N<=3 " + num(simplex, 2));

  double lap = 0.0;
  boost::math::quadrature::exp_sinh<double> integrator;
  for (int k = 0; k < 5; ++k) {
    const TwoLevelSystem& s = systems[20 + k];
    const double energy = s.e_minus * (1.0 - 0.15 * (k + 1));
    auto transform = [&](auto overlap) {
      return integrator.integrate(
          [&](double t) {
            const double v = std::exp(energy * t / s.hbar) * overlap(s, t) / s.hbar;
            return std::isfinite(v) ? v : 0.0;  // far tail: inf * 0
          },
          1e-14);
    };
    lap = std::max({lap, rel(transform(overlap_odd), resolvent_odd(s, energy)),
                    rel(transform(overlap_even), resolvent_even(s, energy))});
  }
  o.check(lap <= 1e-8, "Laplace vs resolvent " + num(lap, 2));
}

void a9(Outcome& o) {
  auto all = testing::preset_potentials();
  for (auto& p : testing::random_potentials(20, 20261017)) all.push_back(std::move(p));
  std::vector<std::string> bad;
  for (const auto& p : all)
    for (auto& b : testing::check_invariants(p)) bad.push_back(std::move(b));
  o.check(bad.empty(), std::to_string(all.size()) + " potentials, " + std::to_string(bad.size()) + " violations" +
                           (bad.empty() ? "" : " (first: " + bad.front() + ")"));
}

struct Criterion {
  const char* id;
  double budget_seconds;
  void (*run)(Outcome&);
};

}  // namespace

int main(int argc, char** argv) {
  const Criterion criteria[] = {{"A1", 1, a1},  {"A2", 1, a2},  {"A3", 5, a3},  {"A4", 10, a4}, {"A5", 30, a5},
                                {"A6", 180, a6}, {"A7", 60, a7}, {"A8", 30, a8}, {"A9", 600, a9}};
  std::setvbuf(stdout, nullptr, _IOLBF, 0);
  std::set<std::string> expected_fail, selected;
  for (int k = 1; k < argc; ++k) {
    const std::string arg = argv[k];
    if (arg == "--expect-fail" && k + 1 < argc)
      expected_fail.insert(argv[++k]);
    else
      selected.insert(arg);
  }

  std::set<std::string> failed;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.check(false, std::string("threw: ") + e.what());
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.check(dt <= c.budget_seconds, "runtime " + num(dt, 3) + " s (budget " + num(c.budget_seconds) + " s)");
    if (!o.pass) failed.insert(c.id);
    const char* note = expected_fail.count(c.id) ? (o.pass ? "  [expected to fail, passed]" : "  [known failure]") : "";
    std::printf("%s %s: %s%s\n", o.pass ? "PASS" : "FAIL", c.id, o.detail.str().c_str(), note);
  }
  std::set<std::string> expected_here;
  for (const auto& id : expected_fail)
    if (selected.empty() || selected.count(id)) expected_here.insert(id);
  const bool as_expected = failed == expected_here;
  std::printf("%zu failing (%s)\n", failed.size(), as_expected ? "matches expectation" : "UNEXPECTED");
  return as_expected ? 0 : 1;
}
