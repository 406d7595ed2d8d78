#include "invariants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "multiwell/error.hpp"
#include "multiwell/fluctuation.hpp"
#include "multiwell/instanton.hpp"
#include "multiwell/numerics.hpp"
#include "multiwell/oracle.hpp"
#include "multiwell/twolevel.hpp"

namespace multiwell::testing {

std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

namespace {

std::vector<double> squared_root(double x0) { return {x0 * x0, -2.0 * x0, 1.0}; }

std::vector<double> scaled(std::vector<double> p, double c) {
  for (double& v : p) v *= c;
  return p;
}

std::string describe(const char* kind, std::initializer_list<double> params) {
  std::ostringstream s;
  s << kind << '(';
  bool first = true;
  for (double v : params) {
    s << (first ? "" : ", ") << v;
    first = false;
  }
  return s.str() + ')';
}

}  // namespace

std::vector<GeneratedPotential> random_potentials(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  std::vector<GeneratedPotential> out;
  for (int k = 0; k < count; ++k) {
    GeneratedPotential g;
    switch (k % 3) {
      case 0: {
        const double a = uniform(0.6, 1.6), c = uniform(0.3, 2.0);
        g.coefficients = scaled({a * a * a * a, 0.0, -2.0 * a * a, 0.0, 1.0}, c);
        g.label = describe("quartic", {a, c});
        g.even = true;
        break;
      }
      case 1: {
        const double x1 = uniform(-1.8, -0.5), x2 = uniform(0.5, 1.8), c = uniform(0.3, 2.0);
        const double b = uniform(-0.4, 0.4), d = uniform(b * b / 4.0 + 0.05, 0.4);
        g.coefficients = scaled(poly_mul(poly_mul(squared_root(x1), squared_root(x2)), {1.0, b, d}), c);
        g.label = describe("sextic", {x1, x2, b, d, c});
        break;
      }
      default: {
        const double x1 = uniform(-1.6, -0.6), x2 = uniform(-0.3, 0.3), x3 = uniform(0.6, 1.6);
        const double c = uniform(0.5, 3.0);
        g.coefficients =
            scaled(poly_mul(poly_mul(squared_root(x1), squared_root(x2)), squared_root(x3)), c);
        g.label = describe("sextic-triple", {x1, x2, x3, c});
        break;
      }
    }
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<GeneratedPotential> preset_potentials() {
  return {{"symmetric-double-well(3, 1)", symmetric_double_well(3.0, 1.0).coefficients(), true},
          {"triple-well(1, 1)", triple_well(1.0, 1.0).coefficients(), true}};
}

std::vector<std::string> check_invariants(const GeneratedPotential& p) {
  std::vector<std::string> bad;
  auto fail = [&](const std::string& what) { bad.push_back(p.label + ": " + what); };
  try {
    const PotentialModel model = level_potential(PotentialModel(p.coefficients));
    const auto wells = find_wells(model);
    const auto pairs = adjacent_pairs(model, wells);
    double min_action = std::numeric_limits<double>::infinity();

    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const std::string tag = "pair " + std::to_string(k) + ": ";
      const InstantonSolution sol = solve_trajectory(model, pairs[k]);
      min_action = std::min(min_action, sol.action());

      const auto x0 = zero_mode(sol);
      if (std::any_of(x0.begin(), x0.end(), [](double v) { return !(v > 0.0); }))
        fail(tag + "zero mode has a node");
      std::vector<double> sq(x0.size());
      std::transform(x0.begin(), x0.end(), sq.begin(), [](double v) { return v * v; });
      const double norm = numerics::simpson(sq, sol.step());
      if (std::abs(norm - 1.0) > 1e-6) fail(tag + "zero-mode norm " + std::to_string(norm));

      const GYResult gy = gelfand_yaglom(sol);
      if (!(gy.wronskian_drift <= 1e-9)) fail(tag + "Wronskian drift " + std::to_string(gy.wronskian_drift));
      if (!(gy.lambda0 > 0.0)) fail(tag + "lambda0 not positive");
      if (std::abs(gy.log_psi0_ref_numeric - gy.log_psi0_ref_f) > 1e-8)
        fail(tag + "reference closed form vs step-operator integration");

      const double hbar = sol.action() / 8.0;
      const KayFactor kay = kay_factor(sol, gy.k0_analytic, hbar);
      for (int g : {1, 2}) {
        const double ei = pairs[k].initial.ground_energy(hbar), ef = pairs[k].final.ground_energy(hbar);
        const TwoLevelSystem s = two_level_energies(ei, ef, hbar, kay.value, g);
        const double eps = 8.0 * std::numeric_limits<double>::epsilon();
        if (std::abs(s.e_plus + s.e_minus - (ei + ef)) > eps * (ei + ef)) fail(tag + "trace identity");
        const double det = ei * ef - g * std::pow(hbar * kay.value, 2);
        if (std::abs(s.e_plus * s.e_minus - det) > eps * ei * ef) fail(tag + "determinant identity");
        if (!(s.e_plus >= std::max(ei, ef) && std::min(ei, ef) >= s.e_minus)) fail(tag + "level ordering");
      }
    }

    if (p.even) {
      const double hbar = min_action / 8.0;
      const int levels = 2 * static_cast<int>(wells.size());
      const SpectralResult r = diagonalize_schrodinger(model, default_grid(wells, hbar, 2048), levels);
      for (int n = 0; n < levels; ++n) {
        const int expected = n % 2 == 0 ? 1 : -1;
        if (r.parity[n] != expected) fail("oracle level " + std::to_string(n) + " parity");
        const auto& psi = r.wavefunctions[n];
        const int m = static_cast<int>(psi.size());
        double worst = 0.0;
        for (int j = 0; j < m; ++j) worst = std::max(worst, std::abs(psi[j] - expected * psi[m - 1 - j]));
        if (worst > 1e-8) fail("oracle level " + std::to_string(n) + " mirror residual " + std::to_string(worst));
      }
    }
  } catch (const Error& e) {
    fail(std::string("threw ") + to_string(e.kind()) + ": " + e.what());
  }
  return bad;
}

}  // namespace multiwell::testing
