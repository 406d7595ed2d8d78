#include <cmath>

#include "doctest.h"
#include "multiwell/error.hpp"
#include "multiwell/instanton.hpp"

using namespace multiwell;
using doctest::Approx;

namespace {

struct Setup {
  PotentialModel model;
  std::vector<WellPair> pairs;
};

Setup setup(const PotentialModel& raw) {
  PotentialModel m = level_potential(raw);
  return {m, adjacent_pairs(m, find_wells(m))};
}

}  // namespace

TEST_SUITE("instanton") {
  TEST_CASE("action quadrature matches 2 omega a^2 / 3 across couplings") {
    for (double lambda : {0.2, 1.0, 3.0, 7.5}) {
      const double a = 1.3;
      const double omega = std::sqrt(lambda * a * a / 3.0);
      const Setup s = setup(symmetric_double_well(lambda, a));
      CHECK(action_quadrature(s.model, s.pairs[0]) == Approx(2.0 * omega * a * a / 3.0).epsilon(1e-10));
    }
  }

  TEST_CASE("trajectory action agrees with the quadrature") {
    const Setup s = setup(triple_well(1.0, 1.0));
    for (const auto& pair : s.pairs) {
      const InstantonSolution sol = solve_trajectory(s.model, pair);
      CHECK(action_from_trajectory(sol) == Approx(sol.action()).epsilon(1e-8));
      CHECK(sol.amplitudes().residual < 1e-8);
    }
  }

  TEST_CASE("anchor conventions coincide for a symmetric barrier") {
    const Setup s = setup(symmetric_double_well(3.0, 1.0));
    const double eq = anchor_position(s.model, s.pairs[0], AnchorConvention::EqualAmplitude);
    const double top = anchor_position(s.model, s.pairs[0], AnchorConvention::BarrierTop);
    CHECK(std::abs(eq) < 1e-10);
    CHECK(std::abs(top) < 1e-10);
  }

  TEST_CASE("equal-amplitude anchor on an asymmetric pair") {
    const Setup s = setup(triple_well(1.0, 1.0));
    const InstantonSolution sol = solve_trajectory(s.model, s.pairs[1]);
    CHECK(sol.anchor_position() == Approx(1.0 / std::sqrt(2.0)).epsilon(1e-10));
    CHECK(sol.amplitudes().amp_i == Approx(sol.amplitudes().amp_f).epsilon(1e-8));
    // Barrier-top anchoring only moves tau1, so ln A_i / omega_i + ln A_f / omega_f is unchanged.
    TrajectoryOptions opt;
    opt.anchor = AnchorConvention::BarrierTop;
    const InstantonSolution top = solve_trajectory(s.model, s.pairs[1], opt);
    CHECK(top.anchor_position() == Approx(s.pairs[1].barrier_position));
    auto invariant = [](const InstantonSolution& s) {
      return std::log(s.amplitudes().amp_i) / s.omega_i() + std::log(s.amplitudes().amp_f) / s.omega_f();
    };
    CHECK(invariant(top) == Approx(invariant(sol)).epsilon(1e-8));
  }

  TEST_CASE("position amplitudes by quadrature match the fit") {
    const Setup s = setup(symmetric_double_well(3.0, 1.0));
    const InstantonSolution sol = solve_trajectory(s.model, s.pairs[0]);
    const auto [ci, cf] = position_amplitudes_by_quadrature(s.model, s.pairs[0], sol.anchor_position());
    CHECK(ci == Approx(2.0).epsilon(1e-10));
    CHECK(cf == Approx(2.0).epsilon(1e-10));
    CHECK(sol.amplitudes().c_i == Approx(ci).epsilon(1e-8));
  }

  TEST_CASE("shifting tau1 translates the solution") {
    const Setup s = setup(symmetric_double_well(3.0, 1.0));
    const InstantonSolution sol = solve_trajectory(s.model, s.pairs[0]);
    const InstantonSolution moved = sol.shifted_to(2.5);
    CHECK(moved.tau1() == Approx(2.5));
    for (double d : {-3.0, -0.4, 0.0, 1.7, 30.0})
      CHECK(moved.x_bar_at(2.5 + d) == Approx(sol.x_bar_at(sol.tau1() + d)).epsilon(1e-14));
    CHECK(moved.amplitudes().amp_i == Approx(sol.amplitudes().amp_i));
  }

  TEST_CASE("zero mode is the normalized velocity") {
    const Setup s = setup(symmetric_double_well(3.0, 1.0));
    const InstantonSolution sol = solve_trajectory(s.model, s.pairs[0]);
    const auto x0 = zero_mode(sol);
    const std::size_t mid = x0.size() / 2;
    CHECK(x0[mid] == Approx(sol.x_bar_dot()[mid] / std::sqrt(sol.action())).epsilon(1e-12));
    // Interpolated V'' tends to omega^2 in both tails.
    CHECK(sol.fluctuation_potential_at(sol.tau1() + 50.0) == Approx(1.0).epsilon(1e-12));
    CHECK(sol.fluctuation_potential_at(sol.tau1()) == Approx(-0.5).epsilon(1e-12));
  }

  TEST_CASE("Euclidean energy vanishes along the path") {
    const Setup s = setup(triple_well(1.0, 1.0));
    const InstantonSolution sol = solve_trajectory(s.model, s.pairs[0]);
    double worst = 0.0;
    for (std::size_t j = 0; j < sol.tau_grid().size(); ++j) {
      const double v = sol.x_bar_dot()[j];
      worst = std::max(worst, std::abs(0.5 * v * v - s.model.value(sol.x_bar()[j])));
    }
    CHECK(worst <= 1e-13 * s.pairs[0].barrier_top);
  }

  TEST_CASE("zero mode solves the fluctuation equation") {
    const Setup s = setup(symmetric_double_well(3.0, 1.0));
    const InstantonSolution sol = solve_trajectory(s.model, s.pairs[0]);
    const auto x0 = zero_mode(sol);
    const double h = sol.step();
    double worst = 0.0, peak = 0.0;
    for (std::size_t j = 1; j + 1 < x0.size(); ++j) {
      const double d2 = (x0[j + 1] - 2.0 * x0[j] + x0[j - 1]) / (h * h);
      worst = std::max(worst, std::abs(-d2 + s.model.second_derivative(sol.x_bar()[j]) * x0[j]));
      peak = std::max(peak, x0[j]);
    }
    // Second differences are off by h^2/12 times the fourth derivative.
    CHECK(worst <= 0.1 * h * h * peak);
  }

  TEST_CASE("rejects a window too short for the amplitude fit") {
    const Setup s = setup(symmetric_double_well(3.0, 1.0));
    TrajectoryOptions opt;
    opt.half_window = 10.0;
    try {
      solve_trajectory(s.model, s.pairs[0], opt);
      FAIL("expected Config error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Config);
    }
  }
}
