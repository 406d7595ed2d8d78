#include <cmath>

#include "doctest.h"
#include "multiwell/error.hpp"
#include "multiwell/potential.hpp"

using namespace multiwell;
using doctest::Approx;

TEST_SUITE("potential") {
  TEST_CASE("polynomial evaluation, derivative and shift") {
    const Polynomial p({1.0, -2.0, 0.0, 3.0});  // 1 - 2x + 3x^3
    CHECK(p(2.0) == Approx(21.0));
    CHECK(p.derivative()(2.0) == Approx(34.0));
    const Polynomial s = p.shifted(1.5);
    for (double u : {-1.0, 0.0, 0.3, 2.0}) CHECK(s(u) == Approx(p(1.5 + u)).epsilon(1e-14));
  }

  TEST_CASE("local expansion drops the constant and linear terms") {
    const PotentialModel m = level_potential(symmetric_double_well(3.0, 1.0));
    const LocalExpansion e = m.expand_about(1.0);
    for (double u : {-0.5, 1e-6, 0.25}) {
      CHECK(e.value(u) == Approx(m.value(1.0 + u)).epsilon(1e-12));
      CHECK(e.q_slope(u) == Approx((e.q(u) - e.q(0.0)) / u).epsilon(1e-6));
    }
    CHECK(e.second_derivative(0.0) == Approx(1.0));
  }

  TEST_CASE("double well: two minima, omega and barrier") {
    const PotentialModel m = level_potential(symmetric_double_well(0.2, std::sqrt(15.0)));
    const auto wells = find_wells(m);
    REQUIRE(wells.size() == 2);
    CHECK(wells[0].position == Approx(-std::sqrt(15.0)));
    CHECK(wells[1].position == Approx(std::sqrt(15.0)));
    CHECK(wells[0].omega == Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(wells[0].level) < 1e-12);
    const auto pairs = adjacent_pairs(m, wells);
    REQUIRE(pairs.size() == 1);
    CHECK(std::abs(pairs[0].barrier_position) < 1e-10);
    CHECK(pairs[0].barrier_top == Approx(0.2 / 24.0 * 225.0));
  }

  TEST_CASE("triple well: outer wells twice as stiff") {
    const auto wells = find_wells(level_potential(triple_well(1.0, 1.0)));
    REQUIRE(wells.size() == 3);
    CHECK(wells[1].omega == Approx(1.0));
    CHECK(wells[0].omega == Approx(2.0));
    CHECK(wells[2].omega == Approx(2.0));
  }

  TEST_CASE("level_potential moves the bottoms to zero") {
    const PotentialModel raw({4.0 + 7.0, 0.0, -4.0, 0.0, 1.0});  // (x^2-2)^2 + 7
    const PotentialModel m = level_potential(raw);
    CHECK(m.zero_shift() == Approx(-7.0));
    CHECK(std::abs(m.value(std::sqrt(2.0))) < 1e-12);
  }

  TEST_CASE("rejects single wells and tilted wells") {
    try {
      find_wells(PotentialModel({0.0, 0.0, 1.0, 0.0, 1.0}));
      FAIL("expected NotMultiWell");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NotMultiWell);
    }
    try {
      find_wells(PotentialModel({0.0, 0.1, -1.0, 0.0, 1.0}));
      FAIL("expected NotSameLevel");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NotSameLevel);
    }
  }

  TEST_CASE("same-level check and critical points") {
    const PotentialModel m = level_potential(triple_well(1.0, 1.0));
    const auto cp = scan_critical_points(m);
    CHECK(cp.minima.size() == 3);
    CHECK(cp.maxima.size() == 2);
    CHECK(same_level_check(m, find_wells(m)));
  }
}
