#include "doctest.h"
#include "invariants.hpp"

using namespace multiwell::testing;

TEST_SUITE("properties") {
  TEST_CASE("invariant suite on the presets and random same-level potentials") {
    auto all = preset_potentials();
    for (auto& p : random_potentials(20, 20261017)) all.push_back(std::move(p));
    for (const auto& p : all) {
      CAPTURE(p.label);
      const auto bad = check_invariants(p);
      for (const auto& b : bad) MESSAGE(b);
      CHECK(bad.empty());
    }
  }

  TEST_CASE("generated sextics have distinct well frequencies") {
    const auto ps = random_potentials(3, 7);
    const auto m = multiwell::level_potential(multiwell::PotentialModel(ps[1].coefficients));
    const auto wells = multiwell::find_wells(m);
    REQUIRE(wells.size() == 2);
    CHECK(wells[0].omega != doctest::Approx(wells[1].omega));
  }
}
