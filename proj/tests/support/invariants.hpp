#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "multiwell/potential.hpp"

namespace multiwell::testing {

struct GeneratedPotential {
  std::string label;
  std::vector<double> coefficients;
  bool even = false;
};

/// Coefficients of the product of two polynomials.
std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b);

/// Random same-level potentials: even quartics c (x^2 - a^2)^2, asymmetric sextics
/// c (x - x1)^2 (x - x2)^2 (1 + b x + d x^2) and triple wells c (x - x1)^2 (x - x2)^2 (x - x3)^2.
std::vector<GeneratedPotential> random_potentials(int count, std::uint64_t seed);

/// The two presets in their acceptance configuration.
std::vector<GeneratedPotential> preset_potentials();

/// Runs the invariant suite on one potential; returns a description per violation.
std::vector<std::string> check_invariants(const GeneratedPotential& p);

}  // namespace multiwell::testing
