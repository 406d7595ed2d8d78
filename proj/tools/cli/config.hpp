#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "multiwell/instanton.hpp"
#include "multiwell/potential.hpp"

namespace multiwell::cli {

struct PotentialSpec {
  std::string preset;                 ///< "symmetric-double-well", "triple-well" or "" for raw coefficients
  std::optional<double> lambda, a, omega;
  std::vector<double> coefficients;
};

struct AnalysisConfig {
  PotentialSpec potential;
  double hbar = 1.0;
  double window = 40.0;
  AnchorConvention anchor = AnchorConvention::EqualAmplitude;
  double ode_tol = 1e-13;
  double quad_tol = 1e-12;
  double level_tol = 1e-9;
  std::optional<int> degeneracy;

  bool oracle_enabled = true;
  int grid_points = 8192;
  std::optional<double> grid_x_min, grid_x_max;
  std::optional<int> oracle_levels;

  std::optional<double> overlap_tau_max;
  int overlap_samples = 101;
  int overlap_pair = 0;

  std::string sweep_parameter = "lambda";
  std::vector<double> sweep_values;

  std::optional<std::string> output_path;
};

/// Parses and validates; throws Error(Config) on anything malformed.
AnalysisConfig parse_config(const nlohmann::json& j);
nlohmann::json to_json(const AnalysisConfig& c);
AnalysisConfig default_config();

/// Raw (un-levelled) polynomial described by the spec.
PotentialModel build_model(const PotentialSpec& spec);

/// Copy of `spec` with one named parameter replaced (used by sweeps).
PotentialSpec with_parameter(const PotentialSpec& spec, const std::string& name, double value);

}  // namespace multiwell::cli
