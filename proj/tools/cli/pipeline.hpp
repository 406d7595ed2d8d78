#pragma once

#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "json.hpp"
#include "multiwell/fluctuation.hpp"
#include "multiwell/instanton.hpp"
#include "multiwell/oracle.hpp"
#include "multiwell/twolevel.hpp"

namespace multiwell::cli {

struct PairAnalysis {
  int index = 0;
  InstantonSolution instanton;
  double action_from_samples = 0.0;
  GYResult gy;
  KayFactor kay;
  TwoLevelSystem system;
  int lower_well = 0;   ///< index of the well playing "initial" in the two-level system
  int upper_well = 0;
  bool swapped = false;  ///< lower_well is the pair's final (right-hand) well
  std::vector<WavefunctionValue> wavefunctions;
};

struct OracleAnalysis {
  SpectralResult spectrum;
  std::vector<double> positions;
  std::vector<std::vector<double>> endpoint_values;
};

struct Analysis {
  AnalysisConfig config;
  PotentialModel model;
  std::vector<Well> wells;
  std::vector<PairAnalysis> pairs;
  std::vector<double> predicted_levels;  ///< nearest-neighbour tunnelling chain
  std::optional<OracleAnalysis> oracle;
  std::vector<std::string> warnings;
};

Analysis analyze(const AnalysisConfig& config, bool run_oracle);

/// Instanton-predicted splitting across the ground-state manifold and the oracle value.
struct SplittingComparison {
  double predicted = 0.0;
  double oracle = 0.0;
  double relative_error = 0.0;
};
std::optional<SplittingComparison> compare_splitting(const Analysis& a);

nlohmann::json wells_json(const std::vector<Well>& wells, double hbar);
nlohmann::json instanton_json(const InstantonSolution& sol, double action_from_samples);
nlohmann::json gy_json(const GYResult& gy);
nlohmann::json system_json(const TwoLevelSystem& sys);
nlohmann::json kay_json(const KayFactor& k);
nlohmann::json oracle_json(const OracleAnalysis& o);
nlohmann::json report_json(const Analysis& a);

/// Per-pair summary table.
std::string analysis_csv(const Analysis& a);

struct SweepRow {
  double value = 0.0;
  std::optional<double> action_over_hbar, two_hbar_k_sqrt_g, predicted_splitting, oracle_splitting,
      relative_error;
  std::string error;
};

std::vector<SweepRow> run_sweep(const AnalysisConfig& config);
nlohmann::json sweep_json(const std::vector<SweepRow>& rows, const std::string& parameter);
std::string sweep_csv(const std::vector<SweepRow>& rows, const std::string& parameter);

struct OverlapRow {
  double tau, odd, even, oracle_odd, oracle_even;
};
std::vector<OverlapRow> overlap_series(const Analysis& a);
std::string overlaps_csv(const std::vector<OverlapRow>& rows);
nlohmann::json overlaps_json(const std::vector<OverlapRow>& rows);

std::string oracle_csv(const OracleAnalysis& o);
/// Sampled trajectories of every pair: pair, tau, x_bar, x_bar_dot, x0.
std::string trajectory_csv(const Analysis& a);
std::string gy_csv(const Analysis& a);

/// Full-precision decimal for CSV cells.
std::string fmt(double v);

}  // namespace multiwell::cli
