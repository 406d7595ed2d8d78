#include "pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "multiwell/error.hpp"

namespace multiwell::cli {

using nlohmann::json;

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::vector<int> neighbours(int k, int n) {
  std::vector<int> out;
  if (k > 0) out.push_back(k - 1);
  if (k + 1 < n) out.push_back(k + 1);
  return out;
}

PairAnalysis analyze_pair(const Analysis& a, const WellPair& pair, int index) {
  const AnalysisConfig& c = a.config;
  TrajectoryOptions topt;
  topt.ode_tol = c.ode_tol;
  topt.quad_tol = c.quad_tol;
  topt.anchor = c.anchor;
  InstantonSolution sol = solve_trajectory(a.model, pair, topt);

  GYOptions gopt;
  gopt.window = c.window;
  gopt.ode_tol = std::max(c.ode_tol, 1e-14);
  GYResult gy = gelfand_yaglom(sol, gopt);
  const KayFactor kay = kay_factor(sol, gy.k0_analytic, c.hbar);

  const int n = static_cast<int>(a.wells.size());
  const Well& wi = pair.initial;
  const Well& wf = pair.final;
  const bool swapped = wf.ground_energy(c.hbar) < wi.ground_energy(c.hbar);
  const int lower = swapped ? index + 1 : index;
  const int upper = swapped ? index : index + 1;
  const auto around = neighbours(lower, n);
  const int g = c.degeneracy.value_or(static_cast<int>(around.size()));
  const Well& lo = a.wells[lower];
  const Well& up = a.wells[upper];
  TwoLevelSystem sys =
      two_level_energies(lo.ground_energy(c.hbar), up.ground_energy(c.hbar), c.hbar, kay.value, g);

  std::vector<WavefunctionValue> wf_values;
  if (static_cast<int>(around.size()) == g) {
    std::vector<Well> finals;
    for (int k : around) finals.push_back(a.wells[k]);
    wf_values = wavefunction_amplitudes(sys, lo, finals);
  }
  const double s_check = action_from_trajectory(sol);
  return PairAnalysis{index, std::move(sol), s_check, gy, kay, sys, lower, upper, swapped, std::move(wf_values)};
}

std::vector<double> chain_levels(const Analysis& a) {
  const int n = static_cast<int>(a.wells.size());
  SymTridiagonal t;
  for (const Well& w : a.wells) t.diag.push_back(w.ground_energy(a.config.hbar));
  for (const PairAnalysis& p : a.pairs) t.off.push_back(-a.config.hbar * p.kay.value);
  std::vector<double> out;
  for (int k = 0; k < n; ++k) out.push_back(t.eigenvalue(k));
  return out;
}

}  // namespace

Analysis analyze(const AnalysisConfig& config, bool run_oracle) {
  ScanOptions scan;
  scan.level_tol = config.level_tol;
  const PotentialModel model = level_potential(build_model(config.potential), scan);
  Analysis a{config, model, find_wells(model, scan), {}, {}, {}, {}};
  const auto pairs = adjacent_pairs(a.model, a.wells);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    a.pairs.push_back(analyze_pair(a, pairs[k], static_cast<int>(k)));
    const PairAnalysis& p = a.pairs.back();
    if (p.kay.dilute_gas_marginal)
      a.warnings.push_back("pair " + std::to_string(k) + ": S/hbar = " + fmt(p.kay.action_over_hbar) +
                           " < 5, dilute instanton gas is marginal");
    if (p.swapped)
      a.warnings.push_back("pair " + std::to_string(k) +
                           ": wells reordered so the lower SHO level is the initial one");
    if (p.wavefunctions.empty())
      a.warnings.push_back("pair " + std::to_string(k) +
                           ": degeneracy override does not match the well layout; no wavefunction table");
  }
  a.predicted_levels = chain_levels(a);

  if (run_oracle && config.oracle_enabled) {
    GridSpec grid = default_grid(a.wells, config.hbar, config.grid_points);
    if (config.grid_x_min) {
      grid.x_min = *config.grid_x_min;
      grid.x_max = *config.grid_x_max;
    }
    const int levels = config.oracle_levels.value_or(static_cast<int>(a.wells.size()));
    OracleAnalysis o{diagonalize_schrodinger(a.model, grid, levels), {}, {}};
    for (const Well& w : a.wells) o.positions.push_back(w.position);
    o.endpoint_values = endpoint_wavefunction_values(o.spectrum, o.positions);
    a.oracle = std::move(o);
  }
  return a;
}

std::optional<SplittingComparison> compare_splitting(const Analysis& a) {
  if (!a.oracle) return std::nullopt;
  const auto& e = a.oracle->spectrum.energies;
  const std::size_t n = a.predicted_levels.size();
  if (e.size() < n || n < 2) return std::nullopt;
  SplittingComparison s;
  s.predicted = a.predicted_levels.back() - a.predicted_levels.front();
  s.oracle = e[n - 1] - e[0];
  s.relative_error = (s.predicted - s.oracle) / s.oracle;
  return s;
}

json wells_json(const std::vector<Well>& wells, double hbar) {
  json out = json::array();
  for (const Well& w : wells)
    out.push_back({{"position", w.position},
                   {"omega", w.omega},
                   {"level", w.level},
                   {"ground_energy", w.ground_energy(hbar)}});
  return out;
}

json instanton_json(const InstantonSolution& sol, double action_from_samples) {
  const Amplitudes& a = sol.amplitudes();
  return {
      {"initial_well", sol.pair().initial.position},
      {"final_well", sol.pair().final.position},
      {"barrier_position", sol.pair().barrier_position},
      {"barrier_top", sol.pair().barrier_top},
      {"tau1", sol.tau1()},
      {"anchor_position", sol.anchor_position()},
      {"action", sol.action()},
      {"action_from_samples", action_from_samples},
      {"amp_i", a.amp_i},
      {"amp_f", a.amp_f},
      {"c_i", a.c_i},
      {"c_f", a.c_f},
      {"fit_residual", a.residual},
      {"samples", sol.tau_grid().size()},
      {"step", sol.step()},
  };
}

json gy_json(const GYResult& gy) {
  return {
      {"window", gy.window},
      {"tau_i", gy.tau_i},
      {"tau_f", gy.tau_f},
      {"log_psi0_f", gy.log_psi0_f},
      {"log_psi0_ref_f", gy.log_psi0_ref_f},
      {"log_psi0_ref_numeric", gy.log_psi0_ref_numeric},
      {"log_psi0_forward", gy.log_psi0_forward ? json(*gy.log_psi0_forward) : json(nullptr)},
      {"lambda0", number_or_null(gy.lambda0)},
      {"lambda0_first_order", number_or_null(gy.lambda0_first_order)},
      {"k0_numeric", gy.k0_numeric},
      {"k0_analytic", gy.k0_analytic},
      {"wronskian_drift", gy.wronskian_drift},
  };
}

json system_json(const TwoLevelSystem& sys) {
  return {
      {"e_i", sys.e_i},
      {"e_f", sys.e_f},
      {"hbar", sys.hbar},
      {"big_k", sys.big_k},
      {"degeneracy", sys.degeneracy},
      {"e_split", sys.e_split},
      {"small_k", sys.small_k ? json(*sys.small_k) : json(nullptr)},
      {"E_plus", sys.e_plus},
      {"E_minus", sys.e_minus},
      {"delta_E", sys.delta_e},
  };
}

json kay_json(const KayFactor& k) {
  return {
      {"value", k.value},
      {"via_amplitudes", k.via_amplitudes},
      {"via_positions", k.via_positions},
      {"prefactor", k.prefactor},
      {"action_over_hbar", k.action_over_hbar},
      {"dilute_gas_marginal", k.dilute_gas_marginal},
  };
}

json oracle_json(const OracleAnalysis& o) {
  const SpectralResult& s = o.spectrum;
  json table = json::array();
  for (std::size_t k = 0; k < o.endpoint_values.size(); ++k)
    for (std::size_t j = 0; j < o.positions.size(); ++j)
      table.push_back({{"level", k}, {"position", o.positions[j]}, {"value", o.endpoint_values[k][j]}});
  return {
      {"energies", s.energies},
      {"error_estimates", s.error_estimates},
      {"parity", s.parity},
      {"grid", {{"x_min", s.coarse_grid.x_min}, {"x_max", s.coarse_grid.x_max},
                {"n_points", s.coarse_grid.n_points}, {"refined_points", s.grid.n_points},
                {"hbar", s.grid.hbar}}},
      {"endpoint_values", table},
  };
}

json report_json(const Analysis& a) {
  json pairs = json::array();
  for (const PairAnalysis& p : a.pairs) {
    json wf = json::array();
    for (const WavefunctionValue& v : p.wavefunctions)
      wf.push_back({{"level", v.level}, {"energy", v.energy}, {"position", v.position}, {"value", v.value}});
    pairs.push_back({
        {"index", p.index},
        {"instanton", instanton_json(p.instanton, p.action_from_samples)},
        {"gy", gy_json(p.gy)},
        {"kay", kay_json(p.kay)},
        {"two_level", system_json(p.system)},
        {"lower_well", p.lower_well},
        {"upper_well", p.upper_well},
        {"swapped", p.swapped},
        {"wavefunctions", wf},
    });
  }
  json report{
      {"config", to_json(a.config)},
      {"wells", wells_json(a.wells, a.config.hbar)},
      {"zero_shift", a.model.zero_shift()},
      {"pairs", pairs},
      {"predicted_levels", a.predicted_levels},
      {"warnings", a.warnings},
  };
  if (a.oracle) {
    report["oracle"] = oracle_json(*a.oracle);
    json deltas = json::array();
    const auto& e = a.oracle->spectrum.energies;
    for (std::size_t k = 0; k < std::min(e.size(), a.predicted_levels.size()); ++k)
      deltas.push_back({{"level", k},
                        {"predicted", a.predicted_levels[k]},
                        {"oracle", e[k]},
                        {"delta", e[k] - a.predicted_levels[k]}});
    report["comparison"] = {{"levels", deltas}};
    if (auto s = compare_splitting(a))
      report["comparison"]["splitting"] = {
          {"predicted", s->predicted}, {"oracle", s->oracle}, {"relative_error", s->relative_error}};
  } else {
    report["oracle"] = nullptr;
  }
  return report;
}

std::string analysis_csv(const Analysis& a) {
  std::ostringstream out;
  out << "pair,initial_well,final_well,action,amp_i,amp_f,c_i,c_f,k0_numeric,k0_analytic,big_k,"
         "degeneracy,E_minus,E_plus,delta_E\n";
  for (const PairAnalysis& p : a.pairs) {
    const Amplitudes& am = p.instanton.amplitudes();
    out << p.index << ',' << fmt(p.instanton.pair().initial.position) << ','
        << fmt(p.instanton.pair().final.position) << ',' << fmt(p.instanton.action()) << ','
        << fmt(am.amp_i) << ',' << fmt(am.amp_f) << ',' << fmt(am.c_i) << ',' << fmt(am.c_f) << ','
        << fmt(p.gy.k0_numeric) << ',' << fmt(p.gy.k0_analytic) << ',' << fmt(p.kay.value) << ','
        << p.system.degeneracy << ',' << fmt(p.system.e_minus) << ',' << fmt(p.system.e_plus) << ','
        << fmt(p.system.delta_e) << '\n';
  }
  return out.str();
}

std::vector<SweepRow> run_sweep(const AnalysisConfig& config) {
  if (config.sweep_values.empty()) throw Error(ErrorKind::Config, "sweep: values list is empty");
  with_parameter(config.potential, config.sweep_parameter, config.sweep_values.front());
  std::vector<SweepRow> rows;
  for (double v : config.sweep_values) {
    SweepRow row;
    row.value = v;
    try {
      AnalysisConfig c = config;
      c.potential = with_parameter(config.potential, config.sweep_parameter, v);
      const Analysis a = analyze(c, true);
      const PairAnalysis& p = a.pairs.front();
      row.action_over_hbar = p.kay.action_over_hbar;
      row.two_hbar_k_sqrt_g = 2.0 * p.system.coupling();
      if (auto s = compare_splitting(a)) {
        row.predicted_splitting = s->predicted;
        row.oracle_splitting = s->oracle;
        row.relative_error = s->relative_error;
      }
    } catch (const Error& e) {
      row.error = std::string(to_string(e.kind())) + ": " + e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

namespace {

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
std::string opt_csv(const std::optional<double>& v) { return v ? fmt(*v) : ""; }

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

}  // namespace

json sweep_json(const std::vector<SweepRow>& rows, const std::string& parameter) {
  json out = json::array();
  for (const SweepRow& r : rows)
    out.push_back({{parameter, r.value},
                   {"action_over_hbar", opt_json(r.action_over_hbar)},
                   {"two_hbar_k_sqrt_g", opt_json(r.two_hbar_k_sqrt_g)},
                   {"predicted_splitting", opt_json(r.predicted_splitting)},
                   {"oracle_splitting", opt_json(r.oracle_splitting)},
                   {"relative_error", opt_json(r.relative_error)},
                   {"error", r.error.empty() ? json(nullptr) : json(r.error)}});
  return {{"parameter", parameter}, {"rows", out}};
}

std::string sweep_csv(const std::vector<SweepRow>& rows, const std::string& parameter) {
  std::ostringstream out;
  out << parameter
      << ",action_over_hbar,two_hbar_k_sqrt_g,predicted_splitting,oracle_splitting,relative_error,error\n";
  for (const SweepRow& r : rows)
    out << fmt(r.value) << ',' << opt_csv(r.action_over_hbar) << ',' << opt_csv(r.two_hbar_k_sqrt_g) << ','
        << opt_csv(r.predicted_splitting) << ',' << opt_csv(r.oracle_splitting) << ','
        << opt_csv(r.relative_error) << ',' << csv_quote(r.error) << '\n';
  return out.str();
}

std::vector<OverlapRow> overlap_series(const Analysis& a) {
  const int idx = a.config.overlap_pair;
  if (idx >= static_cast<int>(a.pairs.size()))
    throw Error(ErrorKind::Config, "overlaps.pair is out of range for this potential");
  const TwoLevelSystem& sys = a.pairs[idx].system;
  const double gap = sys.e_plus - sys.e_minus;
  const double tau_max = a.config.overlap_tau_max.value_or(gap > 0.0 ? 5.0 * sys.hbar / gap : 1.0);
  const int n = a.config.overlap_samples;
  std::vector<OverlapRow> rows;
  for (int k = 0; k < n; ++k) {
    const double tau = tau_max * k / (n - 1);
    const auto u = propagator_2x2(sys, tau);
    rows.push_back({tau, overlap_odd(sys, tau), overlap_even(sys, tau), u[2], u[0]});
  }
  return rows;
}

std::string overlaps_csv(const std::vector<OverlapRow>& rows) {
  std::ostringstream out;
  out << "tau,odd,even,oracle_odd,oracle_even\n";
  for (const OverlapRow& r : rows)
    out << fmt(r.tau) << ',' << fmt(r.odd) << ',' << fmt(r.even) << ',' << fmt(r.oracle_odd) << ','
        << fmt(r.oracle_even) << '\n';
  return out.str();
}

json overlaps_json(const std::vector<OverlapRow>& rows) {
  json out = json::array();
  for (const OverlapRow& r : rows)
    out.push_back({{"tau", r.tau},
                   {"odd", r.odd},
                   {"even", r.even},
                   {"oracle_odd", r.oracle_odd},
                   {"oracle_even", r.oracle_even}});
  return out;
}

std::string oracle_csv(const OracleAnalysis& o) {
  const SpectralResult& s = o.spectrum;
  std::ostringstream out;
  out << 'x';
  for (std::size_t k = 0; k < s.wavefunctions.size(); ++k) out << ",psi" << k;
  out << '\n';
  for (int j = 0; j < s.grid.n_points; ++j) {
    out << fmt(s.grid.x(j));
    for (const auto& psi : s.wavefunctions) out << ',' << fmt(psi[j]);
    out << '\n';
  }
  return out.str();
}

std::string trajectory_csv(const Analysis& a) {
  std::ostringstream out;
  out << "pair,tau,x_bar,x_bar_dot,x0\n";
  for (const PairAnalysis& p : a.pairs) {
    const InstantonSolution& s = p.instanton;
    for (std::size_t j = 0; j < s.tau_grid().size(); ++j)
      out << p.index << ',' << fmt(s.tau_grid()[j]) << ',' << fmt(s.x_bar()[j]) << ',' << fmt(s.x_bar_dot()[j])
          << ',' << fmt(std::exp(s.log_x0()[j])) << '\n';
  }
  return out.str();
}

std::string gy_csv(const Analysis& a) {
  std::ostringstream out;
  out << "pair,window,tau_i,tau_f,log_psi0_f,log_psi0_ref_f,lambda0,lambda0_first_order,k0_numeric,"
         "k0_analytic,wronskian_drift\n";
  for (const PairAnalysis& p : a.pairs) {
    const GYResult& g = p.gy;
    out << p.index << ',' << fmt(g.window) << ',' << fmt(g.tau_i) << ',' << fmt(g.tau_f) << ','
        << fmt(g.log_psi0_f) << ',' << fmt(g.log_psi0_ref_f) << ',' << fmt(g.lambda0) << ','
        << fmt(g.lambda0_first_order) << ',' << fmt(g.k0_numeric) << ',' << fmt(g.k0_analytic) << ','
        << fmt(g.wronskian_drift) << '\n';
  }
  return out.str();
}

}  // namespace multiwell::cli
