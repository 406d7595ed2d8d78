#include "config.hpp"

#include <cmath>
#include <set>

#include "multiwell/error.hpp"

namespace multiwell::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorKind::Config, "config: " + msg); }

void only_keys(const json& j, const std::string& where, std::set<std::string> allowed) {
  if (!j.is_object()) fail(where + " must be an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) fail("unknown key '" + key + "' in " + where);
}

double number(const json& j, const std::string& name) {
  if (!j.is_number()) fail(name + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(name + " must be finite");
  return v;
}

double positive(const json& j, const std::string& name) {
  const double v = number(j, name);
  if (!(v > 0.0)) fail(name + " must be positive");
  return v;
}

int integer(const json& j, const std::string& name) {
  if (!j.is_number_integer()) fail(name + " must be an integer");
  return j.get<int>();
}

template <class T, class F>
void optional_field(const json& obj, const char* key, std::optional<T>& out, F read) {
  if (obj.contains(key) && !obj.at(key).is_null()) out = read(obj.at(key), key);
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
json opt(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

AnalysisConfig default_config() {
  AnalysisConfig c;
  c.potential.preset = "symmetric-double-well";
  c.potential.lambda = 0.2;
  c.potential.omega = 1.0;
  return c;
}

AnalysisConfig parse_config(const json& j) {
  only_keys(j, "config", {"potential", "hbar", "window", "anchor", "tolerances", "degeneracy", "oracle",
                          "overlaps", "sweep", "output"});
  AnalysisConfig c = default_config();

  if (j.contains("potential")) {
    const json& p = j.at("potential");
    only_keys(p, "potential", {"preset", "lambda", "a", "omega", "coefficients"});
    PotentialSpec s;
    if (p.contains("coefficients")) {
      if (p.contains("preset")) fail("potential: give either preset or coefficients, not both");
      if (!p.at("coefficients").is_array()) fail("potential.coefficients must be an array");
      for (const auto& v : p.at("coefficients")) s.coefficients.push_back(number(v, "coefficient"));
      if (p.contains("lambda") || p.contains("a") || p.contains("omega"))
        fail("potential: preset parameters are not allowed with coefficients");
    } else {
      if (!p.contains("preset") || !p.at("preset").is_string()) fail("potential.preset must be a string");
      s.preset = p.at("preset").get<std::string>();
      optional_field(p, "lambda", s.lambda, positive);
      optional_field(p, "a", s.a, positive);
      optional_field(p, "omega", s.omega, positive);
    }
    c.potential = s;
  }
  if (j.contains("hbar")) c.hbar = positive(j.at("hbar"), "hbar");
  if (j.contains("window")) c.window = positive(j.at("window"), "window");
  if (j.contains("anchor")) {
    const json& a = j.at("anchor");
    if (a == "equal-amplitude")
      c.anchor = AnchorConvention::EqualAmplitude;
    else if (a == "barrier-top")
      c.anchor = AnchorConvention::BarrierTop;
    else
      fail("anchor must be \"equal-amplitude\" or \"barrier-top\"");
  }
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    only_keys(t, "tolerances", {"ode_tol", "quad_tol", "level_tol"});
    if (t.contains("ode_tol")) c.ode_tol = positive(t.at("ode_tol"), "ode_tol");
    if (t.contains("quad_tol")) c.quad_tol = positive(t.at("quad_tol"), "quad_tol");
    if (t.contains("level_tol")) c.level_tol = positive(t.at("level_tol"), "level_tol");
  }
  optional_field(j, "degeneracy", c.degeneracy, [](const json& v, const std::string& n) {
    const int g = integer(v, n);
    if (g < 1) fail("degeneracy must be >= 1");
    return g;
  });
  if (j.contains("oracle")) {
    const json& o = j.at("oracle");
    only_keys(o, "oracle", {"enabled", "n_points", "x_min", "x_max", "n_levels"});
    if (o.contains("enabled")) {
      if (!o.at("enabled").is_boolean()) fail("oracle.enabled must be a boolean");
      c.oracle_enabled = o.at("enabled").get<bool>();
    }
    if (o.contains("n_points")) {
      c.grid_points = integer(o.at("n_points"), "oracle.n_points");
      if (c.grid_points < 16) fail("oracle.n_points must be >= 16");
    }
    optional_field(o, "x_min", c.grid_x_min, number);
    optional_field(o, "x_max", c.grid_x_max, number);
    optional_field(o, "n_levels", c.oracle_levels, [](const json& v, const std::string& n) {
      const int k = integer(v, n);
      if (k < 1) fail("oracle.n_levels must be >= 1");
      return k;
    });
    if (c.grid_x_min.has_value() != c.grid_x_max.has_value())
      fail("oracle.x_min and oracle.x_max must be given together");
    if (c.grid_x_min && !(*c.grid_x_max > *c.grid_x_min)) fail("oracle.x_max must exceed oracle.x_min");
  }
  if (j.contains("overlaps")) {
    const json& o = j.at("overlaps");
    only_keys(o, "overlaps", {"tau_max", "n_samples", "pair"});
    optional_field(o, "tau_max", c.overlap_tau_max, positive);
    if (o.contains("n_samples")) {
      c.overlap_samples = integer(o.at("n_samples"), "overlaps.n_samples");
      if (c.overlap_samples < 2) fail("overlaps.n_samples must be >= 2");
    }
    if (o.contains("pair")) {
      c.overlap_pair = integer(o.at("pair"), "overlaps.pair");
      if (c.overlap_pair < 0) fail("overlaps.pair must be >= 0");
    }
  }
  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    only_keys(s, "sweep", {"parameter", "values"});
    if (s.contains("parameter")) {
      if (!s.at("parameter").is_string()) fail("sweep.parameter must be a string");
      c.sweep_parameter = s.at("parameter").get<std::string>();
    }
    if (s.contains("values")) {
      if (!s.at("values").is_array()) fail("sweep.values must be an array");
      for (const auto& v : s.at("values")) c.sweep_values.push_back(number(v, "sweep value"));
    }
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    only_keys(o, "output", {"path"});
    if (o.contains("path") && !o.at("path").is_null()) {
      if (!o.at("path").is_string()) fail("output.path must be a string");
      c.output_path = o.at("path").get<std::string>();
    }
  }
  build_model(c.potential);  // validates the potential description
  return c;
}

json to_json(const AnalysisConfig& c) {
  json pot;
  if (c.potential.preset.empty()) {
    pot["coefficients"] = c.potential.coefficients;
  } else {
    pot["preset"] = c.potential.preset;
    if (c.potential.lambda) pot["lambda"] = *c.potential.lambda;
    if (c.potential.a) pot["a"] = *c.potential.a;
    if (c.potential.omega) pot["omega"] = *c.potential.omega;
  }
  return json{
      {"potential", pot},
      {"hbar", c.hbar},
      {"window", c.window},
      {"anchor", c.anchor == AnchorConvention::EqualAmplitude ? "equal-amplitude" : "barrier-top"},
      {"tolerances", {{"ode_tol", c.ode_tol}, {"quad_tol", c.quad_tol}, {"level_tol", c.level_tol}}},
      {"degeneracy", opt(c.degeneracy)},
      {"oracle",
       {{"enabled", c.oracle_enabled},
        {"n_points", c.grid_points},
        {"x_min", opt(c.grid_x_min)},
        {"x_max", opt(c.grid_x_max)},
        {"n_levels", opt(c.oracle_levels)}}},
      {"overlaps", {{"tau_max", opt(c.overlap_tau_max)}, {"n_samples", c.overlap_samples}, {"pair", c.overlap_pair}}},
      {"sweep", {{"parameter", c.sweep_parameter}, {"values", c.sweep_values}}},
      {"output", {{"path", c.output_path ? json(*c.output_path) : json(nullptr)}}},
  };
}

PotentialModel build_model(const PotentialSpec& spec) {
  if (spec.preset.empty()) {
    if (spec.coefficients.empty()) fail("potential needs a preset or coefficients");
    return PotentialModel(spec.coefficients);
  }
  if (spec.preset == "symmetric-double-well") {
    const double lambda = spec.lambda.value_or(3.0);
    if (spec.a && spec.omega) fail("symmetric-double-well: give a or omega, not both");
    const double omega = spec.omega.value_or(1.0);
    const double a = spec.a ? *spec.a : std::sqrt(3.0 * omega * omega / lambda);
    return symmetric_double_well(lambda, a);
  }
  if (spec.preset == "triple-well") {
    if (spec.omega) fail("triple-well takes lambda and a");
    return triple_well(spec.lambda.value_or(1.0), spec.a.value_or(1.0));
  }
  fail("unknown preset '" + spec.preset + "' (symmetric-double-well, triple-well)");
}

PotentialSpec with_parameter(const PotentialSpec& spec, const std::string& name, double value) {
  PotentialSpec out = spec;
  if (name == "lambda")
    out.lambda = value;
  else if (name == "a")
    out.a = value;
  else if (name == "omega")
    out.omega = value;
  else
    fail("sweep.parameter must be lambda, a or omega");
  if (out.preset.empty()) fail("sweeps need a preset potential");
  return out;
}

}  // namespace multiwell::cli
