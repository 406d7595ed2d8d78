#include "app.hpp"

#include <boost/version.hpp>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "config.hpp"
#include "multiwell/error.hpp"
#include "pipeline.hpp"

namespace multiwell::cli {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  std::ostringstream o;
  o << std::hex;
  o.width(16);
  o.fill('0');
  o << v;
  return o.str();
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json provenance(const AnalysisConfig& c, double wall_seconds) {
  return {
      {"tool", "multiwell"},
      {"version", kVersion},
      {"config_hash", "fnv1a64:" + hex(fnv1a(to_json(c).dump()))},
      {"compiler", std::string("g++ ") + __VERSION__},
      {"boost", BOOST_LIB_VERSION},
      {"timestamp", {{"utc", utc_now()}, {"wall_seconds", wall_seconds}}},
  };
}

AnalysisConfig load_config(const std::string& path) {
  if (path.empty()) return default_config();
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "config: cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Config, std::string("config: invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

void report_error(std::ostream& err, const std::string& kind, const std::string& message) {
  err << json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << '\n';
}

struct Options {
  std::string config_path;
  std::string out_path;
  std::string format = "json";
  bool quiet = false;
  bool no_oracle = false;
  std::string trajectory_path;
};

void emit(const std::string& text, const Options& o, const AnalysisConfig& c, std::ostream& out) {
  std::string path = o.out_path;
  if (path.empty() && c.output_path) path = *c.output_path;
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::Config, "cannot write '" + path + "'");
  f << text;
}

std::string finish(json doc, const AnalysisConfig& c, double seconds) {
  doc["provenance"] = provenance(c, seconds);
  return doc.dump(2) + "\n";
}

void warn(const Analysis& a, const Options& o, std::ostream& err) {
  if (o.quiet) return;
  for (const auto& w : a.warnings) err << "warning: " << w << '\n';
}

int dispatch(const std::string& command, const Options& o, std::ostream& out, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  const AnalysisConfig c = load_config(o.config_path);
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
  const bool csv = o.format == "csv";

  if (command == "print-config") {
    emit(to_json(c).dump(2) + "\n", o, c, out);
  } else if (command == "analyze") {
    const Analysis a = analyze(c, !o.no_oracle);
    warn(a, o, err);
    if (!o.trajectory_path.empty()) {
      std::ofstream f(o.trajectory_path);
      if (!f) throw Error(ErrorKind::Config, "cannot write '" + o.trajectory_path + "'");
      f << trajectory_csv(a);
    }
    emit(csv ? analysis_csv(a) : finish(report_json(a), c, elapsed()), o, c, out);
  } else if (command == "gy") {
    const Analysis a = analyze(c, false);
    warn(a, o, err);
    json pairs = json::array();
    for (const auto& p : a.pairs) pairs.push_back({{"index", p.index}, {"gy", gy_json(p.gy)}, {"kay", kay_json(p.kay)}});
    emit(csv ? gy_csv(a) : finish({{"config", to_json(c)}, {"pairs", pairs}}, c, elapsed()), o, c, out);
  } else if (command == "oracle") {
    AnalysisConfig oc = c;
    oc.oracle_enabled = true;
    const Analysis a = analyze(oc, true);
    warn(a, o, err);
    json doc{{"config", to_json(c)}, {"wells", wells_json(a.wells, c.hbar)}, {"oracle", oracle_json(*a.oracle)}};
    emit(csv ? oracle_csv(*a.oracle) : finish(doc, c, elapsed()), o, c, out);
  } else if (command == "overlaps") {
    const Analysis a = analyze(c, false);
    warn(a, o, err);
    const auto rows = overlap_series(a);
    json doc{{"config", to_json(c)},
             {"two_level", system_json(a.pairs[c.overlap_pair].system)},
             {"rows", overlaps_json(rows)}};
    emit(csv ? overlaps_csv(rows) : finish(doc, c, elapsed()), o, c, out);
  } else if (command == "sweep") {
    const auto rows = run_sweep(c);
    if (!o.quiet)
      for (const auto& r : rows)
        if (!r.error.empty()) err << "warning: " << c.sweep_parameter << " = " << fmt(r.value) << ": " << r.error << '\n';
    json doc = sweep_json(rows, c.sweep_parameter);
    doc["config"] = to_json(c);
    emit(csv ? sweep_csv(rows, c.sweep_parameter) : finish(doc, c, elapsed()), o, c, out);
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Instanton analysis of multi-well quantum tunnelling", "multiwell"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.footer("Configuration is a single JSON document (--config); `multiwell print-config` shows every key\n"
             "with its default. Exit codes: 0 ok, 1 analysis failure, 2 usage or configuration error.");
  Options o;

  struct Command {
    const char* name;
    const char* help;
  };
  const Command commands[] = {
      {"analyze", "wells, instantons, fluctuation determinant, tunnelling rates, levels, oracle comparison"},
      {"gy", "fluctuation determinant and tunnelling prefactor per well pair"},
      {"oracle", "direct diagonalization of the Schroedinger operator"},
      {"overlaps", "resummed overlap amplitudes against the exact two-level propagator"},
      {"sweep", "splitting error against the oracle over a parameter list"},
      {"print-config", "print the effective configuration"},
  };
  for (const auto& cmd : commands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("-c,--config", o.config_path, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("-o,--out", o.out_path, "write the result here instead of stdout");
    sub->add_option("-f,--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_flag("-q,--quiet", o.quiet, "suppress warnings");
    if (std::string(cmd.name) == "analyze") {
      sub->add_flag("--no-oracle", o.no_oracle, "skip the oracle");
      sub->add_option("--trajectory", o.trajectory_path, "also write the sampled instantons as CSV");
    }
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    report_error(err, "usage", e.what());
    return 2;
  }

  std::string command;
  for (const auto* sub : app.get_subcommands()) command = sub->get_name();
  try {
    return dispatch(command, o, out, err);
  } catch (const Error& e) {
    report_error(err, to_string(e.kind()), e.what());
    return e.kind() == ErrorKind::Config ? 2 : 1;
  } catch (const std::exception& e) {
    report_error(err, "internal", e.what());
    return 1;
  }
}

}  // namespace multiwell::cli
