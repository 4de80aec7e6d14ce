#include "aerochan/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aerochan/errors.hpp"
#include "aerochan/experiments.hpp"
#include "aerochan/results.hpp"
#include "aerochan/scenario.hpp"

namespace aerochan {

namespace {

namespace fs = std::filesystem;

struct CommonOptions {
  std::string scenario;
  std::string out;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::string format;
  int verbosity = 0;
  std::optional<double> fraction;
};

// Relative scenario paths that do not exist here are looked up under
// $AEROCHAN_SCENARIO_DIR.
fs::path resolve_scenario(const std::string& name) {
  if (name.empty()) return {};
  fs::path p(name);
  if (p.is_absolute() || fs::exists(p)) return p;
  if (const char* dir = std::getenv("AEROCHAN_SCENARIO_DIR"); dir && *dir) {
    const fs::path candidate = fs::path(dir) / p;
    if (fs::exists(candidate)) return candidate;
  }
  throw IoError(name, "scenario file not found");
}

ScenarioConfig prepare(const CommonOptions& o, std::ostream& err) {
  std::vector<std::string> overrides = o.sets;
  if (o.seed) overrides.push_back("seed=" + std::to_string(*o.seed));
  if (o.jobs) overrides.push_back("experiment.jobs=" + std::to_string(*o.jobs));
  if (!o.format.empty()) overrides.push_back("output.format=\"" + o.format + "\"");
  if (o.fraction) {
    std::ostringstream v;
    v.precision(17);
    v << *o.fraction;
    overrides.push_back("experiment.fraction=" + v.str());
  }
  ScenarioConfig config = load_scenario(resolve_scenario(o.scenario), overrides);
  if (!config.seed) {
    config.seed = std::random_device{}() | (static_cast<std::uint64_t>(std::random_device{}()) << 32);
    err << "aerochan: no seed given, using seed " << *config.seed << "\n";
  }
  if (!o.out.empty()) config.output.path = o.out;
  return config;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Airborne pathogen channel and detection models"};
  app.set_version_flag("--version", AEROCHAN_VERSION);
  app.require_subcommand(1);

  CommonOptions o;
  using Runner = std::function<ResultTable(const ScenarioConfig&)>;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"field", "Steady concentration on an (x, y, z) grid"},
      {"timeseries", "Multi-user concentration at the receiver centre over time"},
      {"freq", "Frequency response at the receiver centre"},
      {"delay", "Delay until the breath response reaches a fraction of steady state"},
      {"conc-vs-dist", "Concentration-to-emission ratio against distance and wind speed"},
      {"pmd", "Missed-detection probability against distance"},
      {"mc-pmd", "Monte Carlo missed detection against the analytic forms"},
      {"validate-oracles", "Check closed forms against the numerical oracles"},
  };
  const std::map<std::string, Runner> runners{
      {"field", run_field_grid},
      {"timeseries", run_timeseries},
      {"freq", run_frequency_response},
      {"delay", [](const ScenarioConfig& c) { return run_delay_to_fraction(c, c.experiment.fraction); }},
      {"conc-vs-dist", run_concentration_vs_distance},
      {"pmd", run_pmd_vs_distance},
      {"mc-pmd", run_mc_pmd},
      {"validate-oracles", run_oracle_suite},
  };

  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("-s,--scenario", o.scenario, "Scenario JSON file");
    sub->add_option("-o,--out", o.out, "Output file (default: output.path or stdout)");
    sub->add_option("--set", o.sets, "Override a scenario value, e.g. channel.wind_speed=70")
        ->take_all();
    sub->add_option("--seed", o.seed, "Random seed");
    sub->add_option("-j,--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_flag("-v,--verbose", o.verbosity, "More logging");
    if (name == "delay") sub->add_option("--fraction", o.fraction, "Target fraction in (0, 1)");
  }
  app.add_subcommand("schema", "Print the scenario JSON schema");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const std::string cmd = chosen->get_name();
  if (cmd == "schema") {
    out << scenario_schema();
    return kExitOk;
  }

  try {
    const ScenarioConfig config = prepare(o, err);
    if (o.verbosity > 0) {
      err << "aerochan: config_hash " << config_hash(config) << ", jobs "
          << config.experiment.jobs << "\n";
    }
    const auto t0 = std::chrono::steady_clock::now();
    const ResultTable table = runners.at(cmd)(config);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const OutputFormat fmt = parse_format(config.output.format);
    std::string dest = "stdout";
    if (config.output.path.empty()) {
      out << (fmt == OutputFormat::Csv ? format_csv(table) : format_json(table));
    } else {
      write_results(table, config.output.path, fmt);
      dest = config.output.path;
    }

    int code = kExitOk;
    std::string status = "ok";
    if (cmd == "validate-oracles") {
      const auto passed = table.column("passed");
      std::size_t failed = 0;
      for (std::size_t i = 0; i < passed.size(); ++i) {
        if (passed[i] != 1.0) {
          ++failed;
          err << "aerochan: oracle check failed: " << *table.meta("check." + std::to_string(i))
              << " value " << table.rows[i][1] << " limit " << table.rows[i][2] << "\n";
        }
      }
      if (failed) {
        code = kExitNumeric;
        status = std::to_string(failed) + " oracle check(s) over budget";
      }
    }
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.2f", secs);
    err << "aerochan " << cmd << ": " << table.rows.size() << " rows -> " << dest << " (seed "
        << *config.seed << ", config " << config_hash(config) << ", " << timing << " s, "
        << status << ")\n";
    return code;
  } catch (const ConfigError& e) {
    err << "aerochan: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "aerochan: domain error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericError& e) {
    err << "aerochan: numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const IoError& e) {
    err << "aerochan: I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "aerochan: error: " << e.what() << "\n";
    return kExitNumeric;
  }
}

}  // namespace aerochan
