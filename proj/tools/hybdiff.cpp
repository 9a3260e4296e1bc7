#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hybdiff/cli.hpp"

namespace {

using namespace hybdiff;

int with_scenario(const std::string& path, const CommandOptions& opt, auto&& body) {
  try {
    const Scenario sc = prepare(load_scenario(path), opt);
    return body(sc);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << path << ": " << e.what() << '\n';
    return exit_code::validation;
  } catch (const IoError& e) {
    std::cerr << "error: I/O failure: " << e.path() << '\n';
    return exit_code::io;
  } catch (const NonFiniteState& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code::non_finite;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulate, certify and compare second-order differentiators"};
  app.require_subcommand(0, 1);

  CommandOptions opt;
  std::string out_dir = ".";
  std::string format = "kv";
  std::string family;
  bool print_defaults = false;

  app.add_flag("--print-defaults", print_defaults, "Print the default scenario and exit");
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out-dir", out_dir, "Directory for CSV and report files");
    sub->add_option("--seed-override", opt.seed_override, "Replace noise.seed");
    sub->add_option("--dt-override", opt.dt_override, "Replace sim.dt");
    sub->add_option("--format", format, "Report format")->check(CLI::IsMember({"csv", "kv"}));
    sub->add_option("--family", family, "Only run families of this kind")
        ->check(CLI::IsMember({"hybrid", "levant", "linear", "nonlinear", "hybrid-discontinuous", "gred"}));
  };

  std::string scenario_path;
  auto* run = app.add_subcommand("run", "Simulate every family of a scenario");
  run->add_option("scenario", scenario_path, "Scenario file")->required();
  add_common(run);

  std::string params_path;
  auto* certify = app.add_subcommand("certify", "Print Lyapunov certificates and error bounds");
  certify->add_option("params", params_path, "Scenario or parameter file")->required();
  certify->add_flag("--strict", opt.strict, "Exit 5 when any bound hypothesis fails");
  add_common(certify);

  FreqGrid grid;
  auto* freq = app.add_subcommand("freq", "Frequency response and describing-function tables");
  freq->add_option("params", params_path, "Scenario or parameter file")->required();
  freq->add_option("--omega-min", grid.omega_min, "Lowest frequency, rad/s");
  freq->add_option("--omega-max", grid.omega_max, "Highest frequency, rad/s");
  freq->add_option("--points", grid.points, "Log-spaced frequency points");
  freq->add_option("--amplitudes", grid.amplitudes, "Amplitude grid")->delimiter(',');
  add_common(freq);

  std::string axis;
  std::vector<double> values;
  auto* sw = app.add_subcommand("sweep", "Run a scenario over values of one numeric field");
  sw->add_option("scenario", scenario_path, "Scenario file")->required();
  sw->add_option("--axis", axis, "Field path, e.g. noise.epsilon or linear.tau")->required();
  sw->add_option("--values", values, "Comma-separated values")->delimiter(',');
  add_common(sw);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_code::validation;
  }

  if (print_defaults) {
    std::cout << serialize(default_scenario());
    return exit_code::ok;
  }
  opt.out_dir = out_dir;
  opt.format = format == "csv" ? ReportFormat::csv : ReportFormat::kv;
  if (!family.empty()) opt.family = parse_family_kind(family);

  if (run->parsed())
    return with_scenario(scenario_path, opt, [&](const Scenario& sc) { return cmd_run(sc, opt, std::cout, std::cerr); });
  if (certify->parsed())
    return with_scenario(params_path, opt, [&](const Scenario& sc) { return cmd_certify(sc, opt, std::cout); });
  if (freq->parsed())
    return with_scenario(params_path, opt,
                         [&](const Scenario& sc) { return cmd_freq(sc, grid, opt, std::cout, std::cerr); });
  if (sw->parsed())
    return with_scenario(scenario_path, opt,
                         [&](const Scenario& sc) { return cmd_sweep(sc, axis, values, opt, std::cout, std::cerr); });
  std::cout << app.help();
  return exit_code::validation;
}
