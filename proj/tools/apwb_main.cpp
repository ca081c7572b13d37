// apwb: command-line driver for the experiment harness.
//
//   apwb <run|sod|hydro-table|perturb|longtime|mesh-sweep> [flags] [--config FILE]
//
// Exit codes: 0 success, 2 configuration error, 3 blow-up in a run that was
// expected to stay stable, 1 any other failure.

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "apwb/harness/config.hpp"
#include "apwb/harness/experiments.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitBlowUp = 3;

struct Invocation {
  std::string config_file;
  apwb::harness::KeyValues flags;  // in command-line order
};

void add_common_options(CLI::App* sub, Invocation& inv) {
  auto value = [&](const char* flag, const char* key, const char* help) {
    sub->add_option_function<std::string>(
        flag, [&inv, key](const std::string& v) { inv.flags.emplace_back(key, v); }, help);
  };
  value("--eps", "eps", "relaxation parameter epsilon in (0, 1]");
  value("--beta", "beta", "scaling exponent in [0, 1]");
  value("--gamma", "gamma", "adiabatic exponent >= 1 (1: isothermal)");
  value("--cells", "cells", "number of cells");
  value("--t-final", "t-final", "final time");
  value("--potential", "potential", "linear | quadratic | sine");
  value("--bc", "bc", "extrap | periodic | equilibrium | hydrostatic");
  value("--recon", "recon", "p | e | none");
  value("--variant", "variant", "ap | nonap");
  value("--zeta", "zeta", "perturbation amplitude");
  value("--cfl", "cfl", "CFL safety factor in (0, 1)");
  value("--out", "out", "output directory");
  value("--init", "init", "run only: equilibrium | discrete | sod | arch");
  value("--jobs", "jobs", "worker threads (0: all cores)");
  sub->add_flag_callback(
      "--fast", [&inv] { inv.flags.emplace_back("fast", "true"); },
      "reduced meshes and times for quick checks");
  sub->add_flag_callback(
      "--no-timing", [&inv] { inv.flags.emplace_back("timing", "false"); },
      "omit wall time from CSV metadata (byte-reproducible output)");
  sub->add_option("--config", inv.config_file, "key=value file; flags override it");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asymptotic-preserving well-balanced Euler solver with gravity and friction"};
  app.set_version_flag("--version", apwb::harness::version_string());
  app.require_subcommand(1);

  Invocation inv;
  const std::vector<std::pair<const char*, const char*>> commands{
      {"run", "single run with the given settings, writes run.csv"},
      {"sod", "Sod shock tube with gravity, with limit reference in the stiff regime"},
      {"hydro-table", "L1 errors of hydrostatic equilibria at T=2"},
      {"perturb", "perturbed equilibrium, well-balanced vs non-well-balanced"},
      {"longtime", "long-time relaxation of a perturbed equilibrium"},
      {"mesh-sweep", "arch data on refined meshes, AP vs explicit non-AP"},
  };
  for (const auto& [name, help] : commands) add_common_options(app.add_subcommand(name, help), inv);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  apwb::harness::ExperimentConfig config;
  try {
    config.experiment =
        apwb::harness::parse_experiment_kind(app.get_subcommands().front()->get_name());
    if (!inv.config_file.empty())
      apwb::harness::apply_settings(config, apwb::harness::read_config_file(inv.config_file));
    apwb::harness::apply_settings(config, inv.flags);
    apwb::harness::validate(config);
  } catch (const std::invalid_argument& e) {
    std::cerr << "apwb: configuration error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    const apwb::harness::ExperimentReport report =
        apwb::harness::run_experiment(config, &std::cerr);
    apwb::harness::write_report(report, config);
    for (const std::string& line : report.summary) std::cout << line << '\n';
    for (const auto& f : report.files)
      std::cout << "wrote " << (config.out_dir / f.name).string() << '\n';
    if (report.stability_violated) {
      std::cerr << "apwb: blow-up in a run expected to be stable\n";
      return kExitBlowUp;
    }
  } catch (const apwb::harness::ConfigError& e) {
    std::cerr << "apwb: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "apwb: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
