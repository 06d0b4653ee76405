// Command-line front end: ordered-capacity run --config <path> [--out <dir>] [--workers N]

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ordcap/errors.hpp"
#include "ordcap/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Ordered-entry capacity allocation experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out;
  std::size_t workers = 0;
  CLI::App* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("--config", config_path, "Config file (key = value, [section] headers)")->required();
  auto* out_option = run->add_option("--out", out, "Output directory (overrides output.dir)");
  auto* workers_option =
      run->add_option("--workers", workers, "Concurrent cells/replications/restarts")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ordcap::kExitConfig;
  }

  ordcap::RunOverrides overrides;
  if (*out_option) overrides.out = out;
  if (*workers_option) overrides.workers = workers;
  try {
    const auto config = ordcap::ExperimentConfig::load(config_path);
    return ordcap::run_experiment(config, overrides, std::cout, std::cerr);
  } catch (const ordcap::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return ordcap::kExitConfig;
  }
}
