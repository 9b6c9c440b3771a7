#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "handsoff_app/commands.hpp"
#include "handsoff_app/config.hpp"

namespace app = handsoff::app;

int main(int argc, char** argv) {
  CLI::App cli{"Maximum hands-off control: solve, sweep horizons, check turnpike hypotheses"};
  cli.require_subcommand(1);

  app::Overrides ov;
  std::optional<int> steps;
  std::optional<double> threshold;
  cli.add_option("--steps-per-unit", steps, "Grid cells per unit time (overrides the config)");
  cli.add_option("--support-threshold", threshold, "Support threshold (overrides the config)");

  std::string config_path;
  double horizon = 0.0;
  std::string out_dir;

  CLI::App* check = cli.add_subcommand("check", "Check normality and turnpike hypotheses");
  check->add_option("config", config_path, "Config file")->required();

  CLI::App* solve = cli.add_subcommand("solve", "Solve one horizon and write its artifacts");
  solve->add_option("config", config_path, "Config file")->required();
  solve->add_option("--horizon,-T", horizon, "Horizon, one of the config's horizons")->required();

  CLI::App* sweep = cli.add_subcommand("sweep", "Solve every horizon and write the turnpike report");
  sweep->add_option("config", config_path, "Config file")->required();

  CLI::App* reproduce = cli.add_subcommand("reproduce", "Run the reference experiment");
  reproduce->add_option("--out", out_dir, "Output directory");

  for (CLI::App* sub : {check, solve, sweep, reproduce}) {
    sub->add_option("--steps-per-unit", steps, "Grid cells per unit time");
    sub->add_option("--support-threshold", threshold, "Support threshold");
  }

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : app::kExitInputError;
  }
  ov.steps_per_unit_time = steps;
  ov.support_threshold = threshold;
  if (!out_dir.empty()) ov.output_dir = out_dir;

  try {
    app::RunConfig cfg = reproduce->parsed() ? app::reference_config() : app::load_config(config_path);
    app::apply_overrides(cfg, ov);
    if (check->parsed()) return app::cmd_check(cfg, std::cout, std::cerr);
    if (solve->parsed()) return app::cmd_solve(cfg, horizon, std::cout, std::cerr);
    if (sweep->parsed()) return app::cmd_sweep(cfg, app::sweep_threads(), std::cout, std::cerr);
    return app::cmd_reproduce(cfg, app::sweep_threads(), std::cout, std::cerr);
  } catch (const app::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return app::kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return app::kExitInputError;
  }
}
