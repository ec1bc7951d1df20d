// stochnet: simulate stochastic networks and their one-dimensional reduction.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "stochnet/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Mean-field reduction of stochastic dynamical networks"};
  app.require_subcommand(1);

  stochnet::SimulateOptions sim;
  std::string out_dir;
  auto* simulate = app.add_subcommand("simulate", "Run full and effective ensembles for every epsilon");
  simulate->add_option("--config", sim.config, "Experiment config (TOML, or a run manifest)")->required();
  simulate->add_option("--out", out_dir, "Output directory (overrides output.directory)");
  simulate->add_option("--threads", sim.threads, "Worker threads per ensemble (0 = all cores)")
      ->check(CLI::NonNegativeNumber);

  std::string reduce_config;
  auto* reduce = app.add_subcommand("reduce", "Print the effective model for each epsilon");
  reduce->add_option("--config", reduce_config, "Experiment config (TOML)")->required();

  std::string run_dir;
  auto* report = app.add_subcommand("report", "Summarize a finished run directory");
  report->add_option("run-dir", run_dir, "Directory containing manifest.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : stochnet::kExitConfig;
  }

  if (*simulate) {
    if (!out_dir.empty()) sim.out_dir = out_dir;
    return stochnet::cmd_simulate(sim, std::cout, std::cerr);
  }
  if (*reduce) return stochnet::cmd_reduce(reduce_config, std::cout, std::cerr);
  return stochnet::cmd_report(run_dir, std::cout, std::cerr);
}
