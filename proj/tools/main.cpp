#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cesarolab/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Cesaro-average diagnostics for Markov chains on [0, 1]"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::size_t n_max = 0;
  std::uint64_t seed = 0;
  bool quiet = false;

  app.add_option("--config", config_path, "Run description (JSON)")->required();
  auto* opt_out =
      app.add_option("--out-dir", out_dir, "Output directory (overrides config)");
  auto* opt_nmax = app.add_option("--n-max", n_max, "Iteration depth (overrides config)")
                       ->check(CLI::PositiveNumber);
  auto* opt_seed =
      app.add_option("--seed", seed, "Simulation seed (overrides config)");
  app.add_flag("--quiet", quiet, "Suppress stdout summary lines");

  auto* c_iterate =
      app.add_subcommand("iterate", "Write per-step summaries of A^n eta");
  auto* c_cesaro = app.add_subcommand(
      "cesaro", "Run the averaged iteration against the candidate limit");
  auto* c_feller =
      app.add_subcommand("feller", "Scan T f for continuity defects");
  auto* c_simulate = app.add_subcommand(
      "simulate", "Cross-check operator answers by Monte Carlo");
  for (CLI::App* sub : {c_iterate, c_cesaro, c_feller, c_simulate}) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cesarolab::kExitConfigError;
  }

  std::optional<cesarolab::RunConfig> cfg;
  try {
    cfg.emplace(cesarolab::load_run_config(config_path));
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return cesarolab::kExitConfigError;
  }
  if (opt_out->count() > 0) cfg->out_dir = out_dir;
  if (opt_nmax->count() > 0) cfg->n_max = n_max;
  if (opt_seed->count() > 0) cfg->seed = seed;

  try {
    if (c_iterate->parsed()) return cesarolab::cmd_iterate(*cfg, quiet);
    if (c_cesaro->parsed()) return cesarolab::cmd_cesaro(*cfg, quiet);
    if (c_feller->parsed()) return cesarolab::cmd_feller(*cfg, quiet);
    return cesarolab::cmd_simulate(*cfg, quiet);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
