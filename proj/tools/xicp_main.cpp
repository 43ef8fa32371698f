#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "xicp/error.hpp"
#include "xicp/pipeline.hpp"

namespace {

xicp::ExperimentConfig load_config(const std::string& config_path,
                                   int seed_override,
                                   const std::string& out_override) {
  xicp::ExperimentConfig config = xicp::load_experiment(config_path);
  if (seed_override >= 0) {
    config.seed = static_cast<std::uint64_t>(seed_override);
    config.world.seed = config.seed;
    config.noise.seed = config.seed;
  }
  if (!out_override.empty()) {
    config.output_dir = out_override;
  } else if (const char* env = std::getenv("XICP_OUTPUT_DIR");
             env != nullptr && env[0] != '\0') {
    config.output_dir = env;
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Localizability-aware point-to-plane ICP experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string handler_name;
  std::string out_dir;
  int seed = -1;

  auto* simulate = app.add_subcommand(
      "simulate", "Generate world, ground-truth trajectory, and scans");
  simulate->add_option("--config", config_path, "experiment config file")
      ->required();
  simulate->add_option("--seed", seed, "override the config seed");
  simulate->add_option("--out", out_dir, "override the output directory");

  auto* do_register = app.add_subcommand(
      "register", "Run scan-to-map registration with a degeneracy handler");
  do_register->add_option("--config", config_path, "experiment config file")
      ->required();
  do_register->add_option("--handler", handler_name,
                          "none|xicp|xs-icp|remap|remap-adaptive");
  do_register->add_option("--seed", seed, "override the config seed");
  do_register->add_option("--out", out_dir, "override the output directory");

  std::string run_dir;
  std::string truth_dir;
  auto* evaluate =
      app.add_subcommand("evaluate", "Compute APE/RPE/map-error metrics");
  evaluate->add_option("--run", run_dir, "register output directory")
      ->required();
  evaluate->add_option("--truth", truth_dir,
                       "directory holding world.ply / trajectory_gt.csv "
                       "(default: the run directory)");

  std::vector<std::string> compare_dirs;
  std::string compare_out = "comparison.csv";
  auto* compare =
      app.add_subcommand("compare", "Join per-run metrics into one table");
  compare->add_option("dirs", compare_dirs, "evaluated run directories")
      ->required();
  compare->add_option("--out", compare_out, "output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed()) {
      xicp::cmd_simulate(load_config(config_path, seed, out_dir));
    } else if (do_register->parsed()) {
      const xicp::ExperimentConfig config =
          load_config(config_path, seed, out_dir);
      const xicp::DegeneracyHandler handler =
          handler_name.empty() ? config.icp.degeneracy_handler
                               : xicp::handler_from_string(handler_name);
      xicp::cmd_register(config, handler);
    } else if (evaluate->parsed()) {
      xicp::cmd_evaluate(run_dir, truth_dir.empty() ? run_dir : truth_dir);
    } else if (compare->parsed()) {
      std::vector<std::filesystem::path> dirs(compare_dirs.begin(),
                                              compare_dirs.end());
      xicp::cmd_compare(dirs, compare_out);
    }
  } catch (const xicp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
