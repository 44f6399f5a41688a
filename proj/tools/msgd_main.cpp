#include <iostream>

#include <CLI11.hpp>

#include "msgd/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Multi-learner streaming gradient descent: experiment runner"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int jobs = 1;
  int verbosity = 0;

  CLI::App* run_cmd = app.add_subcommand("run", "Run the experiments described by a config file");
  run_cmd->add_option("config", config_path, "JSON experiment config (or an emitted summary.json)")
      ->required();
  run_cmd->add_option("--out", out_dir, "Output directory (overrides config and $MSGD_OUT_DIR)");
  run_cmd->add_option("--jobs", jobs, "Number of parallel trial workers")
      ->check(CLI::PositiveNumber);
  run_cmd->add_flag("-v", verbosity, "Verbose progress output");

  CLI::App* verify_cmd =
      app.add_subcommand("verify", "Run the oracle checks against a config's dataset");
  verify_cmd->add_option("config", config_path, "JSON experiment config")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const msgd::ExperimentConfig config = msgd::load_experiment_config(config_path);
    if (app.got_subcommand(run_cmd)) {
      msgd::RunOptions options;
      options.out_override = out_dir;
      options.jobs = jobs;
      options.verbosity = verbosity;
      return msgd::run_experiment(config, options, std::cout);
    }
    return msgd::verify_experiment(config, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
