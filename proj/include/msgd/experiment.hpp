#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "msgd/data.hpp"
#include "msgd/engine.hpp"

namespace msgd {

using json = nlohmann::json;

/// Config-file error carrying the JSON path of the offending field.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A full experiment: one dataset, several run variants, repeated trials.
struct ExperimentConfig {
  DatasetSpec dataset;
  std::vector<RunConfig> runs;
  int trials = 1;
  std::string output_dir;     // empty: resolved from --out, $MSGD_OUT_DIR, or "out"
  bool emit_events = false;
  double constants_bound = 0.0;  // parameter-ball radius for L/beta estimates; 0 = derive
};

struct RunOptions {
  std::string out_override;
  int jobs = 1;
  int verbosity = 0;
};

ExperimentConfig parse_experiment_config(const json& j);
/// Loads a config file. A summary.json emitted by run_experiment is also
/// accepted: its embedded resolved_config is used, which reproduces the
/// original run byte for byte.
ExperimentConfig load_experiment_config(const std::string& path);

/// Config with every default materialized; parsing it again yields the
/// same experiment.
json resolved_config_json(const ExperimentConfig& config);

std::string resolve_output_dir(const ExperimentConfig& config, const RunOptions& options);

/// Runs all configured run/trial combinations, writing per-run trajectory
/// JSONL + CSV (and events JSONL when enabled) plus a summary.json with the
/// resolved config embedded. Returns a process exit status.
int run_experiment(const ExperimentConfig& config, const RunOptions& options,
                   std::ostream& log);

/// Oracle suite over the configured dataset: decomposition identity,
/// sandwich bounds, equivalence of the two f_pr forms, analytic gradient
/// vs. central finite differences, and the closed-form Monte-Carlo check.
/// Prints one PASS/FAIL line per property; returns nonzero on any failure.
int verify_experiment(const ExperimentConfig& config, std::ostream& out);

}  // namespace msgd
