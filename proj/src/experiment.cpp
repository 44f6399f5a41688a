#include "msgd/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "msgd/objective.hpp"
#include "msgd/serialize.hpp"

namespace fs = std::filesystem;

namespace msgd {

namespace {

// ---------------------------------------------------------------------------
// Config parsing. Every accessor carries the JSON path so schema errors name
// the offending field.

[[noreturn]] void fail(const std::string& path, const std::string& expected, const json& got) {
  throw ConfigError(path + ": expected " + expected + ", got " + got.dump());
}

const json& require(const json& j, const std::string& path, const char* key) {
  if (!j.is_object()) fail(path, "an object", j);
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(path + "." + key + ": missing required field");
  return *it;
}

const json* maybe(const json& j, const char* key) {
  if (!j.is_object()) return nullptr;
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "a number", j);
  return j.get<double>();
}

double number_in(const json& j, const std::string& path, double lo, double hi) {
  const double v = as_number(j, path);
  if (v < lo || v > hi) {
    std::ostringstream os;
    os << "a number in [" << lo << ", " << hi << "]";
    fail(path, os.str(), j);
  }
  return v;
}

long as_integer(const json& j, const std::string& path, long lo) {
  if (!j.is_number_integer()) fail(path, "an integer", j);
  const long v = j.get<long>();
  if (v < lo) fail(path, "an integer >= " + std::to_string(lo), j);
  return v;
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "a string", j);
  return j.get<std::string>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "a boolean", j);
  return j.get<bool>();
}

Vec as_vector(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "an array of numbers", j);
  Vec v;
  for (std::size_t i = 0; i < j.size(); ++i)
    v.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
  return v;
}

ChoicePolicy bounded_rational_checked(double zeta) { return bounded_rational(zeta); }

ChoicePolicy boltzmann_checked(double alpha, const std::string& path) {
  if (alpha < 0.0) throw ConfigError(path + ": expected a number >= 0");
  return boltzmann(alpha);
}

DatasetSpec parse_dataset(const json& j, const std::string& path) {
  DatasetSpec spec;
  const std::string source = as_string(require(j, path, "source"), path + ".source");
  if (source == "uniform-1d") spec.source = DataSource::Uniform1D;
  else if (source == "gaussian-mixture") spec.source = DataSource::GaussianMixture;
  else if (source == "csv-classification") spec.source = DataSource::CsvClassification;
  else if (source == "csv-masked-regression") spec.source = DataSource::CsvMaskedRegression;
  else fail(path + ".source", "one of uniform-1d|gaussian-mixture|csv-classification|csv-masked-regression", j["source"]);

  if (const json* v = maybe(j, "n")) spec.n = as_integer(*v, path + ".n", 2);
  if (const json* v = maybe(j, "split_fraction")) {
    spec.split_fraction = as_number(*v, path + ".split_fraction");
    if (spec.split_fraction <= 0.0 || spec.split_fraction >= 1.0)
      fail(path + ".split_fraction", "a number in (0, 1)", *v);
  }
  if (const json* v = maybe(j, "standardize")) spec.standardize = as_bool(*v, path + ".standardize");
  if (const json* v = maybe(j, "seed")) spec.seed = static_cast<std::uint64_t>(as_integer(*v, path + ".seed", 0));

  if (spec.source == DataSource::GaussianMixture) {
    const json& m = require(j, path, "mixture");
    const std::string mp = path + ".mixture";
    const json& means = require(m, mp, "means");
    if (!means.is_array() || means.empty()) fail(mp + ".means", "a nonempty array of vectors", means);
    for (std::size_t c = 0; c < means.size(); ++c)
      spec.mixture.means.push_back(as_vector(means[c], mp + ".means[" + std::to_string(c) + "]"));
    spec.mixture.stddevs = as_vector(require(m, mp, "stddevs"), mp + ".stddevs");
    if (const json* v = maybe(m, "weights")) spec.mixture.weights = as_vector(*v, mp + ".weights");
    if (const json* v = maybe(m, "label_rule")) {
      const std::string rule = as_string(*v, mp + ".label_rule");
      if (rule == "none") spec.mixture.label_rule = LabelRule::None;
      else if (rule == "component") spec.mixture.label_rule = LabelRule::Component;
      else if (rule == "local-hyperplane") spec.mixture.label_rule = LabelRule::LocalHyperplane;
      else fail(mp + ".label_rule", "one of none|component|local-hyperplane", *v);
    }
    if (const json* v = maybe(m, "labels")) {
      if (!v->is_array()) fail(mp + ".labels", "an array of 0/1", *v);
      for (std::size_t c = 0; c < v->size(); ++c)
        spec.mixture.labels.push_back(
            static_cast<int>(as_integer((*v)[c], mp + ".labels[" + std::to_string(c) + "]", 0)));
    }
  }

  if (spec.source == DataSource::CsvClassification || spec.source == DataSource::CsvMaskedRegression) {
    spec.path = as_string(require(j, path, "path"), path + ".path");
    if (const json* v = maybe(j, "feature_columns")) {
      if (!v->is_array()) fail(path + ".feature_columns", "an array of strings", *v);
      for (std::size_t i = 0; i < v->size(); ++i)
        spec.feature_columns.push_back(
            as_string((*v)[i], path + ".feature_columns[" + std::to_string(i) + "]"));
    }
    if (const json* v = maybe(j, "label_column"))
      spec.label_column = as_string(*v, path + ".label_column");
    if (const json* v = maybe(j, "rating_columns")) {
      if (!v->is_array()) fail(path + ".rating_columns", "an array of strings", *v);
      for (std::size_t i = 0; i < v->size(); ++i)
        spec.rating_columns.push_back(
            as_string((*v)[i], path + ".rating_columns[" + std::to_string(i) + "]"));
    }
    if (const json* v = maybe(j, "sentinel")) spec.sentinel = as_string(*v, path + ".sentinel");
  }
  return spec;
}

RunConfig parse_run(const json& j, const std::string& path, std::size_t index) {
  RunConfig rc;
  const std::string algo = as_string(require(j, path, "algorithm"), path + ".algorithm");
  if (algo == "msgd") rc.algorithm = Algorithm::Msgd;
  else if (algo == "full-info") rc.algorithm = Algorithm::FullInfo;
  else if (algo == "msgd-minibatch") rc.algorithm = Algorithm::MsgdMinibatch;
  else fail(path + ".algorithm", "one of msgd|full-info|msgd-minibatch", j["algorithm"]);

  rc.k = static_cast<int>(as_integer(require(j, path, "k"), path + ".k", 1));
  rc.steps = as_integer(require(j, path, "steps"), path + ".steps", 0);

  const json* zeta = maybe(j, "zeta");
  const json* alpha = maybe(j, "alpha");
  if (zeta && alpha) throw ConfigError(path + ": zeta and alpha are mutually exclusive");
  if (alpha)
    rc.policy = boltzmann_checked(as_number(*alpha, path + ".alpha"), path + ".alpha");
  else
    rc.policy = bounded_rational_checked(zeta ? number_in(*zeta, path + ".zeta", 0.0, 1.0) : 0.0);

  if (const json* v = maybe(j, "eval_zeta")) rc.eval_zeta = number_in(*v, path + ".eval_zeta", 0.0, 1.0);
  if (const json* v = maybe(j, "batch")) rc.batch = static_cast<int>(as_integer(*v, path + ".batch", 1));
  if (const json* v = maybe(j, "eval_every")) rc.eval_every = as_integer(*v, path + ".eval_every", 1);
  if (const json* v = maybe(j, "seed")) rc.seed = static_cast<std::uint64_t>(as_integer(*v, path + ".seed", 0));

  if (const json* v = maybe(j, "schedule")) {
    const std::string sp = path + ".schedule";
    const std::string kind = as_string(require(*v, sp, "kind"), sp + ".kind");
    if (kind == "inverse-t") rc.schedule.kind = ScheduleKind::InverseT;
    else if (kind == "constant") rc.schedule.kind = ScheduleKind::Constant;
    else if (kind == "custom") rc.schedule.kind = ScheduleKind::Custom;
    else fail(sp + ".kind", "one of inverse-t|constant|custom", (*v)["kind"]);
    if (const json* e = maybe(*v, "eta_c")) {
      rc.schedule.eta_c = as_number(*e, sp + ".eta_c");
      if (rc.schedule.eta_c <= 0.0) fail(sp + ".eta_c", "a positive number", *e);
    }
    if (rc.schedule.kind == ScheduleKind::Custom)
      rc.schedule.table = as_vector(require(*v, sp, "table"), sp + ".table");
  }

  if (const json* v = maybe(j, "init")) {
    const std::string ip = path + ".init";
    const std::string kind = as_string(require(*v, ip, "kind"), ip + ".kind");
    if (kind == "uniform-box") {
      rc.init.kind = InitSpec::Kind::UniformBox;
      if (const json* lo = maybe(*v, "low")) rc.init.low = as_number(*lo, ip + ".low");
      if (const json* hi = maybe(*v, "high")) rc.init.high = as_number(*hi, ip + ".high");
      if (!(rc.init.low < rc.init.high)) throw ConfigError(ip + ": low must be < high");
    } else if (kind == "explicit") {
      rc.init.kind = InitSpec::Kind::Explicit;
      const json& values = require(*v, ip, "values");
      if (!values.is_array()) fail(ip + ".values", "an array of vectors", values);
      for (std::size_t i = 0; i < values.size(); ++i)
        rc.init.values.push_back(as_vector(values[i], ip + ".values[" + std::to_string(i) + "]"));
    } else {
      fail(ip + ".kind", "one of uniform-box|explicit", (*v)["kind"]);
    }
  }

  rc.id = maybe(j, "id") ? as_string(*maybe(j, "id"), path + ".id")
                         : "run" + std::to_string(index) + "-" + algo;
  return rc;
}

}  // namespace

ExperimentConfig parse_experiment_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  ExperimentConfig config;
  config.dataset = parse_dataset(require(j, "config", "dataset"), "dataset");

  const json& runs = require(j, "config", "runs");
  if (!runs.is_array() || runs.empty()) throw ConfigError("runs: expected a nonempty array");
  for (std::size_t i = 0; i < runs.size(); ++i)
    config.runs.push_back(parse_run(runs[i], "runs[" + std::to_string(i) + "]", i));

  std::set<std::string> ids;
  for (const RunConfig& rc : config.runs)
    if (!ids.insert(rc.id).second) throw ConfigError("runs: duplicate id '" + rc.id + "'");

  if (const json* v = maybe(j, "trials"))
    config.trials = static_cast<int>(as_integer(*v, "trials", 1));
  if (const json* v = maybe(j, "output_dir")) config.output_dir = as_string(*v, "output_dir");
  if (const json* v = maybe(j, "emit_events")) config.emit_events = as_bool(*v, "emit_events");
  if (const json* v = maybe(j, "constants_bound")) {
    config.constants_bound = as_number(*v, "constants_bound");
    if (config.constants_bound < 0.0) fail("constants_bound", "a number >= 0", *v);
  }
  return config;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  if (j.is_object() && j.contains("resolved_config")) return parse_experiment_config(j["resolved_config"]);
  return parse_experiment_config(j);
}

json resolved_config_json(const ExperimentConfig& config) {
  json dataset{{"source", to_string(config.dataset.source)},
               {"n", config.dataset.n},
               {"split_fraction", config.dataset.split_fraction},
               {"standardize", config.dataset.standardize},
               {"seed", config.dataset.seed}};
  if (config.dataset.source == DataSource::GaussianMixture) {
    json mix{{"means", config.dataset.mixture.means}, {"stddevs", config.dataset.mixture.stddevs}};
    if (!config.dataset.mixture.weights.empty()) mix["weights"] = config.dataset.mixture.weights;
    switch (config.dataset.mixture.label_rule) {
      case LabelRule::None: mix["label_rule"] = "none"; break;
      case LabelRule::Component: mix["label_rule"] = "component"; break;
      case LabelRule::LocalHyperplane: mix["label_rule"] = "local-hyperplane"; break;
    }
    if (!config.dataset.mixture.labels.empty()) mix["labels"] = config.dataset.mixture.labels;
    dataset["mixture"] = mix;
  }
  if (config.dataset.source == DataSource::CsvClassification ||
      config.dataset.source == DataSource::CsvMaskedRegression) {
    dataset["path"] = config.dataset.path;
    if (!config.dataset.feature_columns.empty())
      dataset["feature_columns"] = config.dataset.feature_columns;
    if (!config.dataset.label_column.empty()) dataset["label_column"] = config.dataset.label_column;
    if (!config.dataset.rating_columns.empty())
      dataset["rating_columns"] = config.dataset.rating_columns;
    dataset["sentinel"] = config.dataset.sentinel;
  }

  json runs = json::array();
  for (const RunConfig& rc : config.runs) {
    json r{{"id", rc.id},
           {"algorithm", to_string(rc.algorithm)},
           {"k", rc.k},
           {"steps", rc.steps},
           {"batch", rc.batch},
           {"eval_every", rc.eval_every},
           {"seed", rc.seed}};
    if (rc.policy.kind == ChoiceKind::BoundedRational) r["zeta"] = rc.policy.zeta;
    else r["alpha"] = rc.policy.alpha;
    if (rc.eval_zeta) r["eval_zeta"] = *rc.eval_zeta;
    json schedule{{"eta_c", rc.schedule.eta_c}};
    switch (rc.schedule.kind) {
      case ScheduleKind::InverseT: schedule["kind"] = "inverse-t"; break;
      case ScheduleKind::Constant: schedule["kind"] = "constant"; break;
      case ScheduleKind::Custom:
        schedule["kind"] = "custom";
        schedule["table"] = rc.schedule.table;
        break;
    }
    r["schedule"] = schedule;
    if (rc.init.kind == InitSpec::Kind::UniformBox)
      r["init"] = json{{"kind", "uniform-box"}, {"low", rc.init.low}, {"high", rc.init.high}};
    else
      r["init"] = json{{"kind", "explicit"}, {"values", rc.init.values}};
    runs.push_back(r);
  }

  return json{{"dataset", dataset},
              {"runs", runs},
              {"trials", config.trials},
              {"output_dir", config.output_dir},
              {"emit_events", config.emit_events},
              {"constants_bound", config.constants_bound}};
}

std::string resolve_output_dir(const ExperimentConfig& config, const RunOptions& options) {
  if (!options.out_override.empty()) return options.out_override;
  if (!config.output_dir.empty()) return config.output_dir;
  if (const char* env = std::getenv("MSGD_OUT_DIR"); env && *env) return env;
  return "out";
}

namespace {

struct TaskResult {
  std::string id;
  int trial = 0;
  RunResult result;
  std::string traj_jsonl, traj_csv, events_jsonl;
  std::string error;
};

void write_trajectory_files(const fs::path& dir, const std::string& stem,
                            const std::vector<TrajectoryRecord>& trajectory, int k,
                            bool classification, TaskResult& out) {
  const fs::path jsonl = dir / (stem + ".trajectory.jsonl");
  const fs::path csv = dir / (stem + ".trajectory.csv");
  {
    std::ofstream f(jsonl);
    if (!f) throw std::runtime_error("cannot write " + jsonl.string());
    for (const TrajectoryRecord& rec : trajectory) f << to_json(rec).dump() << "\n";
  }
  {
    std::ofstream f(csv);
    if (!f) throw std::runtime_error("cannot write " + csv.string());
    f << trajectory_csv_header(k, classification) << "\n";
    for (const TrajectoryRecord& rec : trajectory) f << trajectory_csv_row(rec, classification) << "\n";
  }
  out.traj_jsonl = jsonl.string();
  out.traj_csv = csv.string();
}

double derive_constants_bound(const ExperimentConfig& config) {
  double bound = 1.0;
  for (const RunConfig& rc : config.runs) {
    if (rc.init.kind == InitSpec::Kind::UniformBox) {
      bound = std::max({bound, std::fabs(rc.init.low), std::fabs(rc.init.high)});
    } else {
      for (const Vec& v : rc.init.values)
        for (double x : v) bound = std::max(bound, std::fabs(x));
    }
  }
  return bound;
}

}  // namespace

int run_experiment(const ExperimentConfig& config, const RunOptions& options, std::ostream& log) {
  if (config.trials < 1) throw ConfigError("trials: must be >= 1");

  const fs::path out_dir = resolve_output_dir(config, options);
  fs::create_directories(out_dir);

  const SplitDataset data = generate(config.dataset);
  const int d_r = data.train.points.front().ratings.empty()
                      ? 0
                      : static_cast<int>(data.train.points.front().ratings.size());
  LossModel loss = default_loss_for(data.train.kind, data.train.dim, d_r);
  const bool classification = data.train.kind == TaskKind::BinaryClassification;

  const double bound =
      config.constants_bound > 0.0 ? config.constants_bound : derive_constants_bound(config);
  RandomSource constants_rng(config.dataset.seed, 0xC0457A);
  const auto [l_hat, beta_hat] = estimate_constants(loss, data.train, bound, constants_rng);

  if (options.verbosity > 0)
    log << "dataset: " << data.train.size() << " train / " << data.test.size() << " test ("
        << to_string(data.train.kind) << "), L_hat=" << l_hat << ", beta_hat=" << beta_hat
        << "\n";

  struct Task {
    std::size_t run_idx;
    int trial;
  };
  std::vector<Task> tasks;
  for (std::size_t r = 0; r < config.runs.size(); ++r)
    for (int trial = 0; trial < config.trials; ++trial) tasks.push_back(Task{r, trial});

  std::vector<TaskResult> results(tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task& task = tasks[i];
      RunConfig rc = config.runs[task.run_idx];
      rc.stream = static_cast<std::uint64_t>(task.trial);
      TaskResult& slot = results[i];
      slot.id = rc.id;
      slot.trial = task.trial;
      try {
        slot.result = run(rc, data.train, data.test, loss, config.emit_events);
        const std::string stem = rc.id + "_trial" + std::to_string(task.trial);
        write_trajectory_files(out_dir, stem, slot.result.trajectory, rc.k, classification, slot);
        if (config.emit_events) {
          const fs::path path = out_dir / (stem + ".events.jsonl");
          std::ofstream f(path);
          if (!f) throw std::runtime_error("cannot write " + path.string());
          for (const EventRecord& evt : slot.result.events) f << to_json(evt).dump() << "\n";
          slot.events_jsonl = path.string();
        }
      } catch (const std::exception& e) {
        slot.error = e.what();
      }
      if (options.verbosity > 0) {
        std::lock_guard<std::mutex> guard(log_mutex);
        log << rc.id << " trial " << task.trial << ": "
            << (!slot.error.empty() ? "error: " + slot.error
                : slot.result.aborted ? "aborted: " + slot.result.abort_reason
                                      : "done")
            << "\n";
      }
    }
  };

  const int jobs = std::max(1, options.jobs);
  std::vector<std::thread> pool;
  for (int w = 1; w < jobs; ++w) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  // Summary: per-task finals, per-run medians over trials, and a comparison
  // of each run's first trial.
  json run_entries = json::array();
  json medians = json::object();
  std::vector<std::vector<TrajectoryRecord>> first_trials;
  bool any_failed = false;
  for (std::size_t r = 0; r < config.runs.size(); ++r) {
    std::vector<std::vector<TrajectoryRecord>> trials;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      if (tasks[i].run_idx != r) continue;
      const TaskResult& slot = results[i];
      json entry{{"id", slot.id}, {"trial", slot.trial}};
      if (!slot.error.empty()) {
        entry["error"] = slot.error;
        any_failed = true;
      } else {
        entry["aborted"] = slot.result.aborted;
        if (slot.result.aborted) {
          entry["abort_reason"] = slot.result.abort_reason;
          any_failed = true;
        }
        entry["final"] = to_json(slot.result.trajectory.back());
        json files{{"trajectory_jsonl", slot.traj_jsonl}, {"trajectory_csv", slot.traj_csv}};
        if (!slot.events_jsonl.empty()) files["events_jsonl"] = slot.events_jsonl;
        entry["files"] = files;
        trials.push_back(slot.result.trajectory);
        if (slot.trial == 0) first_trials.push_back(slot.result.trajectory);
      }
      run_entries.push_back(entry);
    }
    if (!trials.empty()) medians[config.runs[r].id] = median_final_f(trials);
  }

  json schedule_warnings = json::array();
  for (const RunConfig& rc : config.runs)
    if (!rc.schedule.square_summable())
      schedule_warnings.push_back(rc.id +
                                  ": step schedule is not square-summable; the convergence "
                                  "guarantee does not apply");

  json summary{{"resolved_config", resolved_config_json(config)},
               {"dataset",
                json{{"train_size", data.train.size()},
                     {"test_size", data.test.size()},
                     {"task", to_string(data.train.kind)},
                     {"support_radius", data.train.support_radius},
                     {"dropped_rows", data.dropped_rows}}},
               {"constants",
                json{{"lipschitz_hat", l_hat}, {"smoothness_hat", beta_hat}, {"bound", bound}}},
               {"schedule_warnings", schedule_warnings},
               {"runs", run_entries},
               {"median_final_f", medians}};
  if (first_trials.size() > 1) summary["comparison"] = to_json(compare(first_trials));

  const fs::path summary_path = out_dir / "summary.json";
  std::ofstream f(summary_path);
  if (!f) throw std::runtime_error("cannot write " + summary_path.string());
  f << summary.dump(2) << "\n";

  if (options.verbosity >= 0 && any_failed) log << "one or more runs failed; see summary.json\n";
  return any_failed ? 1 : 0;
}

// ---------------------------------------------------------------------------
// Verification suite.

namespace {

ModelBank random_bank(int k, ParamShape shape, double lo, double hi, RandomSource& rng) {
  ModelBank bank = make_bank(k, shape);
  for (Vec& theta : bank.params)
    for (double& v : theta) v = rng.uniform(lo, hi);
  return bank;
}

// Smallest gap between best and second-best loss over the population; a
// bank is boundary-safe when this is comfortably positive.
double tie_margin(const ModelBank& bank, const Population& pop, const LossModel& loss) {
  if (bank.k() < 2) return std::numeric_limits<double>::infinity();
  double margin = std::numeric_limits<double>::infinity();
  Vec losses(static_cast<std::size_t>(bank.k()));
  for (const DataPoint& x : pop.points) {
    for (int i = 0; i < bank.k(); ++i)
      losses[static_cast<std::size_t>(i)] = loss_value(loss, x, bank.params[static_cast<std::size_t>(i)]);
    double best = losses[0], second = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < losses.size(); ++i) {
      if (losses[i] < best) {
        second = best;
        best = losses[i];
      } else {
        second = std::min(second, losses[i]);
      }
    }
    margin = std::min(margin, second - best);
  }
  return margin;
}

ModelBank boundary_safe_bank(int k, const LossModel& loss, const Population& pop, double lo,
                             double hi, double delta, RandomSource& rng) {
  ModelBank best_bank = random_bank(k, loss.shape, lo, hi, rng);
  double best_margin = tie_margin(best_bank, pop, loss);
  for (int attempt = 0; attempt < 200 && best_margin < delta; ++attempt) {
    ModelBank bank = random_bank(k, loss.shape, lo, hi, rng);
    const double margin = tie_margin(bank, pop, loss);
    if (margin > best_margin) {
      best_margin = margin;
      best_bank = std::move(bank);
    }
  }
  return best_bank;
}

// Relative error between the analytic gradient of f and a central finite
// difference of the empirical objective, over at most coord_cap coordinates
// per model.
double gradient_fd_relative_error(const ModelBank& bank, const Population& pop,
                                  const LossModel& loss, double zeta, double h, int coord_cap,
                                  RandomSource& rng) {
  const std::vector<Vec> analytic = gradient_f(bank, pop, loss, zeta);
  const int p = bank.dim();
  double diff_sq = 0.0, fd_sq = 0.0, an_sq = 0.0;
  ModelBank work = bank;
  for (int i = 0; i < bank.k(); ++i) {
    std::vector<int> coords;
    if (p <= coord_cap) {
      for (int c = 0; c < p; ++c) coords.push_back(c);
    } else {
      std::set<int> picked;
      while (static_cast<int>(picked.size()) < coord_cap)
        picked.insert(static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(p))));
      coords.assign(picked.begin(), picked.end());
    }
    for (int c : coords) {
      double& slot = work.params[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
      const double saved = slot;
      slot = saved + h;
      const double f_plus = evaluate(work, pop, loss, zeta).f;
      slot = saved - h;
      const double f_minus = evaluate(work, pop, loss, zeta).f;
      slot = saved;
      const double fd = (f_plus - f_minus) / (2.0 * h);
      const double an = analytic[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
      diff_sq += (an - fd) * (an - fd);
      fd_sq += fd * fd;
      an_sq += an * an;
    }
  }
  const double scale = std::max(std::sqrt(std::max(fd_sq, an_sq)), 1e-12);
  return std::sqrt(diff_sq) / scale;
}

}  // namespace

int verify_experiment(const ExperimentConfig& config, std::ostream& out) {
  const SplitDataset data = generate(config.dataset);
  const Population& pop = data.train;
  const int d_r =
      pop.points.front().ratings.empty() ? 0 : static_cast<int>(pop.points.front().ratings.size());
  const LossModel loss = default_loss_for(pop.kind, pop.dim, d_r);

  for (const RunConfig& rc : config.runs)
    if (!rc.schedule.square_summable())
      out << "WARN " << rc.id
          << ": step schedule is not square-summable; Theorem-style convergence is not "
             "guaranteed\n";

  bool all_ok = true;
  auto report = [&](bool pass, const std::string& name, const std::string& detail) {
    out << (pass ? "PASS " : "FAIL ") << name << " (" << detail << ")\n";
    if (!pass) all_ok = false;
  };

  const double box_lo = pop.kind == TaskKind::Scalar1D ? 0.0 : -1.0;
  const double box_hi = 1.0;
  RandomSource rng(config.dataset.seed, 0x5EC7);

  // Decomposition, bounds, and the two f_pr routes on random configurations.
  {
    double max_mix_err = 0.0, max_bound_violation = 0.0, max_form_err = 0.0;
    for (int j = 0; j < 100; ++j) {
      const int k = 1 + static_cast<int>(rng.uniform_below(5));
      const double zeta = j % 4 == 0 ? 0.0 : j % 4 == 1 ? 1.0 : rng.uniform01();
      const ModelBank bank = random_bank(k, loss.shape, box_lo, box_hi, rng);
      const ObjectiveReport rep = evaluate(bank, pop, loss, zeta);
      max_mix_err = std::max(max_mix_err,
                             std::fabs(rep.f - ((1.0 - zeta) * rep.f_pr + zeta * rep.f_np)));
      max_bound_violation = std::max({max_bound_violation, rep.f_pr - rep.f, rep.f - rep.f_np});
      double weighted = 0.0;
      for (int i = 0; i < k; ++i)
        if (rep.partition.counts[static_cast<std::size_t>(i)] > 0)
          weighted += rep.partition.proportions[static_cast<std::size_t>(i)] *
                      rep.partition.mean_loss[static_cast<std::size_t>(i)];
      max_form_err = std::max(max_form_err, std::fabs(weighted - rep.f_pr));
    }
    report(max_mix_err <= 1e-12, "decomposition-identity",
           "max |f - mix| = " + std::to_string(max_mix_err));
    report(max_bound_violation <= 1e-12, "sandwich-bounds",
           "max violation = " + std::to_string(max_bound_violation));
    report(max_form_err <= 1e-12, "f_pr-two-forms",
           "max |sum a_i mean_i - mean min| = " + std::to_string(max_form_err));
  }

  // Analytic gradient vs central finite differences at a boundary-safe bank.
  {
    const ModelBank bank = boundary_safe_bank(2, loss, pop, box_lo, box_hi, 1e-3, rng);
    double worst = 0.0;
    for (double zeta : {0.0, 0.3, 1.0})
      worst = std::max(worst, gradient_fd_relative_error(bank, pop, loss, zeta, 1e-4, 40, rng));
    report(worst <= 1e-2, "gradient-vs-fd", "max relative error = " + std::to_string(worst));
  }

  // Monte-Carlo value of f_pr at (0.25, 0.75) against the closed form.
  {
    RandomSource mc_rng(config.dataset.seed, 0x3C);
    double sum = 0.0;
    const long n = 1000000;
    for (long i = 0; i < n; ++i) {
      const double x = mc_rng.uniform01();
      const double a = x - 0.25, b = x - 0.75;
      sum += std::min(a * a, b * b);
    }
    const double mc = sum / static_cast<double>(n);
    const double exact = closed_form_1d(0.25, 0.75).f_pr;
    report(std::fabs(mc - exact) <= 3e-3, "closed-form-monte-carlo",
           "|mc - closed| = " + std::to_string(std::fabs(mc - exact)));
  }

  return all_ok ? 0 : 1;
}

}  // namespace msgd
