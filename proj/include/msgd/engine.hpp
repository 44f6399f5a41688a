#pragma once

#include <optional>
#include <string>

#include "msgd/choice.hpp"
#include "msgd/core.hpp"
#include "msgd/loss.hpp"
#include "msgd/metrics.hpp"

namespace msgd {

enum class Algorithm { Msgd, FullInfo, MsgdMinibatch };

const char* to_string(Algorithm algorithm);

/// Initial model parameters: either i.i.d. uniform draws from a box or an
/// explicit list of k vectors.
struct InitSpec {
  enum class Kind { UniformBox, Explicit };
  Kind kind = Kind::UniformBox;
  double low = 0.0;
  double high = 1.0;
  std::vector<Vec> values;
};

struct RunConfig {
  std::string id = "run";
  Algorithm algorithm = Algorithm::Msgd;
  int k = 2;
  ChoicePolicy policy{};
  StepSchedule schedule{};
  long steps = 0;
  int batch = 1;       // minibatch only
  long eval_every = 1000;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;  // trial index
  InitSpec init{};
  /// zeta used when evaluating f on snapshots. Defaults to the policy's
  /// zeta for bounded-rational users and to 0 (perfect rationality) for
  /// Boltzmann users and the full-information baseline.
  std::optional<double> eval_zeta;
};

double effective_eval_zeta(const RunConfig& config);

ModelBank initial_bank(const RunConfig& config, ParamShape shape, RandomSource& rng);

/// One streaming step: the user selects a service, only that service takes
/// a gradient step theta_i -= eta^{t+1} * grad l(x, theta_i). All other
/// models are left untouched.
EventRecord msgd_step(ModelBank& bank, const DataPoint& x, long t, const ChoicePolicy& policy,
                      const LossModel& loss, const StepSchedule& schedule, RandomSource& rng,
                      long point_id = -1);

/// Full-information baseline: every model takes the gradient step on x.
std::vector<EventRecord> full_info_step(ModelBank& bank, const DataPoint& x, long t,
                                        const LossModel& loss, const StepSchedule& schedule,
                                        long point_id = -1);

struct MinibatchOutcome {
  std::vector<EventRecord> events;  // one per arriving user
  double displacement = 0.0;        // sum_i ||delta theta_i|| for this step
};

/// Minibatch variant: each of the b users selects independently against the
/// current bank; every model with a nonempty batch share updates with the
/// mean of its users' gradients.
MinibatchOutcome minibatch_step(ModelBank& bank, std::span<const DataPoint> batch, long t,
                                const ChoicePolicy& policy, const LossModel& loss,
                                const StepSchedule& schedule, RandomSource& rng,
                                std::span<const long> point_ids = {});

struct RunResult {
  std::vector<TrajectoryRecord> trajectory;
  std::vector<EventRecord> events;  // filled when collect_events is set
  ModelBank final_bank;
  bool aborted = false;
  std::string abort_reason;
};

/// Runs the configured algorithm for config.steps steps, sampling training
/// points uniformly with replacement, and records a metrics snapshot on the
/// held-out test population at t = 0, every eval_every steps, and at the
/// end. Deterministic given (seed, stream).
RunResult run(const RunConfig& config, const Population& train, const Population& test,
              const LossModel& loss, bool collect_events = false);

/// Convenience overload using the task's default loss family.
RunResult run(const RunConfig& config, const Population& train, const Population& test,
              bool collect_events = false);

}  // namespace msgd
