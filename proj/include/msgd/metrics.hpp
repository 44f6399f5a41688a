#pragma once

#include <optional>

#include "msgd/core.hpp"
#include "msgd/loss.hpp"
#include "msgd/objective.hpp"

namespace msgd {

/// One update event from a simulation step. For the streaming algorithm
/// there is exactly one event per step; the full-information baseline emits
/// k (one per model) and the minibatch variant one per arriving user.
struct EventRecord {
  long t = 0;
  long point_id = -1;
  int chosen = 0;
  bool was_random = false;
  double eta = 0.0;       // step size applied to the chosen model at this step
  double grad_norm = 0.0; // norm of the single-loss gradient used
};

/// One evaluation-snapshot row of a run.
struct TrajectoryRecord {
  long t = 0;
  double f = 0.0;
  double f_pr = 0.0;
  double f_np = 0.0;
  double stationarity = 0.0;
  double displacement = 0.0;  // cumulative sum_t ||Theta^t - Theta^{t-1}||
  Vec proportions;
  std::optional<double> subpop_accuracy;    // classification only
  std::optional<double> wholepop_accuracy;  // classification only
  std::vector<long long> selection_counts;  // cumulative per model
};

/// Cumulative displacement series reconstructed from an event log, one
/// entry per simulation step. The per-step tuple displacement is the sum of
/// per-model update norms (eta * grad_norm summed over the step's events).
/// Exact for the streaming and full-information algorithms; the minibatch
/// variant averages gradients per model, which an event log does not carry.
/// `divisor` rescales (set it to k for the full-information comparison).
Vec displacement_series(std::span<const EventRecord> events, double divisor = 1.0);

struct AccuracyPair {
  double subpop = 0.0;    // sum_i a_i * acc(theta_i on X_i): user-experienced
  double wholepop = 0.0;  // (1/k) sum_i acc(theta_i on all points)
};

/// Classification accuracies. Throws std::domain_error for other tasks.
AccuracyPair accuracies(const ModelBank& bank, const Population& test, const LossModel& loss);

struct CompareRow {
  std::size_t run = 0;
  double final_f = 0.0;
  double median_f = 0.0;
  double final_f_pr = 0.0;
  double final_stationarity = 0.0;
  double final_displacement = 0.0;
};

struct CompareTable {
  std::vector<CompareRow> rows;
  // delta[i][j] = final_f(i) - final_f(j)
  std::vector<Vec> final_f_delta;
  bool resampled = false;  // eval grids disagreed and were step-aligned
};

/// Summary comparison of several runs. Runs with misaligned evaluation
/// grids are resampled onto the first run's grid (carrying the latest
/// record forward) and the table is flagged.
CompareTable compare(const std::vector<std::vector<TrajectoryRecord>>& runs);

/// Median over the final f of several trajectories (used for seed sweeps).
double median_final_f(const std::vector<std::vector<TrajectoryRecord>>& runs);

}  // namespace msgd
