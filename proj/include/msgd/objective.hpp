#pragma once

#include <array>
#include <optional>

#include "msgd/choice.hpp"
#include "msgd/core.hpp"
#include "msgd/loss.hpp"

namespace msgd {

/// The partition of a finite population induced by a bank: every point is
/// assigned to the lowest-index model attaining its minimum loss.
struct PartitionSummary {
  std::vector<int> assignment;         // per point, model index
  std::vector<long long> counts;       // per model
  Vec proportions;                     // a_i = counts_i / N
  Vec mean_loss;                       // mean loss over assigned points; NaN when empty
};

/// Evaluation of the overall objective f and its decomposition on a finite
/// population. f is accumulated directly from the per-point mixture weights
/// (1-zeta)*1_i + zeta/k, while f_pr and f_np come from their own sums, so
/// the decomposition identity f = (1-zeta)*f_pr + zeta*f_np is a genuine
/// floating-point check rather than true by construction.
struct ObjectiveReport {
  double f = 0.0;
  double f_pr = 0.0;
  double f_np = 0.0;
  double zeta = 0.0;
  PartitionSummary partition;
  std::optional<std::vector<Vec>> gradient;
};

PartitionSummary partition(const ModelBank& bank, const Population& pop, const LossModel& loss);

ObjectiveReport evaluate(const ModelBank& bank, const Population& pop, const LossModel& loss,
                         double zeta, bool with_gradient = false);

/// Per-model gradient of f:
///   grad_i = (1-zeta) * (1/N) * sum_{x in X_i} grad l(x, theta_i)
///          + (zeta/k) * (1/N) * sum_{x in P}   grad l(x, theta_i).
/// Empty partitions contribute zero to the first term.
std::vector<Vec> gradient_f(const ModelBank& bank, const Population& pop, const LossModel& loss,
                            double zeta);

/// Norm of the concatenated gradient of f; the convergence diagnostic.
double stationarity_residual(const ModelBank& bank, const Population& pop, const LossModel& loss,
                             double zeta);

/// Fixed-partition surrogate F(Theta; Theta'): mean loss when every point
/// keeps a frozen assignment instead of re-selecting. Upper-bounds f_pr.
double fixed_partition_objective(const ModelBank& bank, const Population& pop,
                                 const LossModel& loss, const std::vector<int>& assignment);

/// Closed form of f_pr for k = 2 scalar squared loss on uniform[0, 1]:
///   f_pr = (t1+t2)^2 (t1-t2) / 4 + t2^2 - t2 + 1/3   for t1 < t2,
/// with its analytic gradient and Hessian. Arguments in either order
/// (results are permuted back); equal arguments are a domain error.
struct ClosedForm1D {
  double f_pr = 0.0;
  std::array<double, 2> gradient{};
  std::array<std::array<double, 2>, 2> hessian{};
};
ClosedForm1D closed_form_1d(double theta1, double theta2);

}  // namespace msgd
