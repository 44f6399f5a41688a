#pragma once

#include <optional>
#include <utility>

#include "msgd/core.hpp"

namespace msgd {

enum class LossFamily { SquaredScalar, SquaredMasked, Logistic };

const char* to_string(LossFamily family);

/// A loss family l(x, theta) with exact gradients.
///
/// SquaredScalar:  (x - theta)^2 for 1-d data, theta scalar.
/// SquaredMasked:  (1/m) * sum_{c in mask} (theta_c' z - r_c)^2 where
///                 theta_c is column c of the (rows x cols) view, m = |mask|.
/// Logistic:       cross-entropy of sigmoid(theta' z) against y in {0,1},
///                 probabilities clamped to [prob_clamp, 1 - prob_clamp] so
///                 the value stays finite everywhere.
struct LossModel {
  LossFamily family = LossFamily::SquaredScalar;
  ParamShape shape{1, 1};
  double prob_clamp = 1e-12;
  // Diagnostic constants filled by estimate_constants.
  std::optional<double> lipschitz_hat;
  std::optional<double> smoothness_hat;
};

LossModel make_squared_scalar();
LossModel make_squared_masked(int d, int d_r);
LossModel make_logistic(int d);

/// Default loss family for a task kind (d = feature dim, d_r = rating dim).
LossModel default_loss_for(TaskKind kind, int d, int d_r = 0);

/// Nonnegative loss value. Throws std::domain_error on dimension mismatch
/// or an empty mask for masked regression.
double loss_value(const LossModel& loss, const DataPoint& x, std::span<const double> theta);

/// Exact gradient with respect to theta, written into `grad` (resized to
/// theta's length). Unobserved columns of the masked family stay zero.
void loss_gradient(const LossModel& loss, const DataPoint& x, std::span<const double> theta,
                   Vec& grad);
Vec loss_gradient(const LossModel& loss, const DataPoint& x, std::span<const double> theta);

/// Predicted class for classification losses: 1 iff theta' z > 0.
int predict_class(const LossModel& loss, const DataPoint& x, std::span<const double> theta);

/// Sampled estimates of the Lipschitz constant L (max gradient norm) and
/// smoothness beta (max gradient-difference ratio) over the parameter ball
/// of radius `bound` and the given population. Diagnostic only; the
/// estimates are also recorded on `loss`.
std::pair<double, double> estimate_constants(LossModel& loss, const Population& pop, double bound,
                                             RandomSource& rng, int theta_samples = 512,
                                             int pair_samples = 512);

}  // namespace msgd
