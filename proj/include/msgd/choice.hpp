#pragma once

#include "msgd/core.hpp"
#include "msgd/loss.hpp"

namespace msgd {

enum class ChoiceKind { BoundedRational, Boltzmann };

/// User behavior model. Bounded-rational: with probability 1-zeta pick the
/// loss-minimizing service, with probability zeta pick uniformly at random
/// (the uniform draw may re-select the best model). Boltzmann: pick service
/// i with probability proportional to exp(-alpha * loss_i).
struct ChoicePolicy {
  ChoiceKind kind = ChoiceKind::BoundedRational;
  double zeta = 0.0;
  double alpha = 0.0;
};

ChoicePolicy bounded_rational(double zeta);
ChoicePolicy boltzmann(double alpha);
const char* to_string(ChoiceKind kind);

/// Smallest index attaining the minimum loss. Throws std::domain_error on
/// NaN or an empty vector.
int best_index(std::span<const double> losses);

/// Exact per-index selection probabilities under the policy.
Vec choice_probabilities(const ChoicePolicy& policy, std::span<const double> losses);

struct Selection {
  int index = 0;
  /// True when the pick did not come from the deterministic argmin: the
  /// zeta branch fired, or a Boltzmann draw landed off the argmin.
  bool was_random = false;
};

/// Samples a service for user x given the current bank.
Selection select(const ChoicePolicy& policy, const DataPoint& x, const ModelBank& bank,
                 const LossModel& loss, RandomSource& rng);

/// Variant over precomputed losses (one per model).
Selection select_from_losses(const ChoicePolicy& policy, std::span<const double> losses,
                             RandomSource& rng);

}  // namespace msgd
