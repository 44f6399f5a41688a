#include "msgd/choice.hpp"

#include <cmath>
#include <stdexcept>

namespace msgd {

ChoicePolicy bounded_rational(double zeta) {
  if (zeta < 0.0 || zeta > 1.0)
    throw std::invalid_argument("bounded_rational: zeta must lie in [0, 1]");
  return ChoicePolicy{ChoiceKind::BoundedRational, zeta, 0.0};
}

ChoicePolicy boltzmann(double alpha) {
  if (alpha < 0.0) throw std::invalid_argument("boltzmann: alpha must be >= 0");
  return ChoicePolicy{ChoiceKind::Boltzmann, 0.0, alpha};
}

const char* to_string(ChoiceKind kind) {
  return kind == ChoiceKind::BoundedRational ? "bounded-rational" : "boltzmann";
}

int best_index(std::span<const double> losses) {
  if (losses.empty()) throw std::domain_error("best_index: empty loss vector");
  int best = 0;
  for (std::size_t i = 0; i < losses.size(); ++i) {
    if (std::isnan(losses[i])) throw std::domain_error("best_index: NaN loss");
    if (losses[i] < losses[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  }
  return best;
}

Vec choice_probabilities(const ChoicePolicy& policy, std::span<const double> losses) {
  const std::size_t k = losses.size();
  const int best = best_index(losses);  // also validates
  Vec probs(k, 0.0);
  if (policy.kind == ChoiceKind::BoundedRational) {
    const double uniform = policy.zeta / static_cast<double>(k);
    for (double& p : probs) p = uniform;
    probs[static_cast<std::size_t>(best)] += 1.0 - policy.zeta;
    return probs;
  }
  // Boltzmann weights, max-shifted for stability: exp(-alpha*(l_i - l_min)).
  const double l_min = losses[static_cast<std::size_t>(best)];
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    probs[i] = std::exp(-policy.alpha * (losses[i] - l_min));
    total += probs[i];
  }
  for (double& p : probs) p /= total;
  return probs;
}

Selection select_from_losses(const ChoicePolicy& policy, std::span<const double> losses,
                             RandomSource& rng) {
  const int best = best_index(losses);
  if (policy.kind == ChoiceKind::BoundedRational) {
    if (policy.zeta > 0.0 && rng.uniform01() < policy.zeta) {
      const int idx = static_cast<int>(rng.uniform_below(losses.size()));
      return Selection{idx, true};
    }
    return Selection{best, false};
  }
  const Vec probs = choice_probabilities(policy, losses);
  const double u = rng.uniform01();
  double acc = 0.0;
  int idx = static_cast<int>(losses.size()) - 1;  // guard against rounding at u ~ 1
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) {
      idx = static_cast<int>(i);
      break;
    }
  }
  return Selection{idx, idx != best};
}

Selection select(const ChoicePolicy& policy, const DataPoint& x, const ModelBank& bank,
                 const LossModel& loss, RandomSource& rng) {
  if (bank.k() < 1) throw std::domain_error("select: empty bank");
  Vec losses(static_cast<std::size_t>(bank.k()));
  for (int i = 0; i < bank.k(); ++i)
    losses[static_cast<std::size_t>(i)] = loss_value(loss, x, bank.params[static_cast<std::size_t>(i)]);
  return select_from_losses(policy, losses, rng);
}

}  // namespace msgd
