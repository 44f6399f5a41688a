#include "msgd/reference.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace msgd::reference {

ObjectiveReport evaluate(const ModelBank& bank, const Population& pop, const LossModel& loss,
                         double zeta) {
  if (bank.k() < 1 || pop.empty()) throw std::invalid_argument("reference::evaluate: empty input");
  const std::size_t n = pop.size();
  const std::size_t k = static_cast<std::size_t>(bank.k());
  const double uniform_w = zeta / static_cast<double>(k);

  ObjectiveReport report;
  report.zeta = zeta;
  PartitionSummary& part = report.partition;
  part.assignment.resize(n);
  part.counts.assign(k, 0);
  Vec assigned_sums(k, 0.0);
  Vec model_sums(k, 0.0);
  double min_sum = 0.0;
  double direct_sum = 0.0;

  Vec losses(k);
  for (std::size_t q = 0; q < n; ++q) {
    const DataPoint& x = pop.points[q];
    for (std::size_t i = 0; i < k; ++i) losses[i] = loss_value(loss, x, bank.params[i]);
    const std::size_t best = static_cast<std::size_t>(best_index(losses));
    part.assignment[q] = static_cast<int>(best);
    part.counts[best] += 1;
    assigned_sums[best] += losses[best];
    min_sum += losses[best];
    double direct = (1.0 - zeta) * losses[best];
    for (std::size_t i = 0; i < k; ++i) {
      model_sums[i] += losses[i];
      direct += uniform_w * losses[i];
    }
    direct_sum += direct;
  }

  const double inv_n = 1.0 / static_cast<double>(n);
  report.f = direct_sum * inv_n;
  report.f_pr = min_sum * inv_n;
  double np = 0.0;
  for (std::size_t i = 0; i < k; ++i) np += model_sums[i];
  report.f_np = np * inv_n / static_cast<double>(k);

  part.proportions.resize(k);
  part.mean_loss.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    part.proportions[i] = static_cast<double>(part.counts[i]) * inv_n;
    part.mean_loss[i] = part.counts[i] > 0
                            ? assigned_sums[i] / static_cast<double>(part.counts[i])
                            : std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

PartitionSummary partition(const ModelBank& bank, const Population& pop, const LossModel& loss) {
  return reference::evaluate(bank, pop, loss, 0.0).partition;
}

std::vector<Vec> gradient_f(const ModelBank& bank, const Population& pop, const LossModel& loss,
                            double zeta) {
  const std::size_t n = pop.size();
  const std::size_t k = static_cast<std::size_t>(bank.k());
  const std::size_t p = static_cast<std::size_t>(bank.dim());

  std::vector<Vec> pr_sums(k, Vec(p, 0.0));
  std::vector<Vec> np_sums(k, Vec(p, 0.0));
  Vec losses(k);
  Vec grad;
  for (std::size_t q = 0; q < n; ++q) {
    const DataPoint& x = pop.points[q];
    for (std::size_t i = 0; i < k; ++i) losses[i] = loss_value(loss, x, bank.params[i]);
    const std::size_t best = static_cast<std::size_t>(best_index(losses));
    loss_gradient(loss, x, bank.params[best], grad);
    axpy(1.0, grad, pr_sums[best]);
    for (std::size_t i = 0; i < k; ++i) {
      loss_gradient(loss, x, bank.params[i], grad);
      axpy(1.0, grad, np_sums[i]);
    }
  }

  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<Vec> out(k, Vec(p, 0.0));
  for (std::size_t i = 0; i < k; ++i) {
    axpy((1.0 - zeta) * inv_n, pr_sums[i], out[i]);
    axpy(zeta / static_cast<double>(k) * inv_n, np_sums[i], out[i]);
  }
  return out;
}

double stationarity_residual(const ModelBank& bank, const Population& pop, const LossModel& loss,
                             double zeta) {
  double sq = 0.0;
  for (const Vec& g : reference::gradient_f(bank, pop, loss, zeta)) sq += squared_norm(g);
  return std::sqrt(sq);
}

}  // namespace msgd::reference
