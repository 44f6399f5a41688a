#include "msgd/objective.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace msgd {

namespace {

// Points are reduced in fixed-size blocks: each block's partial sums are
// accumulated in index order and blocks are combined serially, so results
// do not depend on the OpenMP thread count or schedule.
constexpr std::size_t kBlock = 1024;

std::size_t block_count(std::size_t n) { return (n + kBlock - 1) / kBlock; }

void check_inputs(const ModelBank& bank, const Population& pop, const LossModel& loss) {
  if (bank.k() < 1) throw std::invalid_argument("objective: empty bank");
  if (pop.empty()) throw std::invalid_argument("objective: empty population");
  if (bank.shape != loss.shape)
    throw std::invalid_argument("objective: bank shape does not match loss shape");
}

struct EvalBlock {
  double min_sum = 0.0;     // sum of min_i l(x, theta_i)
  double direct_sum = 0.0;  // sum of per-point mixture-weighted losses
  Vec model_sums;           // per model, sum over all points
  Vec assigned_sums;        // per model, sum over assigned points
  std::vector<long long> counts;
};

}  // namespace

PartitionSummary partition(const ModelBank& bank, const Population& pop, const LossModel& loss) {
  // The partition is the zeta-free part of evaluate; reuse it.
  return evaluate(bank, pop, loss, 0.0).partition;
}

ObjectiveReport evaluate(const ModelBank& bank, const Population& pop, const LossModel& loss,
                         double zeta, bool with_gradient) {
  check_inputs(bank, pop, loss);
  if (zeta < 0.0 || zeta > 1.0) throw std::invalid_argument("evaluate: zeta must lie in [0, 1]");

  const std::size_t n = pop.size();
  const std::size_t k = static_cast<std::size_t>(bank.k());
  const std::size_t nblocks = block_count(n);
  const double uniform_w = zeta / static_cast<double>(k);

  std::vector<EvalBlock> partial(nblocks);
  std::vector<int> assignment(n);

#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < static_cast<std::int64_t>(nblocks); ++b) {
    EvalBlock& acc = partial[static_cast<std::size_t>(b)];
    acc.model_sums.assign(k, 0.0);
    acc.assigned_sums.assign(k, 0.0);
    acc.counts.assign(k, 0);
    Vec losses(k);
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = std::min(n, lo + kBlock);
    for (std::size_t p = lo; p < hi; ++p) {
      const DataPoint& x = pop.points[p];
      for (std::size_t i = 0; i < k; ++i) losses[i] = loss_value(loss, x, bank.params[i]);
      const int best = best_index(losses);
      assignment[p] = best;
      const double l_best = losses[static_cast<std::size_t>(best)];
      acc.min_sum += l_best;
      acc.assigned_sums[static_cast<std::size_t>(best)] += l_best;
      acc.counts[static_cast<std::size_t>(best)] += 1;
      double direct = (1.0 - zeta) * l_best;
      for (std::size_t i = 0; i < k; ++i) {
        acc.model_sums[i] += losses[i];
        direct += uniform_w * losses[i];
      }
      acc.direct_sum += direct;
    }
  }

  double min_sum = 0.0;
  double direct_sum = 0.0;
  Vec model_sums(k, 0.0);
  Vec assigned_sums(k, 0.0);
  std::vector<long long> counts(k, 0);
  for (const EvalBlock& acc : partial) {
    min_sum += acc.min_sum;
    direct_sum += acc.direct_sum;
    for (std::size_t i = 0; i < k; ++i) {
      model_sums[i] += acc.model_sums[i];
      assigned_sums[i] += acc.assigned_sums[i];
      counts[i] += acc.counts[i];
    }
  }

  const double inv_n = 1.0 / static_cast<double>(n);
  ObjectiveReport report;
  report.zeta = zeta;
  report.f = direct_sum * inv_n;
  report.f_pr = min_sum * inv_n;
  double np = 0.0;
  for (std::size_t i = 0; i < k; ++i) np += model_sums[i];
  report.f_np = np * inv_n / static_cast<double>(k);

  PartitionSummary& part = report.partition;
  part.assignment = std::move(assignment);
  part.counts = std::move(counts);
  part.proportions.resize(k);
  part.mean_loss.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    part.proportions[i] = static_cast<double>(part.counts[i]) * inv_n;
    part.mean_loss[i] = part.counts[i] > 0
                            ? assigned_sums[i] / static_cast<double>(part.counts[i])
                            : std::numeric_limits<double>::quiet_NaN();
  }

  if (with_gradient) report.gradient = gradient_f(bank, pop, loss, zeta);
  return report;
}

std::vector<Vec> gradient_f(const ModelBank& bank, const Population& pop, const LossModel& loss,
                            double zeta) {
  check_inputs(bank, pop, loss);
  if (zeta < 0.0 || zeta > 1.0) throw std::invalid_argument("gradient_f: zeta must lie in [0, 1]");

  const std::size_t n = pop.size();
  const std::size_t k = static_cast<std::size_t>(bank.k());
  const std::size_t p = static_cast<std::size_t>(bank.dim());
  const std::size_t nblocks = block_count(n);
  const bool need_np = zeta > 0.0;
  const bool need_pr = zeta < 1.0;

  // Per block: k assigned-gradient sums, then k whole-population sums.
  std::vector<Vec> pr_part(nblocks), np_part(nblocks);

#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < static_cast<std::int64_t>(nblocks); ++b) {
    Vec& pr = pr_part[static_cast<std::size_t>(b)];
    Vec& np = np_part[static_cast<std::size_t>(b)];
    pr.assign(need_pr ? k * p : 0, 0.0);
    np.assign(need_np ? k * p : 0, 0.0);
    Vec losses(k);
    Vec grad;
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = std::min(n, lo + kBlock);
    for (std::size_t q = lo; q < hi; ++q) {
      const DataPoint& x = pop.points[q];
      if (need_pr) {
        for (std::size_t i = 0; i < k; ++i) losses[i] = loss_value(loss, x, bank.params[i]);
        const std::size_t best = static_cast<std::size_t>(best_index(losses));
        loss_gradient(loss, x, bank.params[best], grad);
        axpy(1.0, grad, std::span<double>(pr).subspan(best * p, p));
      }
      if (need_np) {
        for (std::size_t i = 0; i < k; ++i) {
          loss_gradient(loss, x, bank.params[i], grad);
          axpy(1.0, grad, std::span<double>(np).subspan(i * p, p));
        }
      }
    }
  }

  const double inv_n = 1.0 / static_cast<double>(n);
  const double w_pr = (1.0 - zeta) * inv_n;
  const double w_np = zeta / static_cast<double>(k) * inv_n;
  std::vector<Vec> grad(k, Vec(p, 0.0));
  for (std::size_t b = 0; b < nblocks; ++b) {
    for (std::size_t i = 0; i < k; ++i) {
      if (need_pr)
        axpy(w_pr, std::span<const double>(pr_part[b]).subspan(i * p, p), grad[i]);
      if (need_np)
        axpy(w_np, std::span<const double>(np_part[b]).subspan(i * p, p), grad[i]);
    }
  }
  return grad;
}

double stationarity_residual(const ModelBank& bank, const Population& pop, const LossModel& loss,
                             double zeta) {
  const std::vector<Vec> grad = gradient_f(bank, pop, loss, zeta);
  double sq = 0.0;
  for (const Vec& g : grad) sq += squared_norm(g);
  return std::sqrt(sq);
}

double fixed_partition_objective(const ModelBank& bank, const Population& pop,
                                 const LossModel& loss, const std::vector<int>& assignment) {
  check_inputs(bank, pop, loss);
  if (assignment.size() != pop.size())
    throw std::invalid_argument("fixed_partition_objective: assignment size mismatch");

  const std::size_t n = pop.size();
  const std::size_t nblocks = block_count(n);
  Vec partial(nblocks, 0.0);

#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < static_cast<std::int64_t>(nblocks); ++b) {
    double sum = 0.0;
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = std::min(n, lo + kBlock);
    for (std::size_t q = lo; q < hi; ++q) {
      const int i = assignment[q];
      if (i < 0 || i >= bank.k())
        throw std::invalid_argument("fixed_partition_objective: assignment index out of range");
      sum += loss_value(loss, pop.points[q], bank.params[static_cast<std::size_t>(i)]);
    }
    partial[static_cast<std::size_t>(b)] = sum;
  }

  double total = 0.0;
  for (double s : partial) total += s;
  return total / static_cast<double>(n);
}

ClosedForm1D closed_form_1d(double theta1, double theta2) {
  if (theta1 == theta2) throw std::domain_error("closed_form_1d: parameters must differ");
  const bool swapped = theta1 > theta2;
  const double t1 = swapped ? theta2 : theta1;
  const double t2 = swapped ? theta1 : theta2;

  const double s = t1 + t2;
  ClosedForm1D out;
  out.f_pr = s * s * (t1 - t2) / 4.0 + t2 * t2 - t2 + 1.0 / 3.0;
  double g1 = s * (3.0 * t1 - t2) / 4.0;
  double g2 = s * (t1 - 3.0 * t2) / 4.0 + 2.0 * t2 - 1.0;
  double h11 = (3.0 * t1 + t2) / 2.0;
  double h12 = (t1 - t2) / 2.0;
  double h22 = -(t1 + 3.0 * t2) / 2.0 + 2.0;
  if (swapped) {
    std::swap(g1, g2);
    std::swap(h11, h22);
  }
  out.gradient = {g1, g2};
  out.hessian = {{{h11, h12}, {h12, h22}}};
  return out;
}

}  // namespace msgd
