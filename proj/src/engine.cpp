#include "msgd/engine.hpp"

#include <cmath>
#include <stdexcept>

#include "msgd/objective.hpp"

namespace msgd {

const char* to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::Msgd: return "msgd";
    case Algorithm::FullInfo: return "full-info";
    case Algorithm::MsgdMinibatch: return "msgd-minibatch";
  }
  return "unknown";
}

double effective_eval_zeta(const RunConfig& config) {
  if (config.eval_zeta) return *config.eval_zeta;
  if (config.algorithm == Algorithm::FullInfo) return 0.0;
  return config.policy.kind == ChoiceKind::BoundedRational ? config.policy.zeta : 0.0;
}

ModelBank initial_bank(const RunConfig& config, ParamShape shape, RandomSource& rng) {
  if (config.k < 1) throw std::invalid_argument("initial_bank: k must be >= 1");
  ModelBank bank = make_bank(config.k, shape);
  if (config.init.kind == InitSpec::Kind::Explicit) {
    if (static_cast<int>(config.init.values.size()) != config.k)
      throw std::invalid_argument("initial_bank: explicit init needs k vectors");
    for (int i = 0; i < config.k; ++i) {
      if (static_cast<int>(config.init.values[static_cast<std::size_t>(i)].size()) != shape.size())
        throw std::invalid_argument("initial_bank: explicit init vector has wrong dimension");
      bank.params[static_cast<std::size_t>(i)] = config.init.values[static_cast<std::size_t>(i)];
    }
    return bank;
  }
  if (!(config.init.low < config.init.high))
    throw std::invalid_argument("initial_bank: init box requires low < high");
  for (Vec& theta : bank.params)
    for (double& v : theta) v = rng.uniform(config.init.low, config.init.high);
  return bank;
}

EventRecord msgd_step(ModelBank& bank, const DataPoint& x, long t, const ChoicePolicy& policy,
                      const LossModel& loss, const StepSchedule& schedule, RandomSource& rng,
                      long point_id) {
  const Selection sel = select(policy, x, bank, loss, rng);
  const double eta = step_size(schedule, t + 1);
  Vec& theta = bank.params[static_cast<std::size_t>(sel.index)];
  const Vec grad = loss_gradient(loss, x, theta);
  axpy(-eta, grad, theta);

  EventRecord evt;
  evt.t = t;
  evt.point_id = point_id;
  evt.chosen = sel.index;
  evt.was_random = sel.was_random;
  evt.eta = eta;
  evt.grad_norm = norm2(grad);
  return evt;
}

std::vector<EventRecord> full_info_step(ModelBank& bank, const DataPoint& x, long t,
                                        const LossModel& loss, const StepSchedule& schedule,
                                        long point_id) {
  const double eta = step_size(schedule, t + 1);
  std::vector<EventRecord> events;
  events.reserve(static_cast<std::size_t>(bank.k()));
  for (int j = 0; j < bank.k(); ++j) {
    Vec& theta = bank.params[static_cast<std::size_t>(j)];
    const Vec grad = loss_gradient(loss, x, theta);
    axpy(-eta, grad, theta);
    EventRecord evt;
    evt.t = t;
    evt.point_id = point_id;
    evt.chosen = j;
    evt.was_random = false;
    evt.eta = eta;
    evt.grad_norm = norm2(grad);
    events.push_back(evt);
  }
  return events;
}

MinibatchOutcome minibatch_step(ModelBank& bank, std::span<const DataPoint> batch, long t,
                                const ChoicePolicy& policy, const LossModel& loss,
                                const StepSchedule& schedule, RandomSource& rng,
                                std::span<const long> point_ids) {
  if (batch.empty()) throw std::invalid_argument("minibatch_step: empty batch");
  const double eta = step_size(schedule, t + 1);
  const std::size_t k = static_cast<std::size_t>(bank.k());
  const std::size_t p = static_cast<std::size_t>(bank.dim());

  // All selections and gradients are taken against the pre-step bank.
  std::vector<Vec> grad_sums(k);
  std::vector<long long> share(k, 0);
  MinibatchOutcome out;
  Vec grad;
  for (std::size_t u = 0; u < batch.size(); ++u) {
    const DataPoint& x = batch[u];
    const Selection sel = select(policy, x, bank, loss, rng);
    const std::size_t i = static_cast<std::size_t>(sel.index);
    loss_gradient(loss, x, bank.params[i], grad);
    if (grad_sums[i].empty()) grad_sums[i].assign(p, 0.0);
    axpy(1.0, grad, grad_sums[i]);
    share[i] += 1;

    EventRecord evt;
    evt.t = t;
    evt.point_id = u < point_ids.size() ? point_ids[u] : -1;
    evt.chosen = sel.index;
    evt.was_random = sel.was_random;
    evt.eta = eta;
    evt.grad_norm = norm2(grad);
    out.events.push_back(evt);
  }

  for (std::size_t i = 0; i < k; ++i) {
    if (share[i] == 0) continue;
    const double scale = eta / static_cast<double>(share[i]);
    axpy(-scale, grad_sums[i], bank.params[i]);
    out.displacement += scale * norm2(grad_sums[i]);
  }
  return out;
}

namespace {

bool params_finite(const ModelBank& bank, std::span<const int> touched) {
  for (int i : touched)
    for (double v : bank.params[static_cast<std::size_t>(i)])
      if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace

RunResult run(const RunConfig& config, const Population& train, const Population& test,
              const LossModel& loss, bool collect_events) {
  if (config.steps < 0) throw std::invalid_argument("run: steps must be >= 0");
  if (config.eval_every < 1) throw std::invalid_argument("run: eval_every must be >= 1");
  if (config.batch < 1) throw std::invalid_argument("run: batch must be >= 1");
  if (train.empty() || test.empty()) throw std::invalid_argument("run: empty population");

  RandomSource rng(config.seed, config.stream);
  ModelBank bank = initial_bank(config, loss.shape, rng);
  const double eval_zeta = effective_eval_zeta(config);
  const std::size_t k = static_cast<std::size_t>(config.k);

  RunResult res;
  double displacement = 0.0;
  std::vector<long long> counts(k, 0);

  auto snapshot = [&](long t) {
    const ObjectiveReport rep = evaluate(bank, test, loss, eval_zeta, /*with_gradient=*/true);
    TrajectoryRecord rec;
    rec.t = t;
    rec.f = rep.f;
    rec.f_pr = rep.f_pr;
    rec.f_np = rep.f_np;
    double sq = 0.0;
    for (const Vec& g : *rep.gradient) sq += squared_norm(g);
    rec.stationarity = std::sqrt(sq);
    rec.displacement = displacement;
    rec.proportions = rep.partition.proportions;
    if (test.kind == TaskKind::BinaryClassification) {
      const AccuracyPair acc = accuracies(bank, test, loss);
      rec.subpop_accuracy = acc.subpop;
      rec.wholepop_accuracy = acc.wholepop;
    }
    rec.selection_counts = counts;
    res.trajectory.push_back(rec);
  };

  snapshot(0);
  std::vector<int> touched;
  std::vector<DataPoint> batch;
  std::vector<long> batch_ids;
  long last_snap = 0;
  for (long t = 0; t < config.steps; ++t) {
    touched.clear();
    double step_disp = 0.0;
    switch (config.algorithm) {
      case Algorithm::Msgd: {
        const long pid = static_cast<long>(rng.uniform_below(train.size()));
        const EventRecord evt = msgd_step(bank, train.points[static_cast<std::size_t>(pid)], t,
                                          config.policy, loss, config.schedule, rng, pid);
        step_disp = evt.eta * evt.grad_norm;
        counts[static_cast<std::size_t>(evt.chosen)] += 1;
        touched.push_back(evt.chosen);
        if (collect_events) res.events.push_back(evt);
        break;
      }
      case Algorithm::FullInfo: {
        const long pid = static_cast<long>(rng.uniform_below(train.size()));
        const std::vector<EventRecord> events = full_info_step(
            bank, train.points[static_cast<std::size_t>(pid)], t, loss, config.schedule, pid);
        for (const EventRecord& evt : events) {
          step_disp += evt.eta * evt.grad_norm;
          counts[static_cast<std::size_t>(evt.chosen)] += 1;
          touched.push_back(evt.chosen);
          if (collect_events) res.events.push_back(evt);
        }
        break;
      }
      case Algorithm::MsgdMinibatch: {
        batch.clear();
        batch_ids.clear();
        for (int u = 0; u < config.batch; ++u) {
          const long pid = static_cast<long>(rng.uniform_below(train.size()));
          batch.push_back(train.points[static_cast<std::size_t>(pid)]);
          batch_ids.push_back(pid);
        }
        MinibatchOutcome out =
            minibatch_step(bank, batch, t, config.policy, loss, config.schedule, rng, batch_ids);
        step_disp = out.displacement;
        for (const EventRecord& evt : out.events) {
          counts[static_cast<std::size_t>(evt.chosen)] += 1;
          touched.push_back(evt.chosen);
          if (collect_events) res.events.push_back(evt);
        }
        break;
      }
    }
    displacement += step_disp;

    if (!params_finite(bank, touched)) {
      res.aborted = true;
      res.abort_reason = "nonfinite parameters at step " + std::to_string(t);
      break;
    }
    if ((t + 1) % config.eval_every == 0) {
      snapshot(t + 1);
      last_snap = t + 1;
    }
  }
  if (!res.aborted && last_snap != config.steps) snapshot(config.steps);

  res.final_bank = std::move(bank);
  return res;
}

RunResult run(const RunConfig& config, const Population& train, const Population& test,
              bool collect_events) {
  const int d_r = train.points.empty() ? 0 : static_cast<int>(train.points.front().ratings.size());
  const LossModel loss = default_loss_for(train.kind, train.dim, d_r);
  return run(config, train, test, loss, collect_events);
}

}  // namespace msgd
