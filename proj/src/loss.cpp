#include "msgd/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace msgd {

const char* to_string(LossFamily family) {
  switch (family) {
    case LossFamily::SquaredScalar: return "squared-scalar";
    case LossFamily::SquaredMasked: return "squared-masked-regression";
    case LossFamily::Logistic: return "logistic";
  }
  return "unknown";
}

LossModel make_squared_scalar() {
  LossModel m;
  m.family = LossFamily::SquaredScalar;
  m.shape = ParamShape{1, 1};
  return m;
}

LossModel make_squared_masked(int d, int d_r) {
  if (d < 1 || d_r < 1) throw std::invalid_argument("make_squared_masked: bad shape");
  LossModel m;
  m.family = LossFamily::SquaredMasked;
  m.shape = ParamShape{d, d_r};
  return m;
}

LossModel make_logistic(int d) {
  if (d < 1) throw std::invalid_argument("make_logistic: bad dimension");
  LossModel m;
  m.family = LossFamily::Logistic;
  m.shape = ParamShape{d, 1};
  return m;
}

LossModel default_loss_for(TaskKind kind, int d, int d_r) {
  switch (kind) {
    case TaskKind::Scalar1D: return make_squared_scalar();
    case TaskKind::MaskedRegression: return make_squared_masked(d, d_r);
    case TaskKind::BinaryClassification: return make_logistic(d);
  }
  throw std::invalid_argument("default_loss_for: unknown task kind");
}

namespace {

void check_theta(const LossModel& loss, std::span<const double> theta) {
  if (static_cast<int>(theta.size()) != loss.shape.size())
    throw std::domain_error("loss: parameter dimension mismatch");
}

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

}  // namespace

double loss_value(const LossModel& loss, const DataPoint& x, std::span<const double> theta) {
  check_theta(loss, theta);
  switch (loss.family) {
    case LossFamily::SquaredScalar: {
      if (x.features.size() != 1) throw std::domain_error("squared-scalar: d must be 1");
      const double diff = x.features[0] - theta[0];
      return diff * diff;
    }
    case LossFamily::SquaredMasked: {
      const int d = loss.shape.rows;
      if (static_cast<int>(x.features.size()) != d)
        throw std::domain_error("squared-masked: feature dimension mismatch");
      if (x.mask.empty()) throw std::domain_error("squared-masked: empty mask");
      double sum = 0.0;
      for (int c : x.mask) {
        if (c < 0 || c >= loss.shape.cols)
          throw std::domain_error("squared-masked: mask index out of range");
        const double pred = dot(theta.subspan(static_cast<std::size_t>(c) * d, d), x.features);
        const double diff = pred - x.ratings[static_cast<std::size_t>(c)];
        sum += diff * diff;
      }
      return sum / static_cast<double>(x.mask.size());
    }
    case LossFamily::Logistic: {
      if (x.features.size() != theta.size())
        throw std::domain_error("logistic: feature dimension mismatch");
      if (!x.label) throw std::domain_error("logistic: missing label");
      const double y = *x.label;
      const double p =
          std::clamp(sigmoid(dot(theta, x.features)), loss.prob_clamp, 1.0 - loss.prob_clamp);
      return -y * std::log(p) - (1.0 - y) * std::log(1.0 - p);
    }
  }
  throw std::domain_error("loss_value: unknown family");
}

void loss_gradient(const LossModel& loss, const DataPoint& x, std::span<const double> theta,
                   Vec& grad) {
  check_theta(loss, theta);
  grad.assign(theta.size(), 0.0);
  switch (loss.family) {
    case LossFamily::SquaredScalar: {
      if (x.features.size() != 1) throw std::domain_error("squared-scalar: d must be 1");
      grad[0] = -2.0 * (x.features[0] - theta[0]);
      return;
    }
    case LossFamily::SquaredMasked: {
      const int d = loss.shape.rows;
      if (static_cast<int>(x.features.size()) != d)
        throw std::domain_error("squared-masked: feature dimension mismatch");
      if (x.mask.empty()) throw std::domain_error("squared-masked: empty mask");
      const double inv_m = 1.0 / static_cast<double>(x.mask.size());
      for (int c : x.mask) {
        if (c < 0 || c >= loss.shape.cols)
          throw std::domain_error("squared-masked: mask index out of range");
        const std::size_t off = static_cast<std::size_t>(c) * d;
        const double pred = dot(theta.subspan(off, d), x.features);
        const double scale = 2.0 * inv_m * (pred - x.ratings[static_cast<std::size_t>(c)]);
        axpy(scale, x.features, std::span<double>(grad).subspan(off, d));
      }
      return;
    }
    case LossFamily::Logistic: {
      if (x.features.size() != theta.size())
        throw std::domain_error("logistic: feature dimension mismatch");
      if (!x.label) throw std::domain_error("logistic: missing label");
      const double scale = sigmoid(dot(theta, x.features)) - *x.label;
      axpy(scale, x.features, grad);
      return;
    }
  }
  throw std::domain_error("loss_gradient: unknown family");
}

Vec loss_gradient(const LossModel& loss, const DataPoint& x, std::span<const double> theta) {
  Vec grad;
  loss_gradient(loss, x, theta, grad);
  return grad;
}

int predict_class(const LossModel& loss, const DataPoint& x, std::span<const double> theta) {
  if (loss.family != LossFamily::Logistic)
    throw std::domain_error("predict_class: classification loss required");
  return dot(theta, x.features) > 0.0 ? 1 : 0;
}

std::pair<double, double> estimate_constants(LossModel& loss, const Population& pop, double bound,
                                             RandomSource& rng, int theta_samples,
                                             int pair_samples) {
  if (bound <= 0.0) throw std::invalid_argument("estimate_constants: bound must be positive");
  const int p = loss.shape.size();
  auto draw_theta = [&] {
    Vec theta(static_cast<std::size_t>(p));
    for (double& v : theta) v = rng.uniform(-bound, bound);
    return theta;
  };
  // Cap the per-sample scan so huge populations stay cheap.
  const std::size_t stride = std::max<std::size_t>(1, pop.size() / 2048);

  double l_hat = 0.0;
  Vec grad;
  for (int s = 0; s < theta_samples; ++s) {
    const Vec theta = draw_theta();
    for (std::size_t n = 0; n < pop.size(); n += stride) {
      loss_gradient(loss, pop.points[n], theta, grad);
      l_hat = std::max(l_hat, norm2(grad));
    }
  }

  double beta_hat = 0.0;
  Vec grad_b;
  for (int s = 0; s < pair_samples; ++s) {
    const Vec ta = draw_theta();
    const Vec tb = draw_theta();
    Vec delta(ta.size());
    for (std::size_t i = 0; i < ta.size(); ++i) delta[i] = ta[i] - tb[i];
    const double dist = norm2(delta);
    if (dist < 1e-12) continue;
    const std::size_t n = static_cast<std::size_t>(rng.uniform_below(pop.size()));
    loss_gradient(loss, pop.points[n], ta, grad);
    loss_gradient(loss, pop.points[n], tb, grad_b);
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] -= grad_b[i];
    beta_hat = std::max(beta_hat, norm2(grad) / dist);
  }

  loss.lipschitz_hat = l_hat;
  loss.smoothness_hat = beta_hat;
  return {l_hat, beta_hat};
}

}  // namespace msgd
