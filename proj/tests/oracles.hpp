// Test-only oracles: finite differences, quadrature, and small dataset
// builders. These stay independent of the library's analytic paths so they
// can vouch for them.
#pragma once

#include <cmath>
#include <functional>

#include "msgd/core.hpp"
#include "msgd/loss.hpp"

namespace msgd::testing {

/// Central finite-difference gradient of loss_value at theta.
inline Vec fd_loss_gradient(const LossModel& loss, const DataPoint& x, const Vec& theta,
                            double h = 1e-6) {
  Vec grad(theta.size(), 0.0);
  Vec work = theta;
  for (std::size_t c = 0; c < theta.size(); ++c) {
    const double saved = work[c];
    work[c] = saved + h;
    const double plus = loss_value(loss, x, work);
    work[c] = saved - h;
    const double minus = loss_value(loss, x, work);
    work[c] = saved;
    grad[c] = (plus - minus) / (2.0 * h);
  }
  return grad;
}

/// Composite Simpson rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 256) {
  if (n % 2 == 1) ++n;
  const double h = (b - a) / n;
  double sum = f(a) + f(b);
  for (int i = 1; i < n; ++i) sum += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

/// Quadrature value of E_{x~U(0,1)} min((x-t1)^2, (x-t2)^2) for t1 < t2 with
/// the boundary split at the midpoint, mirroring the printed derivation.
inline double quadrature_fpr_1d(double t1, double t2) {
  if (t1 > t2) std::swap(t1, t2);
  const double m = (t1 + t2) / 2.0;
  const auto sq1 = [t1](double x) { return (x - t1) * (x - t1); };
  const auto sq2 = [t2](double x) { return (x - t2) * (x - t2); };
  return simpson(sq1, 0.0, m) + simpson(sq2, m, 1.0);
}

inline Population scalar_population(const Vec& values) {
  std::vector<DataPoint> points;
  for (double v : values) points.push_back(DataPoint{{v}, {}, {}, {}});
  return make_population(std::move(points), TaskKind::Scalar1D);
}

inline DataPoint scalar_point(double v) { return DataPoint{{v}, {}, {}, {}}; }

/// Eigenvalues of a symmetric 2x2 matrix, ascending.
inline std::pair<double, double> eigen_sym2(double a, double b, double d) {
  const double tr = a + d;
  const double det = a * d - b * b;
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
  return {tr / 2.0 - disc, tr / 2.0 + disc};
}

}  // namespace msgd::testing
