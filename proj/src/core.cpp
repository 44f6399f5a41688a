#include "msgd/core.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace msgd {

const char* to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::Scalar1D: return "scalar-1d";
    case TaskKind::MaskedRegression: return "regression-masked";
    case TaskKind::BinaryClassification: return "binary-classification";
  }
  return "unknown";
}

ModelBank make_bank(int k, ParamShape shape) {
  if (k < 1) throw std::invalid_argument("ModelBank: k must be >= 1");
  if (shape.size() < 1) throw std::invalid_argument("ModelBank: empty shape");
  ModelBank bank;
  bank.shape = shape;
  bank.params.assign(static_cast<std::size_t>(k), Vec(shape.size(), 0.0));
  return bank;
}

std::vector<std::string> validate_bank(const ModelBank& bank) {
  std::vector<std::string> warnings;
  const int k = bank.k();
  for (int i = 0; i < k; ++i) {
    if (static_cast<int>(bank.params[i].size()) != bank.dim())
      throw std::invalid_argument("ModelBank: parameter vector " + std::to_string(i) +
                                  " has wrong dimension");
  }
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      if (bank.params[i] == bank.params[j])
        warnings.push_back("models " + std::to_string(i) + " and " + std::to_string(j) +
                           " have identical parameters");
    }
  }
  return warnings;
}

Population make_population(std::vector<DataPoint> points, TaskKind kind) {
  if (points.empty()) throw std::invalid_argument("Population: empty point set");
  const int d = static_cast<int>(points.front().features.size());
  if (d < 1) throw std::invalid_argument("Population: zero-dimensional features");

  const std::size_t dr = points.front().ratings.size();
  double radius = 0.0;
  for (std::size_t n = 0; n < points.size(); ++n) {
    const DataPoint& p = points[n];
    if (static_cast<int>(p.features.size()) != d)
      throw std::invalid_argument("Population: inconsistent feature dimension at point " +
                                  std::to_string(n));
    switch (kind) {
      case TaskKind::Scalar1D:
        if (d != 1)
          throw std::invalid_argument("Population: scalar-1d task requires d = 1");
        break;
      case TaskKind::BinaryClassification:
        if (!p.label || (*p.label != 0.0 && *p.label != 1.0))
          throw std::invalid_argument("Population: point " + std::to_string(n) +
                                      " lacks a binary label");
        break;
      case TaskKind::MaskedRegression: {
        if (p.ratings.size() != dr)
          throw std::invalid_argument("Population: inconsistent rating dimension at point " +
                                      std::to_string(n));
        if (p.mask.empty())
          throw std::invalid_argument("Population: point " + std::to_string(n) +
                                      " has an empty mask");
        for (int idx : p.mask)
          if (idx < 0 || idx >= static_cast<int>(dr))
            throw std::invalid_argument("Population: mask index out of range at point " +
                                        std::to_string(n));
        break;
      }
    }
    radius = std::max(radius, norm2(p.features));
  }

  Population pop;
  pop.points = std::move(points);
  pop.dim = d;
  pop.kind = kind;
  pop.support_radius = radius;
  return pop;
}

double step_size(const StepSchedule& schedule, long t) {
  if (t < 1) throw std::domain_error("step_size: t must be >= 1");
  switch (schedule.kind) {
    case ScheduleKind::InverseT: return schedule.eta_c / static_cast<double>(t);
    case ScheduleKind::Constant: return schedule.eta_c;
    case ScheduleKind::Custom: {
      if (schedule.table.empty()) throw std::domain_error("step_size: empty custom table");
      const std::size_t idx = std::min<std::size_t>(static_cast<std::size_t>(t) - 1,
                                                    schedule.table.size() - 1);
      return schedule.table[idx];
    }
  }
  throw std::domain_error("step_size: unknown schedule kind");
}

namespace {

// splitmix64; used only to whiten (seed, stream) into engine seed material.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

RandomSource::RandomSource(std::uint64_t seed, std::uint64_t stream)
    : engine_(mix64(mix64(seed) ^ mix64(stream * 0xA24BAED4963EE407ULL + 1))),
      seed_(seed),
      stream_(stream) {}

double RandomSource::uniform01() {
  // 53-bit mantissa draw; value in [0, 1).
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomSource::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

std::uint64_t RandomSource::uniform_below(std::uint64_t n) {
  if (n == 0) throw std::domain_error("uniform_below: n must be >= 1");
  if (n == 1) return 0;
  std::uint64_t mask = n - 1;
  mask |= mask >> 1;
  mask |= mask >> 2;
  mask |= mask >> 4;
  mask |= mask >> 8;
  mask |= mask >> 16;
  mask |= mask >> 32;
  for (;;) {
    const std::uint64_t v = engine_() & mask;
    if (v < n) return v;
  }
}

double RandomSource::normal(double mean, double stddev) {
  // Box-Muller, cosine branch only: stateless at the cost of one extra draw.
  double u1 = uniform01();
  while (u1 <= 0.0) u1 = uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  return mean + stddev * r * std::cos(2.0 * 3.14159265358979323846 * u2);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_norm(std::span<const double> a) { return dot(a, a); }

double norm2(std::span<const double> a) { return std::sqrt(squared_norm(a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace msgd
