#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace msgd {

using Vec = std::vector<double>;

/// Task families supported by the simulator. The task kind decides which
/// loss family applies and which metrics are defined.
enum class TaskKind { Scalar1D, MaskedRegression, BinaryClassification };

const char* to_string(TaskKind kind);

/// One user's payload. `features` always holds the d-dimensional vector z.
/// For classification `label` is 0 or 1; for masked regression `ratings`
/// holds the d_r targets and `mask` the observed indices (0-based, sorted).
struct DataPoint {
  Vec features;
  std::optional<double> label;
  Vec ratings;
  std::vector<int> mask;
};

/// Tells a loss how to view a flat parameter vector: `rows` is the feature
/// dimension, `cols` the number of per-column linear models (1 except for
/// masked regression, where column c occupies [c*rows, (c+1)*rows)).
struct ParamShape {
  int rows = 1;
  int cols = 1;
  int size() const { return rows * cols; }
  bool operator==(const ParamShape&) const = default;
};

/// The tuple of k service models, stored as flat vectors of equal length.
struct ModelBank {
  std::vector<Vec> params;
  ParamShape shape;

  int k() const { return static_cast<int>(params.size()); }
  int dim() const { return shape.size(); }
};

/// Builds a bank of k zero vectors for the given shape.
ModelBank make_bank(int k, ParamShape shape);

/// Advisory check that the k parameter vectors are pairwise distinct.
/// Duplicates produce warnings rather than errors; the tie-break rule keeps
/// the dynamics well defined either way.
std::vector<std::string> validate_bank(const ModelBank& bank);

/// A finite user population. All points share the feature dimension and
/// task kind; `support_radius` records max ||features|| for diagnostics.
struct Population {
  std::vector<DataPoint> points;
  int dim = 0;
  TaskKind kind = TaskKind::Scalar1D;
  double support_radius = 0.0;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Validates homogeneity (dimensions, labels/masks per task kind) and
/// computes the support radius. Throws std::invalid_argument on violation.
Population make_population(std::vector<DataPoint> points, TaskKind kind);

enum class ScheduleKind { InverseT, Constant, Custom };

/// Step-size schedule. InverseT yields eta_c / t; Constant yields eta_c;
/// Custom reads from a table (last entry repeats past the end).
struct StepSchedule {
  ScheduleKind kind = ScheduleKind::InverseT;
  double eta_c = 1.0;
  Vec table;

  /// Whether sum_t (eta^t)^2 is known finite. True for inverse-t, false for
  /// constant and custom (not verifiable from a finite table).
  bool square_summable() const { return kind == ScheduleKind::InverseT; }
};

/// Step size at step t >= 1. Throws std::domain_error for t < 1.
double step_size(const StepSchedule& schedule, long t);

/// Deterministic random stream. Identical (seed, stream) pairs produce
/// bit-identical sequences on a given build; distinct streams are mixed to
/// be statistically independent. All variate transforms are implemented
/// here rather than via std distributions so that the sequence does not
/// depend on the standard library.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed, std::uint64_t stream = 0);

  /// Uniform double in [0, 1).
  double uniform01();
  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi);
  /// Uniform integer in [0, n), n >= 1. Unbiased (masked rejection).
  std::uint64_t uniform_below(std::uint64_t n);
  /// Standard normal via Box-Muller.
  double normal(double mean = 0.0, double stddev = 1.0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
};

// Small dense-vector helpers shared across modules.
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double squared_norm(std::span<const double> a);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

}  // namespace msgd
