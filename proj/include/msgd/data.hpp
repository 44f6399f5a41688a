#pragma once

#include <string>

#include "msgd/core.hpp"

namespace msgd {

enum class DataSource { Uniform1D, GaussianMixture, CsvClassification, CsvMaskedRegression };

const char* to_string(DataSource source);

/// How labels are attached to Gaussian-mixture samples.
///   None            -> unlabeled scalar task (dimension must be 1)
///   Component       -> constant label per mixture component
///   LocalHyperplane -> y = 1{w_c . (z - mu_c) > 0} with w_c a deterministic
///                      unit vector orthogonal to mu_c; gives every cluster
///                      its own linear concept so that no single
///                      origin-through hyperplane fits all clusters.
enum class LabelRule { None, Component, LocalHyperplane };

struct MixtureSpec {
  std::vector<Vec> means;  // one per component, all of equal dimension
  Vec stddevs;             // per component (isotropic)
  Vec weights;             // optional; defaults to equal
  LabelRule label_rule = LabelRule::None;
  std::vector<int> labels;  // per component, for LabelRule::Component
};

struct DatasetSpec {
  DataSource source = DataSource::Uniform1D;
  long n = 1000;  // synthetic sample count
  MixtureSpec mixture;
  // CSV sources. Header row is required; columns are selected by name.
  std::string path;
  std::vector<std::string> feature_columns;  // empty: every non-label column
  std::string label_column;                  // empty for unlabeled scalar data
  std::vector<std::string> rating_columns;
  std::string sentinel;  // cell content marking an unrated entry ("" = empty cell)
  double split_fraction = 0.2;  // test fraction, in (0, 1)
  bool standardize = false;
  std::uint64_t seed = 0;
};

struct SplitDataset {
  Population train;
  Population test;
  long dropped_rows = 0;   // masked ingestion: rows with no rated entry
  Vec feature_means;       // standardization statistics (train only)
  Vec feature_scales;
};

/// Builds (train, test) from the spec: generate or ingest, shuffle-split,
/// then standardize using train statistics (constant columns get scale 1,
/// so they standardize to all zeros). Deterministic given the rng state.
SplitDataset generate(const DatasetSpec& spec, RandomSource& rng);
/// Overload seeding a fresh stream from spec.seed.
SplitDataset generate(const DatasetSpec& spec);

/// Reads a masked-regression CSV: feature columns plus rating columns where
/// a sentinel cell means unrated. Rows with no rated entry are dropped and
/// counted; a file with only such rows is a domain error.
Population ingest_masked(const std::string& path, const DatasetSpec& spec,
                         long* dropped = nullptr);

/// Writes a population using the same schema the ingestors read
/// (17-significant-digit floats, so a round trip is exact).
void write_population_csv(const Population& pop, const std::string& path,
                          const std::string& sentinel = "");

/// Reads a population written by write_population_csv.
Population read_population_csv(const std::string& path, TaskKind kind);

/// Evenly spaced midpoint grid on [0, 1]: x_j = (j + 0.5) / n, as a
/// scalar-1d population. With n even no point sits on the 0.5 boundary.
Population make_uniform_grid_population(long n);

}  // namespace msgd
