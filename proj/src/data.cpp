#include "msgd/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace msgd {

const char* to_string(DataSource source) {
  switch (source) {
    case DataSource::Uniform1D: return "uniform-1d";
    case DataSource::GaussianMixture: return "gaussian-mixture";
    case DataSource::CsvClassification: return "csv-classification";
    case DataSource::CsvMaskedRegression: return "csv-masked-regression";
  }
  return "unknown";
}

namespace {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // ragged rows rejected at read
};

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  CsvTable table;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells = split_line(line);
    if (line_no == 1) {
      table.header = std::move(cells);
      continue;
    }
    if (cells.size() != table.header.size())
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected " +
                               std::to_string(table.header.size()) + " cells, got " +
                               std::to_string(cells.size()));
    table.rows.push_back(std::move(cells));
  }
  if (table.header.empty()) throw std::runtime_error(path + ": missing header row");
  return table;
}

std::size_t column_index(const CsvTable& table, const std::string& name, const std::string& path) {
  for (std::size_t i = 0; i < table.header.size(); ++i)
    if (table.header[i] == name) return i;
  throw std::runtime_error(path + ": no column named '" + name + "'");
}

double parse_number(const std::string& cell, const std::string& path, long row,
                    const std::string& column) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(cell, &pos);
    if (pos != cell.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(path + ":" + std::to_string(row + 2) + ": column '" + column +
                             "': expected a number, got '" + cell + "'");
  }
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::size_t> resolve_feature_columns(const CsvTable& table, const DatasetSpec& spec,
                                                 const std::string& path) {
  std::vector<std::size_t> cols;
  if (!spec.feature_columns.empty()) {
    for (const std::string& name : spec.feature_columns)
      cols.push_back(column_index(table, name, path));
    return cols;
  }
  // Default: every column that is not the label or a rating column.
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    const std::string& name = table.header[i];
    if (!spec.label_column.empty() && name == spec.label_column) continue;
    if (std::find(spec.rating_columns.begin(), spec.rating_columns.end(), name) !=
        spec.rating_columns.end())
      continue;
    cols.push_back(i);
  }
  if (cols.empty()) throw std::runtime_error(path + ": no feature columns");
  return cols;
}

std::vector<DataPoint> load_classification(const DatasetSpec& spec, TaskKind* kind) {
  const CsvTable table = read_csv(spec.path);
  const std::vector<std::size_t> fcols = resolve_feature_columns(table, spec, spec.path);
  const bool labeled = !spec.label_column.empty();
  const std::size_t lcol = labeled ? column_index(table, spec.label_column, spec.path) : 0;

  std::vector<DataPoint> points;
  points.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    DataPoint p;
    p.features.reserve(fcols.size());
    for (std::size_t c : fcols)
      p.features.push_back(
          parse_number(table.rows[r][c], spec.path, static_cast<long>(r), table.header[c]));
    if (labeled) {
      const double y =
          parse_number(table.rows[r][lcol], spec.path, static_cast<long>(r), spec.label_column);
      if (y != 0.0 && y != 1.0)
        throw std::runtime_error(spec.path + ":" + std::to_string(r + 2) +
                                 ": label must be 0 or 1, got " + table.rows[r][lcol]);
      p.label = y;
    }
    points.push_back(std::move(p));
  }
  *kind = labeled ? TaskKind::BinaryClassification : TaskKind::Scalar1D;
  return points;
}

// Deterministic unit vector orthogonal to mu (any unit vector when mu = 0).
Vec orthogonal_direction(const Vec& mu, std::size_t component) {
  const std::size_t d = mu.size();
  if (d == 1) return {1.0};
  const double mu_norm = norm2(mu);
  for (std::size_t attempt = 0; attempt < d; ++attempt) {
    Vec w(d, 0.0);
    w[(component + attempt) % d] = 1.0;
    if (mu_norm > 0.0) {
      const double proj = dot(w, mu) / (mu_norm * mu_norm);
      axpy(-proj, mu, w);
    }
    const double n = norm2(w);
    if (n > 1e-9) {
      for (double& v : w) v /= n;
      return w;
    }
  }
  throw std::runtime_error("orthogonal_direction: degenerate mean vector");
}

std::vector<DataPoint> sample_mixture(const DatasetSpec& spec, RandomSource& rng,
                                      TaskKind* kind) {
  const MixtureSpec& mix = spec.mixture;
  const std::size_t comps = mix.means.size();
  if (comps == 0) throw std::invalid_argument("gaussian-mixture: no components");
  const std::size_t d = mix.means.front().size();
  for (const Vec& mu : mix.means)
    if (mu.size() != d) throw std::invalid_argument("gaussian-mixture: ragged means");
  if (mix.stddevs.size() != comps)
    throw std::invalid_argument("gaussian-mixture: need one stddev per component");
  Vec weights = mix.weights;
  if (weights.empty()) weights.assign(comps, 1.0 / static_cast<double>(comps));
  if (weights.size() != comps)
    throw std::invalid_argument("gaussian-mixture: need one weight per component");
  double wsum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("gaussian-mixture: negative weight");
    wsum += w;
  }
  if (wsum <= 0.0) throw std::invalid_argument("gaussian-mixture: zero total weight");
  for (double& w : weights) w /= wsum;

  if (mix.label_rule == LabelRule::None && d != 1)
    throw std::invalid_argument("gaussian-mixture: unlabeled data must be 1-dimensional");
  if (mix.label_rule == LabelRule::Component && mix.labels.size() != comps)
    throw std::invalid_argument("gaussian-mixture: need one label per component");

  std::vector<Vec> hyperplanes;
  if (mix.label_rule == LabelRule::LocalHyperplane)
    for (std::size_t c = 0; c < comps; ++c)
      hyperplanes.push_back(orthogonal_direction(mix.means[c], c));

  std::vector<DataPoint> points;
  points.reserve(static_cast<std::size_t>(spec.n));
  for (long i = 0; i < spec.n; ++i) {
    const double u = rng.uniform01();
    std::size_t c = comps - 1;
    double acc = 0.0;
    for (std::size_t j = 0; j < comps; ++j) {
      acc += weights[j];
      if (u < acc) {
        c = j;
        break;
      }
    }
    DataPoint p;
    p.features.resize(d);
    for (std::size_t j = 0; j < d; ++j)
      p.features[j] = mix.means[c][j] + mix.stddevs[c] * rng.normal();
    switch (mix.label_rule) {
      case LabelRule::None: break;
      case LabelRule::Component: p.label = static_cast<double>(mix.labels[c] != 0); break;
      case LabelRule::LocalHyperplane: {
        Vec delta = p.features;
        axpy(-1.0, mix.means[c], delta);
        p.label = dot(hyperplanes[c], delta) > 0.0 ? 1.0 : 0.0;
        break;
      }
    }
    points.push_back(std::move(p));
  }
  *kind = mix.label_rule == LabelRule::None ? TaskKind::Scalar1D
                                            : TaskKind::BinaryClassification;
  return points;
}

void standardize_in_place(std::vector<DataPoint>& train, std::vector<DataPoint>& test,
                          Vec& means, Vec& scales) {
  const std::size_t d = train.front().features.size();
  means.assign(d, 0.0);
  scales.assign(d, 1.0);
  for (const DataPoint& p : train)
    for (std::size_t j = 0; j < d; ++j) means[j] += p.features[j];
  for (double& m : means) m /= static_cast<double>(train.size());
  Vec var(d, 0.0);
  for (const DataPoint& p : train)
    for (std::size_t j = 0; j < d; ++j) {
      const double c = p.features[j] - means[j];
      var[j] += c * c;
    }
  for (std::size_t j = 0; j < d; ++j) {
    var[j] /= static_cast<double>(train.size());
    // Variance floor: constant columns keep scale 1 and center to zero.
    scales[j] = var[j] < 1e-12 ? 1.0 : std::sqrt(var[j]);
  }
  auto apply = [&](std::vector<DataPoint>& pts) {
    for (DataPoint& p : pts)
      for (std::size_t j = 0; j < d; ++j) p.features[j] = (p.features[j] - means[j]) / scales[j];
  };
  apply(train);
  apply(test);
}

}  // namespace

Population ingest_masked(const std::string& path, const DatasetSpec& spec, long* dropped) {
  const CsvTable table = read_csv(path);
  const std::vector<std::size_t> fcols = resolve_feature_columns(table, spec, path);
  if (spec.rating_columns.empty())
    throw std::runtime_error(path + ": masked ingestion needs rating columns");
  std::vector<std::size_t> rcols;
  for (const std::string& name : spec.rating_columns)
    rcols.push_back(column_index(table, name, path));

  std::vector<DataPoint> points;
  long dropped_count = 0;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    DataPoint p;
    for (std::size_t c : fcols)
      p.features.push_back(
          parse_number(table.rows[r][c], path, static_cast<long>(r), table.header[c]));
    p.ratings.assign(rcols.size(), 0.0);
    for (std::size_t j = 0; j < rcols.size(); ++j) {
      const std::string& cell = table.rows[r][rcols[j]];
      if (cell == spec.sentinel) continue;
      p.ratings[j] = parse_number(cell, path, static_cast<long>(r), table.header[rcols[j]]);
      p.mask.push_back(static_cast<int>(j));
    }
    if (p.mask.empty()) {
      ++dropped_count;
      continue;
    }
    points.push_back(std::move(p));
  }
  if (dropped) *dropped = dropped_count;
  if (points.empty())
    throw std::domain_error(path + ": every row has an empty mask; nothing to learn from");
  return make_population(std::move(points), TaskKind::MaskedRegression);
}

SplitDataset generate(const DatasetSpec& spec, RandomSource& rng) {
  if (spec.n < 2 && (spec.source == DataSource::Uniform1D || spec.source == DataSource::GaussianMixture))
    throw std::invalid_argument("generate: sample count must be >= 2");
  if (!(spec.split_fraction > 0.0 && spec.split_fraction < 1.0))
    throw std::invalid_argument("generate: split fraction must lie in (0, 1)");

  TaskKind kind = TaskKind::Scalar1D;
  std::vector<DataPoint> points;
  long dropped = 0;
  switch (spec.source) {
    case DataSource::Uniform1D:
      points.reserve(static_cast<std::size_t>(spec.n));
      for (long i = 0; i < spec.n; ++i) points.push_back(DataPoint{{rng.uniform01()}, {}, {}, {}});
      break;
    case DataSource::GaussianMixture:
      points = sample_mixture(spec, rng, &kind);
      break;
    case DataSource::CsvClassification:
      points = load_classification(spec, &kind);
      break;
    case DataSource::CsvMaskedRegression: {
      Population pop = ingest_masked(spec.path, spec, &dropped);
      kind = pop.kind;
      points = std::move(pop.points);
      break;
    }
  }
  if (points.size() < 2) throw std::invalid_argument("generate: need at least 2 points to split");

  // Uniform shuffle then cut.
  std::vector<std::size_t> order(points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = order.size() - 1; i > 0; --i)
    std::swap(order[i], order[static_cast<std::size_t>(rng.uniform_below(i + 1))]);

  std::size_t n_test = static_cast<std::size_t>(
      std::floor(spec.split_fraction * static_cast<double>(points.size())));
  n_test = std::clamp<std::size_t>(n_test, 1, points.size() - 1);

  std::vector<DataPoint> train_pts, test_pts;
  for (std::size_t i = 0; i < order.size(); ++i) {
    DataPoint& p = points[order[i]];
    if (i < points.size() - n_test)
      train_pts.push_back(std::move(p));
    else
      test_pts.push_back(std::move(p));
  }

  SplitDataset out;
  out.dropped_rows = dropped;
  if (spec.standardize) standardize_in_place(train_pts, test_pts, out.feature_means, out.feature_scales);
  out.train = make_population(std::move(train_pts), kind);
  out.test = make_population(std::move(test_pts), kind);
  return out;
}

SplitDataset generate(const DatasetSpec& spec) {
  RandomSource rng(spec.seed);
  return generate(spec, rng);
}

void write_population_csv(const Population& pop, const std::string& path,
                          const std::string& sentinel) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  const std::size_t d = static_cast<std::size_t>(pop.dim);
  switch (pop.kind) {
    case TaskKind::Scalar1D: out << "x\n"; break;
    case TaskKind::BinaryClassification: {
      for (std::size_t j = 0; j < d; ++j) out << "f" << j << ",";
      out << "label\n";
      break;
    }
    case TaskKind::MaskedRegression: {
      const std::size_t dr = pop.points.front().ratings.size();
      for (std::size_t j = 0; j < d; ++j) out << "f" << j << ",";
      for (std::size_t j = 0; j < dr; ++j) out << "r" << j << (j + 1 < dr ? "," : "");
      out << "\n";
      break;
    }
  }
  for (const DataPoint& p : pop.points) {
    for (std::size_t j = 0; j < d; ++j) {
      if (j) out << ",";
      out << format_number(p.features[j]);
    }
    if (pop.kind == TaskKind::BinaryClassification) out << "," << format_number(*p.label);
    if (pop.kind == TaskKind::MaskedRegression) {
      for (std::size_t j = 0; j < p.ratings.size(); ++j) {
        const bool rated =
            std::find(p.mask.begin(), p.mask.end(), static_cast<int>(j)) != p.mask.end();
        out << "," << (rated ? format_number(p.ratings[j]) : sentinel);
      }
    }
    out << "\n";
  }
}

Population read_population_csv(const std::string& path, TaskKind kind) {
  DatasetSpec spec;
  spec.path = path;
  switch (kind) {
    case TaskKind::Scalar1D: {
      TaskKind got;
      spec.label_column.clear();
      std::vector<DataPoint> points = load_classification(spec, &got);
      return make_population(std::move(points), TaskKind::Scalar1D);
    }
    case TaskKind::BinaryClassification: {
      TaskKind got;
      spec.label_column = "label";
      std::vector<DataPoint> points = load_classification(spec, &got);
      return make_population(std::move(points), got);
    }
    case TaskKind::MaskedRegression: {
      const CsvTable table = read_csv(path);
      for (const std::string& name : table.header)
        if (name.size() >= 1 && name[0] == 'r' && name != "label")
          spec.rating_columns.push_back(name);
      return ingest_masked(path, spec, nullptr);
    }
  }
  throw std::invalid_argument("read_population_csv: unknown task kind");
}

Population make_uniform_grid_population(long n) {
  if (n < 1) throw std::invalid_argument("make_uniform_grid_population: n must be >= 1");
  std::vector<DataPoint> points;
  points.reserve(static_cast<std::size_t>(n));
  for (long j = 0; j < n; ++j)
    points.push_back(
        DataPoint{{(static_cast<double>(j) + 0.5) / static_cast<double>(n)}, {}, {}, {}});
  return make_population(std::move(points), TaskKind::Scalar1D);
}

}  // namespace msgd
