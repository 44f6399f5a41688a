#include "msgd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace msgd {

Vec displacement_series(std::span<const EventRecord> events, double divisor) {
  if (divisor <= 0.0) throw std::invalid_argument("displacement_series: divisor must be > 0");
  Vec series;
  double total = 0.0;
  std::size_t i = 0;
  while (i < events.size()) {
    const long t = events[i].t;
    double step = 0.0;
    while (i < events.size() && events[i].t == t) {
      step += events[i].eta * events[i].grad_norm;
      ++i;
    }
    total += step / divisor;
    series.push_back(total);
  }
  return series;
}

AccuracyPair accuracies(const ModelBank& bank, const Population& test, const LossModel& loss) {
  if (test.kind != TaskKind::BinaryClassification)
    throw std::domain_error("accuracies: defined for classification tasks only");
  if (test.empty()) throw std::invalid_argument("accuracies: empty population");

  const std::size_t n = test.size();
  const std::size_t k = static_cast<std::size_t>(bank.k());
  const PartitionSummary part = partition(bank, test, loss);

  std::vector<long long> correct_on_own(k, 0);
  std::vector<long long> correct_on_all(k, 0);
  for (std::size_t q = 0; q < n; ++q) {
    const DataPoint& x = test.points[q];
    const int y = static_cast<int>(*x.label);
    for (std::size_t i = 0; i < k; ++i) {
      const bool hit = predict_class(loss, x, bank.params[i]) == y;
      if (hit) {
        correct_on_all[i] += 1;
        if (part.assignment[q] == static_cast<int>(i)) correct_on_own[i] += 1;
      }
    }
  }

  AccuracyPair out;
  // subpop: sum_i a_i * acc_i(X_i) = (1/N) sum_i correct_on_own_i, so empty
  // partitions drop out without a 0 * NaN hazard.
  long long own_total = 0;
  for (std::size_t i = 0; i < k; ++i) own_total += correct_on_own[i];
  out.subpop = static_cast<double>(own_total) / static_cast<double>(n);
  double whole = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    whole += static_cast<double>(correct_on_all[i]) / static_cast<double>(n);
  out.wholepop = whole / static_cast<double>(k);
  return out;
}

namespace {

double median(Vec values) {
  if (values.empty()) throw std::invalid_argument("median: empty");
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  return values.size() % 2 == 1 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

// Latest record with record.t <= t (records are in increasing t order).
const TrajectoryRecord& record_at(const std::vector<TrajectoryRecord>& run, long t) {
  const TrajectoryRecord* best = &run.front();
  for (const TrajectoryRecord& r : run) {
    if (r.t > t) break;
    best = &r;
  }
  return *best;
}

}  // namespace

CompareTable compare(const std::vector<std::vector<TrajectoryRecord>>& runs) {
  if (runs.empty()) throw std::invalid_argument("compare: no runs");
  for (const auto& run : runs)
    if (run.empty()) throw std::invalid_argument("compare: empty trajectory");

  CompareTable table;
  std::vector<long> grid;
  for (const TrajectoryRecord& r : runs.front()) grid.push_back(r.t);
  for (const auto& run : runs) {
    std::vector<long> g;
    for (const TrajectoryRecord& r : run) g.push_back(r.t);
    if (g != grid) table.resampled = true;
  }

  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& run = runs[i];
    CompareRow row;
    row.run = i;
    const TrajectoryRecord& last =
        table.resampled ? record_at(run, grid.back()) : run.back();
    row.final_f = last.f;
    row.final_f_pr = last.f_pr;
    row.final_stationarity = last.stationarity;
    row.final_displacement = last.displacement;
    Vec fs;
    for (long t : grid) fs.push_back(record_at(run, t).f);
    row.median_f = median(std::move(fs));
    table.rows.push_back(row);
  }

  table.final_f_delta.assign(runs.size(), Vec(runs.size(), 0.0));
  for (std::size_t i = 0; i < runs.size(); ++i)
    for (std::size_t j = 0; j < runs.size(); ++j)
      table.final_f_delta[i][j] = table.rows[i].final_f - table.rows[j].final_f;
  return table;
}

double median_final_f(const std::vector<std::vector<TrajectoryRecord>>& runs) {
  Vec finals;
  for (const auto& run : runs) {
    if (run.empty()) throw std::invalid_argument("median_final_f: empty trajectory");
    finals.push_back(run.back().f);
  }
  return median(std::move(finals));
}

}  // namespace msgd
