#include "msgd/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace msgd {

json to_json(const EventRecord& evt) {
  return json{{"t", evt.t},
              {"point_id", evt.point_id},
              {"chosen", evt.chosen},
              {"was_random", evt.was_random},
              {"eta", evt.eta},
              {"grad_norm", evt.grad_norm}};
}

json to_json(const TrajectoryRecord& rec) {
  json j{{"t", rec.t},
         {"f", rec.f},
         {"f_pr", rec.f_pr},
         {"f_np", rec.f_np},
         {"stationarity", rec.stationarity},
         {"displacement", rec.displacement},
         {"a", rec.proportions},
         {"selection_counts", rec.selection_counts}};
  j["subpop_accuracy"] = rec.subpop_accuracy ? json(*rec.subpop_accuracy) : json(nullptr);
  j["wholepop_accuracy"] = rec.wholepop_accuracy ? json(*rec.wholepop_accuracy) : json(nullptr);
  return j;
}

json to_json(const PartitionSummary& part, bool include_assignment) {
  json j{{"counts", part.counts}, {"proportions", part.proportions}};
  // NaN marks an undefined mean over an empty partition; JSON has no NaN.
  json means = json::array();
  for (double m : part.mean_loss) means.push_back(std::isnan(m) ? json(nullptr) : json(m));
  j["mean_loss"] = means;
  if (include_assignment) j["assignment"] = part.assignment;
  return j;
}

json to_json(const ObjectiveReport& report) {
  json j{{"f", report.f},
         {"f_pr", report.f_pr},
         {"f_np", report.f_np},
         {"zeta", report.zeta},
         {"partition", to_json(report.partition)}};
  if (report.gradient) j["gradient"] = *report.gradient;
  return j;
}

json to_json(const CompareTable& table) {
  json rows = json::array();
  for (const CompareRow& row : table.rows)
    rows.push_back(json{{"run", row.run},
                        {"final_f", row.final_f},
                        {"median_f", row.median_f},
                        {"final_f_pr", row.final_f_pr},
                        {"final_stationarity", row.final_stationarity},
                        {"final_displacement", row.final_displacement}});
  return json{{"rows", rows}, {"final_f_delta", table.final_f_delta}, {"resampled", table.resampled}};
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string trajectory_csv_header(int k, bool classification) {
  std::ostringstream out;
  out << "t,f,f_pr,f_np,stationarity,displacement";
  for (int i = 0; i < k; ++i) out << ",a_" << i;
  if (classification) out << ",subpop_accuracy,wholepop_accuracy";
  for (int i = 0; i < k; ++i) out << ",selected_" << i;
  return out.str();
}

std::string trajectory_csv_row(const TrajectoryRecord& rec, bool classification) {
  std::ostringstream out;
  out << rec.t << "," << fmt(rec.f) << "," << fmt(rec.f_pr) << "," << fmt(rec.f_np) << ","
      << fmt(rec.stationarity) << "," << fmt(rec.displacement);
  for (double a : rec.proportions) out << "," << fmt(a);
  if (classification) {
    out << "," << (rec.subpop_accuracy ? fmt(*rec.subpop_accuracy) : "");
    out << "," << (rec.wholepop_accuracy ? fmt(*rec.wholepop_accuracy) : "");
  }
  for (long long c : rec.selection_counts) out << "," << c;
  return out.str();
}

}  // namespace msgd
