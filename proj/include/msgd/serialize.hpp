#pragma once

#include <json.hpp>

#include "msgd/engine.hpp"
#include "msgd/metrics.hpp"
#include "msgd/objective.hpp"

namespace msgd {

using json = nlohmann::json;

json to_json(const EventRecord& evt);
json to_json(const TrajectoryRecord& rec);
json to_json(const PartitionSummary& part, bool include_assignment = false);
json to_json(const ObjectiveReport& report);
json to_json(const CompareTable& table);

/// CSV header + row for a trajectory record (17-significant-digit floats).
std::string trajectory_csv_header(int k, bool classification);
std::string trajectory_csv_row(const TrajectoryRecord& rec, bool classification);

}  // namespace msgd
