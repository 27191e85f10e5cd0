#pragma once

#include <string>

#include <json.hpp>

#include "qpilot/motifs/workload.hpp"

namespace qpilot::motifs {

// Workload document:
//   {"motif": ..., "metadata": {...},
//    "tasks": [{"id", "name", "kind", "resource_class", "cost", "mem_bytes", "jitter"}],
//    "edges": [[dependency, dependent], ...]}
// Parsing rejects unknown keys and validates the result.
nlohmann::json workload_to_json(const WorkloadSpec& workload);
WorkloadSpec workload_from_json(const nlohmann::json& doc);

nlohmann::json cost_to_json(const CostModel& cost);
CostModel cost_from_json(const nlohmann::json& doc);

}  // namespace qpilot::motifs
