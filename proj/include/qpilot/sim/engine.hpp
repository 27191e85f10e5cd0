#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qpilot/common/resource_class.hpp"
#include "qpilot/common/sim_time.hpp"
#include "qpilot/motifs/workload.hpp"
#include "qpilot/pilot/manager.hpp"
#include "qpilot/pilot/pilot.hpp"
#include "qpilot/sim/report.hpp"
#include "qpilot/sim/trace.hpp"

namespace qpilot::sim {

// How long a task occupies a slot on a given kind of pilot.
struct ExecutionCost {
  double statevector_seconds = 1.0;  // one circuit of reference_qubits width
  int reference_qubits = 24;
  double seconds_per_layer = 0.05;   // hardware execution
  int default_depth = 10;            // for width-only circuits run on a QPU

  void validate() const;
};

struct CostConfig {
  ExecutionCost cpu{1.0, 24, 0.05, 10};
  ExecutionCost gpu{0.1, 24, 0.05, 10};
  ExecutionCost qpu{1.0, 24, 0.05, 10};

  const ExecutionCost& for_class(ResourceClass rc) const;
  ExecutionCost& for_class(ResourceClass rc);
  void validate() const;
};

/// Service time of `task` on a pilot of class `pilot_class`, jitter included.
/// Statevector work doubles per qubit; QPU work scales with depth.
double service_seconds(const motifs::TaskSpec& task, ResourceClass pilot_class,
                       const CostConfig& costs);

using pilot::SchedulingPolicy;

struct SimOptions {
  pilot::DispatchOverheadModel overhead;
  CostConfig costs;
  int retries = 0;
  bool throughput_includes_startup = false;
  // Called after every dispatch round; used by property tests.
  std::function<void(const pilot::PilotManager&, SchedulingPolicy, SimTime)> after_dispatch;
};

struct TaskOutcome {
  motifs::TaskId id = 0;
  pilot::TaskState state = pilot::TaskState::created;
  std::optional<pilot::PilotId> pilot;
  std::optional<int> slot;
  std::optional<SimTime> started_at;
  std::optional<SimTime> finished_at;
  int attempts = 0;
  std::string failure_reason;
};

struct SimResult {
  SimReport report;
  Trace trace;
  std::vector<TaskOutcome> tasks;
};

// Runs the workload to completion. Throws motifs::CycleError for cyclic
// workloads and std::invalid_argument for an empty pilot list, invalid pilot
// descriptions or dependencies that point at later task ids.
SimResult run(const motifs::WorkloadSpec& workload,
              std::span<const pilot::PilotDescription> pilots, SchedulingPolicy policy,
              std::uint64_t seed, const SimOptions& options = {});

}  // namespace qpilot::sim
