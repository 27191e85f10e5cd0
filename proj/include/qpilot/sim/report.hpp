#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qpilot/common/sim_time.hpp"

namespace qpilot::sim {

struct PilotUsage {
  std::uint32_t id = 0;
  std::string name;
  std::string resource_class;
  int slots = 0;
  double busy_seconds = 0.0;
  double active_seconds = 0.0;  // from activation to expiry or simulation end
  double utilization = 0.0;     // busy / (slots * active), 0 when never active
};

struct TaskFailure {
  std::uint32_t task = 0;
  std::string reason;
};

struct SimReport {
  std::string policy;
  std::uint64_t seed = 0;
  std::size_t total_tasks = 0;
  std::size_t completed_tasks = 0;
  std::size_t failed_tasks = 0;
  std::optional<SimTime> first_dispatch;
  std::optional<SimTime> last_finish;
  SimTime end_time;
  double makespan = 0.0;  // last finish minus first dispatch
  double runtime = 0.0;   // last finish measured from time zero, startup included
  double throughput = 0.0;
  bool throughput_includes_startup = false;
  std::vector<PilotUsage> pilots;
  std::map<std::string, double> class_busy_seconds;
  std::vector<TaskFailure> failures;
  std::optional<double> scaling_efficiency;
};

/// completed / (last_finish - first_dispatch), or / last_finish when the
/// report counts pilot startup. Throws std::domain_error without completions.
double throughput(const SimReport& report);

/// runtime_1 / (n_nodes * runtime_n).
double scaling_efficiency(double runtime_1, double runtime_n, int n_nodes);

/// Rounds to six significant digits, the precision used for printed metrics.
double round_sig6(double x);

nlohmann::ordered_json report_to_json(const SimReport& report);

}  // namespace qpilot::sim
