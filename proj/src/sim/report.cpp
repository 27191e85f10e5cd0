#include "qpilot/sim/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace qpilot::sim {

double throughput(const SimReport& report) {
  if (report.completed_tasks == 0 || !report.last_finish) {
    throw std::domain_error("throughput is undefined without completed tasks");
  }
  const SimTime from = report.throughput_includes_startup || !report.first_dispatch
                           ? SimTime{}
                           : *report.first_dispatch;
  const double window = (*report.last_finish - from).seconds();
  if (window <= 0.0) throw std::domain_error("throughput window is empty");
  return static_cast<double>(report.completed_tasks) / window;
}

double scaling_efficiency(double runtime_1, double runtime_n, int n_nodes) {
  if (!(runtime_1 > 0.0) || !(runtime_n > 0.0) || n_nodes < 1) {
    throw std::invalid_argument("scaling efficiency needs positive runtimes and node count");
  }
  return runtime_1 / (static_cast<double>(n_nodes) * runtime_n);
}

double round_sig6(double x) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return std::strtod(buf, nullptr);
}

nlohmann::ordered_json report_to_json(const SimReport& r) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["policy"] = r.policy;
  j["seed"] = r.seed;
  j["total_tasks"] = r.total_tasks;
  j["completed_tasks"] = r.completed_tasks;
  j["failed_tasks"] = r.failed_tasks;
  j["makespan_s"] = round_sig6(r.makespan);
  j["runtime_s"] = round_sig6(r.runtime);
  j["throughput_tasks_per_s"] = round_sig6(r.throughput);
  j["throughput_includes_startup"] = r.throughput_includes_startup;
  j["first_dispatch_s"] =
      r.first_dispatch ? ordered_json(round_sig6(r.first_dispatch->seconds())) : ordered_json();
  j["last_finish_s"] =
      r.last_finish ? ordered_json(round_sig6(r.last_finish->seconds())) : ordered_json();
  j["end_time_s"] = round_sig6(r.end_time.seconds());
  ordered_json pilots = ordered_json::array();
  for (const auto& p : r.pilots) {
    pilots.push_back({{"id", p.id},
                      {"name", p.name},
                      {"resource_class", p.resource_class},
                      {"slots", p.slots},
                      {"busy_s", round_sig6(p.busy_seconds)},
                      {"active_s", round_sig6(p.active_seconds)},
                      {"utilization", round_sig6(p.utilization)}});
  }
  j["pilots"] = std::move(pilots);
  ordered_json classes = ordered_json::object();
  for (const auto& [name, busy] : r.class_busy_seconds) classes[name] = round_sig6(busy);
  j["class_busy_s"] = std::move(classes);
  ordered_json failures = ordered_json::array();
  for (const auto& f : r.failures) failures.push_back({{"task", f.task}, {"reason", f.reason}});
  j["failures"] = std::move(failures);
  if (r.scaling_efficiency) j["scaling_efficiency"] = round_sig6(*r.scaling_efficiency);
  return j;
}

}  // namespace qpilot::sim
