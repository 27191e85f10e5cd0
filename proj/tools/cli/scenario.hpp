#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qpilot/motifs/workload.hpp"
#include "qpilot/perfmodel/cost_model.hpp"
#include "qpilot/pilot/manager.hpp"
#include "qpilot/pilot/pilot.hpp"
#include "qpilot/sim/engine.hpp"

namespace qpilot::cli {

// Invalid scenario content. Messages name the offending field path, e.g.
// "pilots[1].slots: expected an integer".
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct WorkloadConfig {
  std::optional<motifs::Motif> motif;      // generated workloads
  nlohmann::json params;                   // generator parameters, validated on load
  std::optional<std::filesystem::path> file;  // or a workload document
  double jitter = 0.0;
};

enum class SweepAxis { workers, nodes, cuts, tasks };

std::string_view to_string(SweepAxis axis);
SweepAxis parse_sweep_axis(std::string_view text);

struct SweepConfig {
  std::optional<SweepAxis> axis;
  std::vector<double> values;
  double stagger_seconds = 0.0;  // nodes axis: extra startup per additional node
  std::vector<perfmodel::ResourceProfile> profiles;  // cuts axis
  int n = 36;                                          // cuts axis
  perfmodel::CircuitFamily family = perfmodel::CircuitFamily::linear;
};

struct Scenario {
  std::string name;
  std::uint64_t seed = 0;
  pilot::SchedulingPolicy policy = pilot::SchedulingPolicy::least_loaded;
  WorkloadConfig workload;
  std::vector<pilot::PilotDescription> pilots;
  sim::SimOptions sim;
  std::string report_path = "report.json";
  std::string trace_path = "trace.csv";
  SweepConfig sweep;
  std::filesystem::path base_dir;  // relative file references resolve here
};

// Parses a scenario document. Unknown keys anywhere are rejected. JSON syntax
// errors carry the line and column reported by the parser.
Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& file);

// Builds the workload; `task_count` overrides the per-motif size knob
// (circuits for B1, tasks per stage for pipelines, iterations for VQA).
motifs::WorkloadSpec build_workload(const Scenario& scenario,
                                    std::optional<int> task_count = std::nullopt);

}  // namespace qpilot::cli
