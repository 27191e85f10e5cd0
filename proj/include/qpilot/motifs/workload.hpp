#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qpilot/common/resource_class.hpp"

namespace qpilot::motifs {

using TaskId = std::uint32_t;

enum class TaskKind { quantum_circuit, classical_compute, reconstruction, stage_barrier };

// Statevector simulation of an n-qubit circuit; cost grows as 2^n.
struct StatevectorCost {
  int n_qubits = 1;
  friend bool operator==(const StatevectorCost&, const StatevectorCost&) = default;
};

// Execution on quantum hardware; cost follows depth, not width.
struct QpuCost {
  int n_qubits = 1;
  int depth = 1;
  int gates = 1;
  friend bool operator==(const QpuCost&, const QpuCost&) = default;
};

struct FixedCost {
  double seconds = 0.0;
  friend bool operator==(const FixedCost&, const FixedCost&) = default;
};

using CostModel = std::variant<StatevectorCost, QpuCost, FixedCost>;

// Largest statevector width whose 16-byte amplitudes still fit a uint64 byte count.
inline constexpr int kMaxStatevectorQubits = 59;

/// 2^n * 16 bytes for statevector costs, zero otherwise.
std::uint64_t statevector_bytes(const CostModel& cost);

struct TaskSpec {
  TaskId id = 0;
  std::string name;
  TaskKind kind = TaskKind::classical_compute;
  CostModel cost = FixedCost{};
  ResourceClass resource_class = ResourceClass::any;
  std::vector<TaskId> deps;
  std::uint64_t mem_bytes = 0;
  double jitter = 1.0;  // multiplicative cost factor

  friend bool operator==(const TaskSpec&, const TaskSpec&) = default;
};

enum class Motif { circuit_execution, circuit_cutting, pipeline, sequential_vqa };

struct WorkloadSpec {
  Motif motif = Motif::circuit_execution;
  std::vector<TaskSpec> tasks;
  std::map<std::string, std::string> metadata;

  friend bool operator==(const WorkloadSpec&, const WorkloadSpec&) = default;
};

std::string_view to_string(TaskKind kind);
TaskKind parse_task_kind(std::string_view text);
std::string_view to_string(Motif motif);
Motif parse_motif(std::string_view text);

class CycleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Checks that task ids equal their position, dependencies reference existing
// tasks, statevector tasks carry 2^n * 16 bytes and the graph is acyclic.
void validate(const WorkloadSpec& workload);

/// Kahn order, smallest ready id first. Throws CycleError.
std::vector<TaskId> topological_order(const WorkloadSpec& workload);

/// Number of tasks on the longest dependency chain.
std::size_t longest_path(const WorkloadSpec& workload);

std::size_t edge_count(const WorkloadSpec& workload);

}  // namespace qpilot::motifs
