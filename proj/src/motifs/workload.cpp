#include "qpilot/motifs/workload.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>
#include <string>

namespace qpilot::motifs {

std::uint64_t statevector_bytes(const CostModel& cost) {
  if (const auto* sv = std::get_if<StatevectorCost>(&cost)) {
    return (std::uint64_t{1} << sv->n_qubits) * 16;
  }
  return 0;
}

std::string_view to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::quantum_circuit: return "quantum_circuit";
    case TaskKind::classical_compute: return "classical_compute";
    case TaskKind::reconstruction: return "reconstruction";
    case TaskKind::stage_barrier: return "stage_barrier";
  }
  return "?";
}

TaskKind parse_task_kind(std::string_view text) {
  if (text == "quantum_circuit") return TaskKind::quantum_circuit;
  if (text == "classical_compute") return TaskKind::classical_compute;
  if (text == "reconstruction") return TaskKind::reconstruction;
  if (text == "stage_barrier") return TaskKind::stage_barrier;
  throw std::invalid_argument("unknown task kind '" + std::string(text) + "'");
}

std::string_view to_string(Motif motif) {
  switch (motif) {
    case Motif::circuit_execution: return "B1_circuit_execution";
    case Motif::circuit_cutting: return "B3_circuit_cutting";
    case Motif::pipeline: return "C1_pipeline";
    case Motif::sequential_vqa: return "C2_sequential_vqa";
  }
  return "?";
}

Motif parse_motif(std::string_view text) {
  if (text == "B1_circuit_execution") return Motif::circuit_execution;
  if (text == "B3_circuit_cutting") return Motif::circuit_cutting;
  if (text == "C1_pipeline") return Motif::pipeline;
  if (text == "C2_sequential_vqa") return Motif::sequential_vqa;
  throw std::invalid_argument("unknown motif '" + std::string(text) + "'");
}

void validate(const WorkloadSpec& workload) {
  const auto n = workload.tasks.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& t = workload.tasks[i];
    const std::string where = "task " + std::to_string(i);
    if (t.id != i) throw std::invalid_argument(where + ": id " + std::to_string(t.id) + " out of place");
    for (const auto d : t.deps) {
      if (d >= n) throw std::invalid_argument(where + ": unknown dependency " + std::to_string(d));
      if (d == t.id) throw CycleError(where + ": depends on itself");
    }
    if (const auto* sv = std::get_if<StatevectorCost>(&t.cost)) {
      if (sv->n_qubits < 1 || sv->n_qubits > kMaxStatevectorQubits) {
        throw std::invalid_argument(where + ": statevector width out of range");
      }
      if (t.mem_bytes != statevector_bytes(t.cost)) {
        throw std::invalid_argument(where + ": statevector task must carry 2^n * 16 bytes");
      }
    }
    if (const auto* q = std::get_if<QpuCost>(&t.cost)) {
      if (q->n_qubits < 1 || q->depth < 1 || q->gates < 0) {
        throw std::invalid_argument(where + ": invalid QPU cost");
      }
    }
    if (const auto* f = std::get_if<FixedCost>(&t.cost)) {
      if (!(f->seconds >= 0.0)) throw std::invalid_argument(where + ": negative fixed cost");
    }
    if (!(t.jitter > 0.0)) throw std::invalid_argument(where + ": jitter factor must be positive");
  }
  (void)topological_order(workload);
}

std::vector<TaskId> topological_order(const WorkloadSpec& workload) {
  const auto n = workload.tasks.size();
  std::vector<std::size_t> indegree(n, 0);
  std::vector<std::vector<TaskId>> dependents(n);
  for (const auto& t : workload.tasks) {
    for (const auto d : t.deps) {
      if (d >= n) throw std::invalid_argument("unknown dependency " + std::to_string(d));
      dependents[d].push_back(t.id);
      ++indegree[t.id];
    }
  }
  std::priority_queue<TaskId, std::vector<TaskId>, std::greater<>> ready;
  for (TaskId i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.push(i);
  }
  std::vector<TaskId> order;
  order.reserve(n);
  while (!ready.empty()) {
    const TaskId t = ready.top();
    ready.pop();
    order.push_back(t);
    for (const auto s : dependents[t]) {
      if (--indegree[s] == 0) ready.push(s);
    }
  }
  if (order.size() != n) {
    throw CycleError("workload contains a dependency cycle (" +
                     std::to_string(n - order.size()) + " tasks unreachable)");
  }
  return order;
}

std::size_t longest_path(const WorkloadSpec& workload) {
  const auto order = topological_order(workload);
  std::vector<std::size_t> depth(workload.tasks.size(), 1);
  std::size_t best = 0;
  for (const auto id : order) {
    for (const auto d : workload.tasks[id].deps) depth[id] = std::max(depth[id], depth[d] + 1);
    best = std::max(best, depth[id]);
  }
  return best;
}

std::size_t edge_count(const WorkloadSpec& workload) {
  std::size_t edges = 0;
  for (const auto& t : workload.tasks) edges += t.deps.size();
  return edges;
}

}  // namespace qpilot::motifs
