#include "qpilot/motifs/generators.hpp"

#include <stdexcept>
#include <string>

#include "qpilot/common/rng.hpp"

namespace qpilot::motifs {

namespace {

TaskSpec make_task(TaskId id, std::string name, TaskKind kind, CostModel cost,
                   ResourceClass rc) {
  TaskSpec t;
  t.id = id;
  t.name = std::move(name);
  t.kind = kind;
  t.mem_bytes = statevector_bytes(cost);
  t.cost = cost;
  t.resource_class = rc;
  return t;
}

void check_statevector_width(int n) {
  if (n < 1 || n > kMaxStatevectorQubits) {
    throw std::invalid_argument("statevector width " + std::to_string(n) + " outside [1, " +
                                std::to_string(kMaxStatevectorQubits) + "]");
  }
}

}  // namespace

WorkloadSpec gen_circuit_execution(int n_circuits, const QubitRange& qubits,
                                   ResourceClass backend_class,
                                   const CircuitExecutionOptions& options) {
  if (n_circuits < 1) throw std::invalid_argument("circuit execution: need at least one circuit");
  if (qubits.lo < 1 || qubits.hi < qubits.lo || qubits.step < 1) {
    throw std::invalid_argument("circuit execution: empty qubit range");
  }
  if (options.depth < 1) throw std::invalid_argument("circuit execution: depth must be >= 1");
  if (options.fixed_seconds && !(*options.fixed_seconds >= 0.0)) {
    throw std::invalid_argument("circuit execution: fixed cost must be >= 0");
  }
  const int widths = (qubits.hi - qubits.lo) / qubits.step + 1;
  const bool on_hardware = backend_class == ResourceClass::qpu;
  if (!on_hardware && !options.fixed_seconds) check_statevector_width(qubits.hi);

  WorkloadSpec w;
  w.motif = Motif::circuit_execution;
  w.tasks.reserve(static_cast<std::size_t>(n_circuits));
  for (int i = 0; i < n_circuits; ++i) {
    const int n = qubits.lo + (i % widths) * qubits.step;
    CostModel cost;
    if (options.fixed_seconds) {
      cost = FixedCost{*options.fixed_seconds};
    } else if (on_hardware) {
      cost = QpuCost{n, options.depth, options.depth * n};
    } else {
      cost = StatevectorCost{n};
    }
    w.tasks.push_back(make_task(static_cast<TaskId>(i), "circuit-" + std::to_string(i),
                                TaskKind::quantum_circuit, cost, backend_class));
  }
  w.metadata = {{"n_circuits", std::to_string(n_circuits)},
                {"qubit_lo", std::to_string(qubits.lo)},
                {"qubit_hi", std::to_string(qubits.hi)},
                {"qubit_step", std::to_string(qubits.step)},
                {"backend_class", std::string(to_string(backend_class))}};
  return w;
}

WorkloadSpec gen_circuit_cutting(int n, int k, perfmodel::CircuitFamily family,
                                 const CircuitCuttingOptions& options) {
  if (k < 1 || k >= n) {
    throw std::out_of_range("circuit cutting: need 1 <= k < n, got k=" + std::to_string(k) +
                            ", n=" + std::to_string(n));
  }
  if (k > kMaxGeneratedCuts) {
    throw std::out_of_range("circuit cutting: k=" + std::to_string(k) +
                            " would materialize more than 9^" +
                            std::to_string(kMaxGeneratedCuts) + " tasks");
  }
  if (!(options.reconstruction_seconds >= 0.0)) {
    throw std::invalid_argument("circuit cutting: reconstruction cost must be >= 0");
  }
  const int n_sub = perfmodel::derive_n_sub(n, k, family);
  check_statevector_width(n_sub);
  const auto n_tasks = perfmodel::num_subexperiments(k);

  WorkloadSpec w;
  w.motif = Motif::circuit_cutting;
  w.tasks.reserve(n_tasks + 1);
  for (std::uint64_t i = 0; i < n_tasks; ++i) {
    w.tasks.push_back(make_task(static_cast<TaskId>(i), "subexperiment-" + std::to_string(i),
                                TaskKind::quantum_circuit, StatevectorCost{n_sub},
                                options.subexperiment_class));
  }
  auto recon = make_task(static_cast<TaskId>(n_tasks), "reconstruction", TaskKind::reconstruction,
                         FixedCost{options.reconstruction_seconds}, options.reconstruction_class);
  recon.deps.reserve(n_tasks);
  for (std::uint64_t i = 0; i < n_tasks; ++i) recon.deps.push_back(static_cast<TaskId>(i));
  w.tasks.push_back(std::move(recon));
  w.metadata = {{"n", std::to_string(n)},
                {"k", std::to_string(k)},
                {"n_sub", std::to_string(n_sub)},
                {"family", std::string(perfmodel::to_string(family))}};
  return w;
}

WorkloadSpec gen_pipeline(std::span<const StageSpec> stages) {
  if (stages.empty()) throw std::invalid_argument("pipeline: no stages");
  WorkloadSpec w;
  w.motif = Motif::pipeline;
  std::optional<TaskId> barrier;
  std::vector<TaskId> previous;
  for (std::size_t s = 0; s < stages.size(); ++s) {
    const auto& stage = stages[s];
    if (stage.n_tasks < 1) {
      throw std::invalid_argument("pipeline: stage '" + stage.name + "' has no tasks");
    }
    if (const auto* sv = std::get_if<StatevectorCost>(&stage.cost)) {
      check_statevector_width(sv->n_qubits);
    }
    if (s > 0) {
      auto b = make_task(static_cast<TaskId>(w.tasks.size()), "barrier-" + std::to_string(s),
                         TaskKind::stage_barrier, FixedCost{0.0}, ResourceClass::any);
      b.deps = previous;
      barrier = b.id;
      w.tasks.push_back(std::move(b));
    }
    previous.clear();
    const TaskKind kind = std::holds_alternative<FixedCost>(stage.cost) ? TaskKind::classical_compute
                                                                        : TaskKind::quantum_circuit;
    for (int i = 0; i < stage.n_tasks; ++i) {
      const auto id = static_cast<TaskId>(w.tasks.size());
      auto t = make_task(id, stage.name + "-" + std::to_string(i), kind, stage.cost,
                         stage.resource_class);
      if (barrier) t.deps.push_back(*barrier);
      previous.push_back(id);
      w.tasks.push_back(std::move(t));
    }
    w.metadata["stage" + std::to_string(s)] = stage.name + ":" + std::to_string(stage.n_tasks);
  }
  w.metadata["stages"] = std::to_string(stages.size());
  return w;
}

WorkloadSpec gen_sequential_vqa(int iterations, const perfmodel::CircuitSpec& circuit,
                                const VqaOptions& options) {
  if (iterations < 1) throw std::invalid_argument("vqa: need at least one iteration");
  circuit.validate();
  check_statevector_width(circuit.n_qubits);
  if (!(options.classical_seconds >= 0.0)) {
    throw std::invalid_argument("vqa: classical cost must be >= 0");
  }
  WorkloadSpec w;
  w.motif = Motif::sequential_vqa;
  for (int i = 0; i < iterations; ++i) {
    const auto q = static_cast<TaskId>(2 * i);
    auto quantum = make_task(q, "evaluate-" + std::to_string(i), TaskKind::quantum_circuit,
                             StatevectorCost{circuit.n_qubits}, options.quantum_class);
    if (i > 0) quantum.deps.push_back(q - 1);
    auto classical = make_task(q + 1, "optimize-" + std::to_string(i),
                               TaskKind::classical_compute, FixedCost{options.classical_seconds},
                               options.classical_class);
    classical.deps.push_back(q);
    w.tasks.push_back(std::move(quantum));
    w.tasks.push_back(std::move(classical));
  }
  w.metadata = {{"iterations", std::to_string(iterations)},
                {"n_qubits", std::to_string(circuit.n_qubits)},
                {"depth", std::to_string(circuit.depth)}};
  return w;
}

void apply_jitter(WorkloadSpec& workload, double j, std::uint64_t seed) {
  if (!(j >= 0.0 && j < 1.0)) throw std::invalid_argument("jitter must lie in [0, 1)");
  for (auto& t : workload.tasks) {
    if (j == 0.0) {
      t.jitter = 1.0;
      continue;
    }
    Rng rng(mix_seed(seed, t.id));
    t.jitter = rng.uniform(1.0 - j, 1.0 + j);
  }
  if (j > 0.0) {
    workload.metadata["jitter"] = std::to_string(j);
    workload.metadata["jitter_seed"] = std::to_string(seed);
  } else {
    workload.metadata.erase("jitter");
    workload.metadata.erase("jitter_seed");
  }
}

}  // namespace qpilot::motifs
