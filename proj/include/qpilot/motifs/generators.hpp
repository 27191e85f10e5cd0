#pragma once

// Task-graph generators for the execution motifs:
//   B1  independent circuit executions
//   B3  circuit cutting: 9^k subexperiments + one reconstruction
//   C1  multi-stage pipeline separated by barriers
//   C2  sequential variational loop (quantum, classical, quantum, ...)

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "qpilot/motifs/workload.hpp"
#include "qpilot/perfmodel/cost_model.hpp"

namespace qpilot::motifs {

// Inclusive width range visited in `step` increments.
struct QubitRange {
  int lo = 1;
  int hi = 1;
  int step = 1;
};

struct CircuitExecutionOptions {
  int depth = 10;
  // Replace the circuit cost with a fixed duration (zero-compute benchmarks).
  std::optional<double> fixed_seconds;
};

// Widths are cycled through the range in task order. QPU-class tasks get a
// depth-based cost; every other class is simulated.
WorkloadSpec gen_circuit_execution(int n_circuits, const QubitRange& qubits,
                                   ResourceClass backend_class,
                                   const CircuitExecutionOptions& options = {});

// Cutting generation materializes every subexperiment, so k is capped here.
inline constexpr int kMaxGeneratedCuts = 7;

struct CircuitCuttingOptions {
  ResourceClass subexperiment_class = ResourceClass::any;
  ResourceClass reconstruction_class = ResourceClass::any;
  double reconstruction_seconds = 1.0;
};

WorkloadSpec gen_circuit_cutting(int n, int k, perfmodel::CircuitFamily family,
                                 const CircuitCuttingOptions& options = {});

struct StageSpec {
  std::string name;
  int n_tasks = 1;
  ResourceClass resource_class = ResourceClass::any;
  CostModel cost = FixedCost{};
};

WorkloadSpec gen_pipeline(std::span<const StageSpec> stages);

struct VqaOptions {
  double classical_seconds = 1.0;
  ResourceClass quantum_class = ResourceClass::any;
  ResourceClass classical_class = ResourceClass::any;
};

WorkloadSpec gen_sequential_vqa(int iterations, const perfmodel::CircuitSpec& circuit,
                                const VqaOptions& options = {});

// Draws each task's jitter factor uniformly from [1 - j, 1 + j]; the draw for
// a task depends only on (seed, task id). j = 0 resets all factors to 1.
void apply_jitter(WorkloadSpec& workload, double j, std::uint64_t seed);

}  // namespace qpilot::motifs
