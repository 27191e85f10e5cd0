#include "qpilot/perfmodel/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qpilot::perfmodel {

namespace {

// Relative tolerance under which two predicted speedups count as a tie.
constexpr double kTieTolerance = 1e-12;

bool strictly_better(double candidate, double incumbent) {
  return candidate > incumbent * (1.0 + kTieTolerance);
}

}  // namespace

std::string_view to_string(CircuitFamily family) {
  return family == CircuitFamily::linear ? "linear" : "generic";
}

CircuitFamily parse_circuit_family(std::string_view text) {
  if (text == "linear" || text == "efficient_su2" || text == "EfficientSU2") {
    return CircuitFamily::linear;
  }
  if (text == "generic") return CircuitFamily::generic;
  throw std::invalid_argument("unknown circuit family '" + std::string(text) + "'");
}

std::string_view to_string(BackendKind kind) { return kind == BackendKind::cpu ? "CPU" : "GPU"; }

BackendKind parse_backend_kind(std::string_view text) {
  if (text == "CPU" || text == "cpu") return BackendKind::cpu;
  if (text == "GPU" || text == "gpu") return BackendKind::gpu;
  throw std::invalid_argument("unknown backend kind '" + std::string(text) + "'");
}

void CircuitSpec::validate() const {
  if (n_qubits < 1) throw std::invalid_argument("circuit needs at least one qubit");
  if (depth < 1) throw std::invalid_argument("circuit depth must be at least one");
}

void ResourceProfile::validate() const {
  if (workers < 1) throw std::invalid_argument("profile needs at least one worker");
  if (mem_per_worker_bytes < 1) throw std::invalid_argument("profile memory must be positive");
  if (!(eta_max > 0.0 && eta_max <= 1.0)) {
    throw std::invalid_argument("eta_max must lie in (0, 1]");
  }
  if (!(p >= 0.0) || !std::isfinite(p)) throw std::invalid_argument("p must be >= 0");
}

CutPlan CutPlan::make(int n, int k, int n_sub) {
  if (n < 1) throw std::invalid_argument("cut plan: n must be >= 1");
  if (k < 0) throw std::invalid_argument("cut plan: k must be >= 0");
  if (n_sub < 1 || n_sub > n) throw std::invalid_argument("cut plan: need 1 <= n_sub <= n");
  if (k == 0) {
    if (n_sub != n) throw std::invalid_argument("cut plan: k = 0 requires n_sub = n");
    return CutPlan(n, 0, n, 1);
  }
  return CutPlan(n, k, n_sub, num_subexperiments(k));
}

CutPlan CutPlan::derived(int n, int k, CircuitFamily family) {
  if (k == 0) return make(n, 0, n);
  return make(n, k, derive_n_sub(n, k, family));
}

double full_cost(int n) {
  if (n < 1) throw std::invalid_argument("full_cost: n must be >= 1");
  return std::exp2(static_cast<double>(n));
}

std::uint64_t num_subexperiments(int k, int k_max) {
  if (k_max > kHardMaxCuts) k_max = kHardMaxCuts;
  if (k < 0 || k > k_max) {
    throw std::out_of_range("cut count " + std::to_string(k) + " outside [0, " +
                            std::to_string(k_max) + "]");
  }
  std::uint64_t tasks = 1;
  for (int i = 0; i < k; ++i) tasks *= 9;
  return tasks;
}

std::uint64_t rounds(std::uint64_t workers, int k) {
  if (workers < 1) throw std::invalid_argument("rounds: workers must be >= 1");
  const std::uint64_t tasks = num_subexperiments(k);
  return (tasks + workers - 1) / workers;
}

double efficiency(std::uint64_t rounds, const ResourceProfile& profile) {
  if (rounds < 1) throw std::invalid_argument("efficiency: rounds must be >= 1");
  const double eta = profile.eta_max / std::pow(static_cast<double>(rounds), profile.p);
  return std::clamp(eta, std::numeric_limits<double>::min(), 1.0);
}

double cut_cost(const CutPlan& plan, const ResourceProfile& profile) {
  if (plan.k() < 1) {
    throw std::invalid_argument("cut_cost: k = 0 is full simulation, use full_cost");
  }
  const std::uint64_t r = rounds(profile.workers, plan.k());
  return std::exp2(static_cast<double>(plan.n_sub())) * static_cast<double>(r) /
         efficiency(r, profile);
}

double speedup(const CutPlan& plan, const ResourceProfile& profile) {
  if (plan.k() < 1) {
    throw std::invalid_argument("speedup: defined for k >= 1 only");
  }
  const std::uint64_t r = rounds(profile.workers, plan.k());
  return std::exp2(static_cast<double>(plan.n() - plan.n_sub())) * efficiency(r, profile) /
         static_cast<double>(r);
}

int derive_n_sub(int n, int k, CircuitFamily family) {
  if (k < 1) throw std::invalid_argument("derive_n_sub: k must be >= 1");
  if (k >= n) {
    throw std::invalid_argument("derive_n_sub: " + std::to_string(k) + " cuts on " +
                                std::to_string(n) + " qubits");
  }
  // No structural information is available for generic circuits, so the
  // linear-chain partition bound is used for them as well.
  (void)family;
  return (n + k) / (k + 1);
}

bool memory_feasible(int n, const ResourceProfile& profile) {
  if (n < 1) throw std::invalid_argument("memory_feasible: n must be >= 1");
  const double bytes = std::exp2(static_cast<double>(n)) * static_cast<double>(kBytesPerAmplitude);
  return bytes <= static_cast<double>(profile.mem_per_worker_bytes);
}

CutRecommendation recommend_cuts(const CircuitSpec& circuit, const ResourceProfile& profile,
                                 int k_max) {
  circuit.validate();
  profile.validate();
  if (k_max < 1 || k_max > kHardMaxCuts) {
    throw std::invalid_argument("recommend_cuts: k_max must lie in [1, 12]");
  }
  const int n = circuit.n_qubits;
  CutRecommendation rec;
  rec.feasible = memory_feasible(n, profile);

  // A circuit of n qubits admits at most n-1 cuts.
  const int k_limit = std::min(k_max, n - 1);
  int best_k = 0;
  int best_n_sub = n;
  double best_speedup = 0.0;
  for (int k = 1; k <= k_limit; ++k) {
    const int n_sub = derive_n_sub(n, k, circuit.family);
    if (!memory_feasible(n_sub, profile)) continue;
    const double s = speedup(CutPlan::make(n, k, n_sub), profile);
    if (best_k == 0 || strictly_better(s, best_speedup)) {
      best_k = k;
      best_n_sub = n_sub;
      best_speedup = s;
    }
  }

  if (rec.feasible && (best_k == 0 || best_speedup <= 1.0)) {
    rec.k_star = 0;
    rec.n_sub_star = n;
    rec.predicted_speedup = 1.0;
    rec.reason = best_k == 0 ? "fits in memory; no cut configuration available"
                             : "fits in memory; no cut count beats direct simulation";
    return rec;
  }
  if (best_k == 0) {
    throw std::runtime_error("recommend_cuts: " + std::to_string(n) +
                             "-qubit circuit exceeds memory and no cut count up to " +
                             std::to_string(k_limit) + " yields a fitting subcircuit");
  }
  rec.k_star = best_k;
  rec.n_sub_star = best_n_sub;
  rec.predicted_speedup = best_speedup;
  rec.reason = rec.feasible ? "fits in memory; cutting predicted faster"
                            : "exceeds memory; cutting required";
  return rec;
}

double project_parallel_qpu_time(double mean_task_runtime, std::uint64_t n_tasks,
                                 std::uint64_t n_qpus, double dispatch_overhead) {
  if (!(mean_task_runtime > 0.0) || n_tasks < 1 || n_qpus < 1 || !(dispatch_overhead >= 0.0)) {
    throw std::invalid_argument("project_parallel_qpu_time: inputs must be positive");
  }
  const std::uint64_t waves = (n_tasks + n_qpus - 1) / n_qpus;
  return mean_task_runtime * static_cast<double>(waves) + dispatch_overhead;
}

}  // namespace qpilot::perfmodel
