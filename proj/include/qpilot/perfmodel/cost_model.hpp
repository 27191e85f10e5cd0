#pragma once

// Analytical cost and speedup model for circuit cutting.
//
// Full statevector simulation of an n-qubit circuit costs 2^n. Cutting the
// circuit with k wire cuts produces 9^k subexperiments of width n_sub, which
// W workers execute in R = ceil(9^k / W) rounds. Parallel efficiency decays
// with the number of rounds as eta(R) = eta_max / R^p, so
//
//   cut cost = 2^n_sub * R / eta(R)
//   speedup  = 2^(n - n_sub) * eta(R) / R
//
// Constant factors are omitted; calibration absorbs them into (eta_max, p).

#include <cstdint>
#include <string>
#include <string_view>

namespace qpilot::perfmodel {

inline constexpr int kDefaultMaxCuts = 5;
inline constexpr int kHardMaxCuts = 12;
inline constexpr std::uint64_t kBytesPerAmplitude = 16;

enum class CircuitFamily { linear, generic };
enum class BackendKind { cpu, gpu };

std::string_view to_string(CircuitFamily family);
CircuitFamily parse_circuit_family(std::string_view text);
std::string_view to_string(BackendKind kind);
BackendKind parse_backend_kind(std::string_view text);

struct CircuitSpec {
  int n_qubits = 1;
  int depth = 1;
  CircuitFamily family = CircuitFamily::linear;

  void validate() const;
};

// A calibrated execution backend.
struct ResourceProfile {
  BackendKind kind = BackendKind::cpu;
  std::uint64_t workers = 1;
  std::uint64_t mem_per_worker_bytes = 1;
  double eta_max = 1.0;
  double p = 0.0;
  std::string label;
  double residual = 0.0;

  void validate() const;
};

// A cutting configuration. Construct through make() or derived(); both
// enforce 1 <= n_sub <= n, k = 0 <=> (n_sub = n, one task), k >= 1 => 9^k tasks.
class CutPlan {
 public:
  static CutPlan make(int n, int k, int n_sub);
  static CutPlan derived(int n, int k, CircuitFamily family);

  int n() const { return n_; }
  int k() const { return k_; }
  int n_sub() const { return n_sub_; }
  std::uint64_t n_tasks() const { return n_tasks_; }

  friend bool operator==(const CutPlan&, const CutPlan&) = default;

 private:
  CutPlan(int n, int k, int n_sub, std::uint64_t n_tasks)
      : n_(n), k_(k), n_sub_(n_sub), n_tasks_(n_tasks) {}

  int n_;
  int k_;
  int n_sub_;
  std::uint64_t n_tasks_;
};

/// 2^n as a double.
double full_cost(int n);

/// 9^k. Throws std::out_of_range when k < 0 or k > k_max (k_max <= 12).
std::uint64_t num_subexperiments(int k, int k_max = kHardMaxCuts);

/// ceil(9^k / workers).
std::uint64_t rounds(std::uint64_t workers, int k);

/// eta_max / rounds^p, clamped to (0, 1].
double efficiency(std::uint64_t rounds, const ResourceProfile& profile);

/// Cutting cost for k >= 1. Throws std::invalid_argument for k = 0.
double cut_cost(const CutPlan& plan, const ResourceProfile& profile);

/// Predicted speedup of cutting over full simulation for k >= 1.
double speedup(const CutPlan& plan, const ResourceProfile& profile);

// Width of the widest fragment left after k cuts. For linear entanglement
// k cuts leave k+1 fragments, hence ceil(n / (k+1)).
int derive_n_sub(int n, int k, CircuitFamily family);

/// True iff the 2^n-amplitude statevector fits in one worker's memory.
bool memory_feasible(int n, const ResourceProfile& profile);

struct CutRecommendation {
  int k_star = 0;
  int n_sub_star = 1;
  double predicted_speedup = 1.0;
  bool feasible = true;  // full simulation fits in memory
  std::string reason;
};

CutRecommendation recommend_cuts(const CircuitSpec& circuit, const ResourceProfile& profile,
                                 int k_max = kDefaultMaxCuts);

/// Idealised wall time for n_tasks equal tasks spread over n_qpus devices.
double project_parallel_qpu_time(double mean_task_runtime, std::uint64_t n_tasks,
                                 std::uint64_t n_qpus, double dispatch_overhead);

}  // namespace qpilot::perfmodel
