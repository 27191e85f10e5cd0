#pragma once

// Optimal-cut selection accuracy: how often the calibrated model picks the
// cut count that was empirically fastest for a configuration.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qpilot/perfmodel/calibration.hpp"
#include "qpilot/perfmodel/cost_model.hpp"

namespace qpilot::perfmodel {

// One timed cutting run.
struct Measurement {
  BackendKind kind = BackendKind::cpu;
  std::string device;
  int n = 1;
  int n_sub = 1;
  int k = 1;
  std::uint64_t workers = 1;
  double speedup = 1.0;

  CalibrationSample sample() const { return {n, n_sub, k, workers, speedup}; }
};

// A configuration with its ground-truth best cut count.
struct LabeledCase {
  BackendKind kind = BackendKind::cpu;
  int n = 1;
  std::uint64_t workers = 1;
  int k_opt = 0;
};

/// Fraction of cases where recommend_cuts(profile with the case's workers) == k_opt.
double cut_selection_accuracy(const ResourceProfile& model, std::span<const LabeledCase> cases,
                              int k_max = kDefaultMaxCuts,
                              CircuitFamily family = CircuitFamily::linear);

// Labels every measurement with the best k observed for its configuration
// (kind, device, n, workers); ties go to the smaller k.
std::vector<LabeledCase> label_measurements(std::span<const Measurement> rows);

// Seeded split stratified by (kind, n). Returns row indices; each stratum
// contributes round(train_fraction * size) rows to the training part.
struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};
Split stratified_split(std::span<const Measurement> rows, double train_fraction,
                       std::uint64_t seed);

struct EvaluationOptions {
  int k_max = kDefaultMaxCuts;
  CircuitFamily family = CircuitFamily::linear;
  std::uint64_t gpu_mem_per_worker_bytes = 192ULL << 30;
  std::uint64_t cpu_mem_per_worker_bytes = 2ULL << 30;
};

// General model trained on all kinds; device-specific models on one kind.
struct AccuracyReport {
  double train_fraction = 0.0;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  CalibrationResult general_fit;
  std::optional<double> general_all;
  std::optional<double> general_gpu;
  std::optional<double> general_cpu;
  std::optional<double> specific_gpu;
  std::optional<double> specific_cpu;
};

AccuracyReport evaluate_split(std::span<const Measurement> rows, double train_fraction,
                              std::uint64_t seed, const EvaluationOptions& options = {});

// Evaluation file formats, selected by header:
//   measurements: kind,device,n,n_sub,k,workers,speedup
//   cases:        kind,n,workers,k_opt
struct EvaluationInput {
  std::vector<Measurement> measurements;  // empty for the case format
  std::vector<LabeledCase> cases;
};
EvaluationInput read_evaluation_csv(std::istream& in);
void write_measurements_csv(std::ostream& out, std::span<const Measurement> rows);

}  // namespace qpilot::perfmodel
