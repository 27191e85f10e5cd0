#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpilot/perfmodel/cost_model.hpp"

namespace qpilot::perfmodel {

struct CalibrationSample {
  int n = 1;
  int n_sub = 1;
  int k = 1;
  std::uint64_t workers = 1;
  double measured_speedup = 1.0;

  void validate() const;
};

struct CalibrationResult {
  double eta_max = 1.0;
  double p = 0.0;
  double residual = 0.0;  // RMS of log-efficiency residuals at the returned parameters
  std::size_t clamped_count = 0;
  std::size_t sample_count = 0;
};

class CalibrationError : public std::runtime_error {
 public:
  enum class Code { insufficient_samples, degenerate_design, invalid_sample };

  CalibrationError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

// Fits eta(R) = eta_max / R^p to measured speedups.
//
// Each sample implies an efficiency eta_i = S_i * R_i / 2^(n_i - n_sub_i);
// values above one are clamped to one and counted. The fit is ordinary least
// squares of log eta_i on log R_i. Needs two or more samples spanning at least
// two distinct round counts.
CalibrationResult calibrate(std::span<const CalibrationSample> samples);

/// Implied efficiency of one sample before clamping.
double implied_efficiency(const CalibrationSample& sample);

// CSV with header `n,n_sub,k,workers,speedup`. Malformed rows raise
// std::runtime_error naming the 1-based line number.
std::vector<CalibrationSample> read_samples_csv(std::istream& in);
void write_samples_csv(std::ostream& out, std::span<const CalibrationSample> samples);

// Profile document: {kind, workers, mem_per_worker_bytes, eta_max, p, label,
// residual} plus optional calibration bookkeeping (clamped_count, sample_count).
std::string profile_to_json(const ResourceProfile& profile, const CalibrationResult* fit = nullptr);
ResourceProfile profile_from_json(const std::string& text);

}  // namespace qpilot::perfmodel
