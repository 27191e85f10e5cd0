#include <doctest.h>

#include <cmath>
#include <sstream>

#include "../support/oracle.hpp"
#include "qpilot/perfmodel/calibration.hpp"

using namespace qpilot::perfmodel;

TEST_CASE("noiseless round trip recovers the parameters") {
  // (k, W) pairs giving R = 2, 4, 8, 16.
  std::vector<CalibrationSample> samples;
  for (const auto& [k, w] : {std::pair<int, std::uint64_t>{1, 5}, {2, 21}, {2, 11}, {3, 46}}) {
    const int ns = oracle::n_sub_linear(30, k);
    const double s = static_cast<double>(oracle::speedup(30, k, ns, w, 0.8, 0.3));
    samples.push_back({30, ns, k, w, s});
  }
  const auto fit = calibrate(samples);
  CHECK(std::abs(fit.eta_max - 0.8) < 1e-9);
  CHECK(std::abs(fit.p - 0.3) < 1e-9);
  CHECK(fit.residual < 1e-9);
  CHECK(fit.clamped_count == 0);
  CHECK(fit.sample_count == 4);
}

TEST_CASE("implied efficiency") {
  const CalibrationSample s{36, 12, 2, 8, 1000.0};
  CHECK(implied_efficiency(s) == doctest::Approx(1000.0 * 11 / std::ldexp(1.0, 24)).epsilon(1e-14));
}

TEST_CASE("calibration errors") {
  std::vector<CalibrationSample> one{{30, 15, 1, 1, 100.0}};
  try {
    (void)calibrate(one);
    FAIL("expected an error");
  } catch (const CalibrationError& e) {
    CHECK(e.code() == CalibrationError::Code::insufficient_samples);
  }
  std::vector<CalibrationSample> flat{{30, 15, 1, 9, 100.0}, {30, 15, 1, 10, 90.0}, {32, 16, 1, 20, 80.0}};
  try {
    (void)calibrate(flat);
    FAIL("expected an error");
  } catch (const CalibrationError& e) {
    CHECK(e.code() == CalibrationError::Code::degenerate_design);
  }
  std::vector<CalibrationSample> bad{{30, 15, 1, 1, -1.0}, {30, 15, 1, 2, 1.0}};
  CHECK_THROWS_AS(calibrate(bad), CalibrationError);
  std::vector<CalibrationSample> k0{{30, 30, 0, 1, 1.0}, {30, 15, 1, 2, 1.0}};
  CHECK_THROWS_AS(calibrate(k0), CalibrationError);
}

TEST_CASE("over-unity efficiencies are clamped and counted") {
  auto samples = oracle::model_samples(30, {1, 4}, 0.7, 0.4);
  // Make one sample imply eta = 2.
  auto& s = samples[3];
  const auto r = oracle::ceil_div(oracle::pow9(s.k), s.workers);
  s.measured_speedup = 2.0 * std::ldexp(1.0, s.n - s.n_sub) / static_cast<double>(r);
  const auto fit = calibrate(samples);
  CHECK(fit.clamped_count == 1);
  CHECK(fit.eta_max <= 1.0);
  CHECK(fit.p >= 0.0);
}

TEST_CASE("fitted parameters are clamped to the valid domain") {
  // Efficiency that grows with R implies a negative decay; p is clamped to 0.
  std::vector<CalibrationSample> samples;
  for (std::uint64_t w : {9, 3, 1}) {
    const auto r = oracle::ceil_div(9, w);
    const double eta = 0.1 * static_cast<double>(r);
    samples.push_back({20, 10, 1, w, eta * std::ldexp(1.0, 10) / static_cast<double>(r)});
  }
  const auto fit = calibrate(samples);
  CHECK(fit.p == 0.0);
  CHECK(fit.eta_max <= 1.0);
  CHECK(fit.residual > 0.0);
}

TEST_CASE("noisy fits stay close") {
  oracle::Gauss g(3);
  int good = 0;
  for (int t = 0; t < 100; ++t) {
    const auto samples = oracle::model_samples(34, {1, 2, 4, 8, 16, 32}, 0.75, 0.5, 0.05, &g);
    const auto fit = calibrate(samples);
    if (std::abs(fit.eta_max - 0.75) <= 0.05 && std::abs(fit.p - 0.5) <= 0.05) ++good;
  }
  CHECK(good >= 95);
}

TEST_CASE("sample CSV round trip and errors") {
  const auto samples = oracle::model_samples(34, {2, 8}, 0.6, 0.2);
  std::stringstream ss;
  write_samples_csv(ss, samples);
  const auto back = read_samples_csv(ss);
  REQUIRE(back.size() == samples.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].measured_speedup == samples[i].measured_speedup);
    CHECK(back[i].workers == samples[i].workers);
  }
  std::stringstream bad_header("n,k,workers\n1,2,3\n");
  CHECK_THROWS(read_samples_csv(bad_header));
  std::stringstream bad_row("n,n_sub,k,workers,speedup\n30,15,1,2,10\n30,15,x,2,10\n");
  try {
    (void)read_samples_csv(bad_row);
    FAIL("expected an error");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("profile JSON round trip") {
  ResourceProfile p;
  p.kind = BackendKind::gpu;
  p.workers = 8;
  p.mem_per_worker_bytes = 192ULL << 30;
  p.eta_max = 0.81;
  p.p = 0.57;
  p.label = "gpu";
  p.residual = 0.01;
  CalibrationResult fit;
  fit.clamped_count = 2;
  fit.sample_count = 40;
  const auto text = profile_to_json(p, &fit);
  CHECK(text.find("\"clamped_count\": 2") != std::string::npos);
  const auto back = profile_from_json(text);
  CHECK(back.workers == 8);
  CHECK(back.eta_max == 0.81);
  CHECK(back.label == "gpu");
  CHECK_THROWS(profile_from_json(R"({"kind":"gpu","workers":8,"mem_per_worker_bytes":1,"eta_max":0.5,"p":0.1,"bogus":1})"));
  CHECK_THROWS(profile_from_json(R"({"kind":"gpu","workers":8,"mem_per_worker_bytes":1,"eta_max":1.5,"p":0.1})"));
}
