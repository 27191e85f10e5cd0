#include "qpilot/perfmodel/calibration.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace qpilot::perfmodel {

using nlohmann::json;

void CalibrationSample::validate() const {
  if (n < 1 || n_sub < 1 || n_sub > n) {
    throw CalibrationError(CalibrationError::Code::invalid_sample,
                           "sample needs 1 <= n_sub <= n");
  }
  if (k < 1) {
    throw CalibrationError(CalibrationError::Code::invalid_sample,
                           "sample needs k >= 1; the speedup model is undefined without cuts");
  }
  if (k > kHardMaxCuts) {
    throw CalibrationError(CalibrationError::Code::invalid_sample, "sample cut count above 12");
  }
  if (workers < 1) {
    throw CalibrationError(CalibrationError::Code::invalid_sample, "sample needs workers >= 1");
  }
  if (!(measured_speedup > 0.0) || !std::isfinite(measured_speedup)) {
    throw CalibrationError(CalibrationError::Code::invalid_sample,
                           "sample speedup must be positive and finite");
  }
}

double implied_efficiency(const CalibrationSample& sample) {
  sample.validate();
  const auto r = static_cast<double>(rounds(sample.workers, sample.k));
  return sample.measured_speedup * r / std::exp2(static_cast<double>(sample.n - sample.n_sub));
}

CalibrationResult calibrate(std::span<const CalibrationSample> samples) {
  if (samples.size() < 2) {
    throw CalibrationError(CalibrationError::Code::insufficient_samples,
                           "calibration needs at least 2 samples, got " +
                               std::to_string(samples.size()));
  }

  CalibrationResult result;
  result.sample_count = samples.size();
  std::vector<double> log_r;
  std::vector<double> log_eta;
  std::set<std::uint64_t> distinct_rounds;
  log_r.reserve(samples.size());
  log_eta.reserve(samples.size());

  for (const auto& s : samples) {
    double eta = implied_efficiency(s);
    if (eta > 1.0) {
      eta = 1.0;
      ++result.clamped_count;
    }
    const std::uint64_t r = rounds(s.workers, s.k);
    distinct_rounds.insert(r);
    log_r.push_back(std::log(static_cast<double>(r)));
    log_eta.push_back(std::log(eta));
  }
  if (distinct_rounds.size() < 2) {
    throw CalibrationError(CalibrationError::Code::degenerate_design,
                           "all samples share one round count; the decay exponent is "
                           "unidentifiable");
  }

  const auto count = static_cast<double>(samples.size());
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (std::size_t i = 0; i < log_r.size(); ++i) {
    mean_x += log_r[i];
    mean_y += log_eta[i];
  }
  mean_x /= count;
  mean_y /= count;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < log_r.size(); ++i) {
    const double dx = log_r[i] - mean_x;
    sxx += dx * dx;
    sxy += dx * (log_eta[i] - mean_y);
  }
  const double slope = sxy / sxx;
  const double intercept = mean_y - slope * mean_x;

  result.eta_max = std::min(std::exp(intercept), 1.0);
  result.p = std::max(-slope, 0.0);

  const double log_eta_max = std::log(result.eta_max);
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < log_r.size(); ++i) {
    const double e = log_eta[i] - (log_eta_max - result.p * log_r[i]);
    sum_sq += e * e;
  }
  result.residual = std::sqrt(sum_sq / count);
  return result;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

template <typename T>
T parse_number(const std::string& text, std::size_t line_no, const char* column) {
  const std::string t = trim(text);
  std::istringstream ss(t);
  T value{};
  ss >> value;
  if (t.empty() || ss.fail() || !ss.eof()) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": column '" + column +
                             "': cannot parse '" + t + "'");
  }
  return value;
}

}  // namespace

std::vector<CalibrationSample> read_samples_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<CalibrationSample> samples;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    if (!header_seen) {
      if (trim(line) != "n,n_sub,k,workers,speedup") {
        throw std::runtime_error("line " + std::to_string(line_no) +
                                 ": expected header 'n,n_sub,k,workers,speedup'");
      }
      header_seen = true;
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.size() != 5) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected 5 fields, got " +
                               std::to_string(fields.size()));
    }
    CalibrationSample s;
    s.n = parse_number<int>(fields[0], line_no, "n");
    s.n_sub = parse_number<int>(fields[1], line_no, "n_sub");
    s.k = parse_number<int>(fields[2], line_no, "k");
    s.workers = parse_number<std::uint64_t>(fields[3], line_no, "workers");
    s.measured_speedup = parse_number<double>(fields[4], line_no, "speedup");
    try {
      s.validate();
    } catch (const CalibrationError& e) {
      throw CalibrationError(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
    }
    samples.push_back(s);
  }
  if (!header_seen) throw std::runtime_error("empty calibration file");
  return samples;
}

void write_samples_csv(std::ostream& out, std::span<const CalibrationSample> samples) {
  out << "n,n_sub,k,workers,speedup\n";
  const auto old_precision = out.precision(17);
  for (const auto& s : samples) {
    out << s.n << ',' << s.n_sub << ',' << s.k << ',' << s.workers << ',' << s.measured_speedup
        << '\n';
  }
  out.precision(old_precision);
}

std::string profile_to_json(const ResourceProfile& profile, const CalibrationResult* fit) {
  json doc = {
      {"kind", std::string(to_string(profile.kind))},
      {"workers", profile.workers},
      {"mem_per_worker_bytes", profile.mem_per_worker_bytes},
      {"eta_max", profile.eta_max},
      {"p", profile.p},
      {"label", profile.label},
      {"residual", profile.residual},
  };
  if (fit != nullptr) {
    doc["clamped_count"] = fit->clamped_count;
    doc["sample_count"] = fit->sample_count;
  }
  return doc.dump(2) + "\n";
}

ResourceProfile profile_from_json(const std::string& text) {
  const json doc = json::parse(text);
  static const std::set<std::string> known = {"kind",  "workers", "mem_per_worker_bytes",
                                              "eta_max", "p",     "label",
                                              "residual", "clamped_count", "sample_count"};
  for (const auto& [key, _] : doc.items()) {
    if (!known.contains(key)) throw std::invalid_argument("profile: unknown field '" + key + "'");
  }
  ResourceProfile profile;
  profile.kind = parse_backend_kind(doc.at("kind").get<std::string>());
  profile.workers = doc.at("workers").get<std::uint64_t>();
  profile.mem_per_worker_bytes = doc.at("mem_per_worker_bytes").get<std::uint64_t>();
  profile.eta_max = doc.at("eta_max").get<double>();
  profile.p = doc.at("p").get<double>();
  profile.label = doc.value("label", std::string{});
  profile.residual = doc.value("residual", 0.0);
  profile.validate();
  return profile;
}

}  // namespace qpilot::perfmodel
