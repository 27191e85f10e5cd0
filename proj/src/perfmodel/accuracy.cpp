#include "qpilot/perfmodel/accuracy.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "qpilot/common/rng.hpp"

namespace qpilot::perfmodel {

double cut_selection_accuracy(const ResourceProfile& model, std::span<const LabeledCase> cases,
                              int k_max, CircuitFamily family) {
  if (cases.empty()) throw std::invalid_argument("cut_selection_accuracy: empty test set");
  std::size_t hits = 0;
  for (const auto& c : cases) {
    ResourceProfile profile = model;
    profile.workers = c.workers;
    const auto rec = recommend_cuts(CircuitSpec{c.n, 1, family}, profile, k_max);
    if (rec.k_star == c.k_opt) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(cases.size());
}

std::vector<LabeledCase> label_measurements(std::span<const Measurement> rows) {
  using Key = std::tuple<BackendKind, std::string, int, std::uint64_t>;
  std::map<Key, std::pair<int, double>> best;
  for (const auto& m : rows) {
    const Key key{m.kind, m.device, m.n, m.workers};
    auto [it, inserted] = best.try_emplace(key, m.k, m.speedup);
    auto& [k, s] = it->second;
    if (!inserted && (m.speedup > s || (m.speedup == s && m.k < k))) {
      k = m.k;
      s = m.speedup;
    }
  }
  std::vector<LabeledCase> cases;
  cases.reserve(rows.size());
  for (const auto& m : rows) {
    cases.push_back({m.kind, m.n, m.workers, best.at(Key{m.kind, m.device, m.n, m.workers}).first});
  }
  return cases;
}

Split stratified_split(std::span<const Measurement> rows, double train_fraction,
                       std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("train fraction must lie in (0, 1)");
  }
  std::map<std::pair<BackendKind, int>, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < rows.size(); ++i) strata[{rows[i].kind, rows[i].n}].push_back(i);

  Rng rng(seed);
  Split split;
  for (auto& [key, members] : strata) {
    for (std::size_t i = members.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(rng.next() % i);
      std::swap(members[i - 1], members[j]);
    }
    // Half-up rounding with slack, so 0.7 * 45 gives 32 despite 0.7 being inexact.
    const auto n_train = static_cast<std::size_t>(
        std::floor(train_fraction * static_cast<double>(members.size()) + 0.5 + 1e-9));
    split.train.insert(split.train.end(), members.begin(), members.begin() + n_train);
    split.test.insert(split.test.end(), members.begin() + n_train, members.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

namespace {

std::optional<double> accuracy_on(const ResourceProfile& model,
                                  const std::vector<LabeledCase>& cases,
                                  const std::vector<std::size_t>& indices,
                                  std::optional<BackendKind> kind,
                                  const EvaluationOptions& options) {
  std::vector<LabeledCase> subset;
  for (const auto i : indices) {
    if (!kind || cases[i].kind == *kind) subset.push_back(cases[i]);
  }
  if (subset.empty()) return std::nullopt;
  return cut_selection_accuracy(model, subset, options.k_max, options.family);
}

ResourceProfile profile_from_fit(const CalibrationResult& fit, BackendKind kind,
                                 const EvaluationOptions& options) {
  ResourceProfile profile;
  profile.kind = kind;
  profile.eta_max = fit.eta_max;
  profile.p = fit.p;
  profile.residual = fit.residual;
  profile.mem_per_worker_bytes = kind == BackendKind::gpu ? options.gpu_mem_per_worker_bytes
                                                          : options.cpu_mem_per_worker_bytes;
  return profile;
}

std::optional<CalibrationResult> try_fit(std::span<const Measurement> rows,
                                         const std::vector<std::size_t>& indices,
                                         std::optional<BackendKind> kind) {
  std::vector<CalibrationSample> samples;
  for (const auto i : indices) {
    if (!kind || rows[i].kind == *kind) samples.push_back(rows[i].sample());
  }
  try {
    return calibrate(samples);
  } catch (const CalibrationError&) {
    return std::nullopt;
  }
}

}  // namespace

AccuracyReport evaluate_split(std::span<const Measurement> rows, double train_fraction,
                              std::uint64_t seed, const EvaluationOptions& options) {
  if (rows.empty()) throw std::invalid_argument("evaluate_split: no measurements");
  const auto cases = label_measurements(rows);
  const auto split = stratified_split(rows, train_fraction, seed);

  AccuracyReport report;
  report.train_fraction = train_fraction;
  report.train_rows = split.train.size();
  report.test_rows = split.test.size();

  std::vector<CalibrationSample> train_samples;
  for (const auto i : split.train) train_samples.push_back(rows[i].sample());
  report.general_fit = calibrate(train_samples);

  // The general model shares (eta_max, p) across kinds; memory still follows
  // the kind of the case being scored.
  const auto gpu_general = profile_from_fit(report.general_fit, BackendKind::gpu, options);
  const auto cpu_general = profile_from_fit(report.general_fit, BackendKind::cpu, options);
  report.general_gpu = accuracy_on(gpu_general, cases, split.test, BackendKind::gpu, options);
  report.general_cpu = accuracy_on(cpu_general, cases, split.test, BackendKind::cpu, options);
  {
    std::size_t gpu_n = 0;
    std::size_t cpu_n = 0;
    for (const auto i : split.test) (cases[i].kind == BackendKind::gpu ? gpu_n : cpu_n)++;
    if (gpu_n + cpu_n > 0) {
      report.general_all = (report.general_gpu.value_or(0.0) * static_cast<double>(gpu_n) +
                            report.general_cpu.value_or(0.0) * static_cast<double>(cpu_n)) /
                           static_cast<double>(gpu_n + cpu_n);
    }
  }

  for (const auto kind : {BackendKind::gpu, BackendKind::cpu}) {
    const auto fit = try_fit(rows, split.train, kind);
    if (!fit) continue;
    const auto acc =
        accuracy_on(profile_from_fit(*fit, kind, options), cases, split.test, kind, options);
    (kind == BackendKind::gpu ? report.specific_gpu : report.specific_cpu) = acc;
  }
  return report;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && std::isspace(static_cast<unsigned char>(field.back()))) {
      field.pop_back();
    }
    while (!field.empty() && std::isspace(static_cast<unsigned char>(field.front()))) {
      field.erase(field.begin());
    }
    out.push_back(field);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <typename T>
T field_as(const std::string& text, std::size_t line_no, const char* column) {
  std::istringstream ss(text);
  T value{};
  ss >> value;
  if (text.empty() || ss.fail() || !ss.eof()) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": column '" + column +
                             "': cannot parse '" + text + "'");
  }
  return value;
}

BackendKind kind_at(const std::string& text, std::size_t line_no) {
  try {
    return parse_backend_kind(text);
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": " + e.what());
  }
}

}  // namespace

EvaluationInput read_evaluation_csv(std::istream& in) {
  static const std::string kMeasurementHeader = "kind,device,n,n_sub,k,workers,speedup";
  static const std::string kCaseHeader = "kind,n,workers,k_opt";
  EvaluationInput input;
  std::string line;
  std::size_t line_no = 0;
  enum class Format { unknown, measurements, cases } format = Format::unknown;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (format == Format::unknown) {
      if (line == kMeasurementHeader) {
        format = Format::measurements;
      } else if (line == kCaseHeader) {
        format = Format::cases;
      } else {
        throw std::runtime_error("line " + std::to_string(line_no) + ": expected header '" +
                                 kMeasurementHeader + "' or '" + kCaseHeader + "'");
      }
      continue;
    }
    const auto f = split_csv(line);
    if (format == Format::measurements) {
      if (f.size() != 7) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": expected 7 fields");
      }
      Measurement m;
      m.kind = kind_at(f[0], line_no);
      m.device = f[1];
      m.n = field_as<int>(f[2], line_no, "n");
      m.n_sub = field_as<int>(f[3], line_no, "n_sub");
      m.k = field_as<int>(f[4], line_no, "k");
      m.workers = field_as<std::uint64_t>(f[5], line_no, "workers");
      m.speedup = field_as<double>(f[6], line_no, "speedup");
      try {
        m.sample().validate();
      } catch (const CalibrationError& e) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": " + e.what());
      }
      input.measurements.push_back(m);
    } else {
      if (f.size() != 4) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": expected 4 fields");
      }
      LabeledCase c;
      c.kind = kind_at(f[0], line_no);
      c.n = field_as<int>(f[1], line_no, "n");
      c.workers = field_as<std::uint64_t>(f[2], line_no, "workers");
      c.k_opt = field_as<int>(f[3], line_no, "k_opt");
      if (c.n < 1 || c.workers < 1 || c.k_opt < 0) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": invalid case");
      }
      input.cases.push_back(c);
    }
  }
  if (format == Format::measurements) input.cases = label_measurements(input.measurements);
  if (input.cases.empty()) throw std::runtime_error("evaluation file contains no cases");
  return input;
}

void write_measurements_csv(std::ostream& out, std::span<const Measurement> rows) {
  out << "kind,device,n,n_sub,k,workers,speedup\n";
  const auto old_precision = out.precision(17);
  for (const auto& m : rows) {
    out << to_string(m.kind) << ',' << m.device << ',' << m.n << ',' << m.n_sub << ',' << m.k
        << ',' << m.workers << ',' << m.speedup << '\n';
  }
  out.precision(old_precision);
}

}  // namespace qpilot::perfmodel
