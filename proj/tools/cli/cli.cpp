#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qpilot/perfmodel/accuracy.hpp"
#include "qpilot/perfmodel/calibration.hpp"
#include "qpilot/perfmodel/cost_model.hpp"
#include "qpilot/sim/engine.hpp"
#include "qpilot/sim/report.hpp"
#include "scenario.hpp"

namespace qpilot::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  bool quiet = false;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt6(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string read_file(const fs::path& file, const std::string& what) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw UsageError("cannot read " + what + " '" + file.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& file, const std::string& content) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + file.string() + "'");
  out << content;
  if (!out) throw UsageError("failed writing '" + file.string() + "'");
}

perfmodel::ResourceProfile load_profile(const std::string& file) {
  const auto text = read_file(file, "profile");
  try {
    return perfmodel::profile_from_json(text);
  } catch (const std::exception& e) {
    throw UsageError("profile '" + file + "': " + e.what());
  }
}

Scenario load(const std::string& file, const Globals& g) {
  Scenario s = load_scenario(file);
  if (g.seed) s.seed = *g.seed;
  return s;
}

// Every non-barrier task needs at least one pilot of a matching class.
void check_classes(const motifs::WorkloadSpec& w, const Scenario& s) {
  for (const auto& t : w.tasks) {
    if (t.kind == motifs::TaskKind::stage_barrier) continue;
    const bool ok = std::any_of(s.pilots.begin(), s.pilots.end(), [&](const auto& p) {
      return class_matches(t.resource_class, p.resource_class);
    });
    if (!ok) {
      throw UsageError("unsatisfiable resource class: task " + std::to_string(t.id) + " needs " +
                       std::string(to_string(t.resource_class)) + " but no pilot provides it");
    }
  }
}

sim::SimResult simulate(const Scenario& s, const motifs::WorkloadSpec& w,
                        const std::vector<pilot::PilotDescription>& pilots) {
  check_classes(w, s);
  return sim::run(w, pilots, s.policy, s.seed, s.sim);
}

int cmd_run(const std::string& file, const Globals& g, std::ostream& out) {
  const Scenario s = load(file, g);
  const auto w = build_workload(s);
  const auto result = simulate(s, w, s.pilots);
  const fs::path dir(g.out_dir);
  write_file(dir / s.report_path, sim::report_to_json(result.report).dump(2) + "\n");
  write_file(dir / s.trace_path, result.trace.to_csv());
  if (!g.quiet) {
    const auto& r = result.report;
    out << "completed " << r.completed_tasks << "/" << r.total_tasks << " tasks, failed "
        << r.failed_tasks << "\n"
        << "makespan " << fmt6(r.makespan) << " s, throughput " << fmt6(r.throughput)
        << " tasks/s\n"
        << "report " << (dir / s.report_path).string() << "\n"
        << "trace " << (dir / s.trace_path).string() << "\n";
  }
  return 0;
}

struct CalibrateArgs {
  std::string samples;
  std::string output;
  std::string kind = "cpu";
  std::optional<std::uint64_t> workers;
  std::optional<std::uint64_t> mem_bytes;
  std::optional<double> mem_gib;
  std::string label;
};

int cmd_calibrate(const CalibrateArgs& a, const Globals& g, std::ostream& out) {
  std::ifstream in(a.samples);
  if (!in) throw UsageError("cannot read samples '" + a.samples + "'");
  const auto samples = perfmodel::read_samples_csv(in);
  const auto fit = perfmodel::calibrate(samples);
  perfmodel::ResourceProfile profile;
  profile.kind = perfmodel::parse_backend_kind(a.kind);
  if (a.workers) {
    profile.workers = *a.workers;
  } else {
    for (const auto& s : samples) profile.workers = std::max(profile.workers, s.workers);
  }
  const perfmodel::EvaluationOptions defaults;
  profile.mem_per_worker_bytes = profile.kind == perfmodel::BackendKind::gpu
                                     ? defaults.gpu_mem_per_worker_bytes
                                     : defaults.cpu_mem_per_worker_bytes;
  if (a.mem_bytes && a.mem_gib) throw UsageError("give --mem-bytes or --mem-gib, not both");
  if (a.mem_bytes) profile.mem_per_worker_bytes = *a.mem_bytes;
  if (a.mem_gib) {
    if (!(*a.mem_gib > 0.0 && *a.mem_gib < 1e9)) throw UsageError("--mem-gib out of range");
    profile.mem_per_worker_bytes = static_cast<std::uint64_t>(*a.mem_gib * 1073741824.0);
  }
  profile.eta_max = fit.eta_max;
  profile.p = fit.p;
  profile.residual = fit.residual;
  profile.label = a.label;
  profile.validate();
  const auto doc = perfmodel::profile_to_json(profile, &fit);
  if (a.output.empty()) {
    out << doc;
  } else {
    write_file(fs::path(g.out_dir) / a.output, doc);
    if (!g.quiet) {
      out << "eta_max " << fmt6(fit.eta_max) << ", p " << fmt6(fit.p) << ", residual "
          << fmt6(fit.residual) << ", " << fit.sample_count << " samples, " << fit.clamped_count
          << " clamped\n";
    }
  }
  return 0;
}

struct RecommendArgs {
  int n = 0;
  std::string family = "linear";
  std::string profile;
  int k_max = perfmodel::kDefaultMaxCuts;
  std::optional<std::uint64_t> workers;
};

int cmd_recommend(const RecommendArgs& a, std::ostream& out) {
  auto profile = load_profile(a.profile);
  if (a.workers) profile.workers = *a.workers;
  perfmodel::CircuitSpec circuit;
  circuit.n_qubits = a.n;
  circuit.family = perfmodel::parse_circuit_family(a.family);
  if (a.n < 1) throw UsageError("invalid n: must be >= 1");
  const auto rec = perfmodel::recommend_cuts(circuit, profile, a.k_max);
  ordered_json doc = {{"n", a.n},
                      {"family", std::string(perfmodel::to_string(circuit.family))},
                      {"profile", profile.label},
                      {"workers", profile.workers},
                      {"k_star", rec.k_star},
                      {"n_sub_star", rec.n_sub_star},
                      {"predicted_speedup", sim::round_sig6(rec.predicted_speedup)},
                      {"feasible", rec.feasible},
                      {"reason", rec.reason}};
  out << doc.dump(2) << "\n";
  return 0;
}

struct EvaluateArgs {
  std::string cases;
  std::string profile;
  std::optional<double> split;
  int k_max = perfmodel::kDefaultMaxCuts;
  std::string family = "linear";
  std::optional<double> gpu_mem_gib;
  std::optional<double> cpu_mem_gib;
};

std::string cell(const std::optional<double>& v) { return v ? fmt6(*v) : "-"; }

std::optional<double> accuracy_for(const perfmodel::ResourceProfile& profile,
                                   const std::vector<perfmodel::LabeledCase>& cases,
                                   std::optional<perfmodel::BackendKind> kind, int k_max,
                                   perfmodel::CircuitFamily family) {
  std::vector<perfmodel::LabeledCase> subset;
  for (const auto& c : cases) {
    if (!kind || c.kind == *kind) subset.push_back(c);
  }
  if (subset.empty()) return std::nullopt;
  return perfmodel::cut_selection_accuracy(profile, subset, k_max, family);
}

int cmd_evaluate(const EvaluateArgs& a, const Globals& g, std::ostream& out) {
  std::ifstream in(a.cases);
  if (!in) throw UsageError("cannot read cases '" + a.cases + "'");
  if (in.peek() == std::ifstream::traits_type::eof()) {
    throw UsageError("empty case file '" + a.cases + "'");
  }
  const auto input = perfmodel::read_evaluation_csv(in);
  if (input.cases.empty() && input.measurements.empty()) {
    throw UsageError("empty case file '" + a.cases + "'");
  }
  perfmodel::EvaluationOptions opt;
  opt.k_max = a.k_max;
  opt.family = perfmodel::parse_circuit_family(a.family);
  const auto gib = [](double x, const char* flag) {
    if (!(x > 0.0 && x < 1e9)) throw UsageError(std::string(flag) + " out of range");
    return static_cast<std::uint64_t>(x * 1073741824.0);
  };
  if (a.gpu_mem_gib) opt.gpu_mem_per_worker_bytes = gib(*a.gpu_mem_gib, "--gpu-mem-gib");
  if (a.cpu_mem_gib) opt.cpu_mem_per_worker_bytes = gib(*a.cpu_mem_gib, "--cpu-mem-gib");

  if (a.split) {
    if (input.measurements.empty()) {
      throw UsageError("--split needs measurement rows (kind,device,n,n_sub,k,workers,speedup)");
    }
    if (!a.profile.empty()) throw UsageError("--split calibrates its own models; drop --profile");
    const std::uint64_t seed = g.seed.value_or(0);
    const auto r = perfmodel::evaluate_split(input.measurements, *a.split, seed, opt);
    out << "split " << fmt6(r.train_fraction) << " seed " << seed << ": " << r.train_rows
        << " train rows, " << r.test_rows << " test rows\n"
        << "general fit: eta_max " << fmt6(r.general_fit.eta_max) << ", p "
        << fmt6(r.general_fit.p) << ", residual " << fmt6(r.general_fit.residual) << "\n"
        << "model            all       GPU       CPU\n";
    char line[160];
    std::snprintf(line, sizeof line, "%-16s %-9s %-9s %s\n", "general", cell(r.general_all).c_str(),
                  cell(r.general_gpu).c_str(), cell(r.general_cpu).c_str());
    out << line;
    std::snprintf(line, sizeof line, "%-16s %-9s %-9s %s\n", "device-specific", "-",
                  cell(r.specific_gpu).c_str(), cell(r.specific_cpu).c_str());
    out << line;
    return 0;
  }

  if (a.profile.empty()) throw UsageError("evaluate needs --profile, or --split to calibrate");
  const auto profile = load_profile(a.profile);
  const auto cases =
      input.cases.empty() ? perfmodel::label_measurements(input.measurements) : input.cases;
  const auto all = accuracy_for(profile, cases, std::nullopt, opt.k_max, opt.family);
  const auto gpu =
      accuracy_for(profile, cases, perfmodel::BackendKind::gpu, opt.k_max, opt.family);
  const auto cpu =
      accuracy_for(profile, cases, perfmodel::BackendKind::cpu, opt.k_max, opt.family);
  out << cases.size() << " cases\n"
      << "model            all       GPU       CPU\n";
  char line[160];
  std::snprintf(line, sizeof line, "%-16s %-9s %-9s %s\n",
                profile.label.empty() ? "profile" : profile.label.c_str(), cell(all).c_str(),
                cell(gpu).c_str(), cell(cpu).c_str());
  out << line;
  return 0;
}

struct SweepArgs {
  std::string scenario;
  std::string axis;
  std::vector<double> values;
  std::vector<std::string> profiles;
  std::string output;
};

std::uint64_t positive_int(double v, const std::string& axis) {
  if (!(v >= 1.0 && v <= 1e9) || v != static_cast<double>(static_cast<std::uint64_t>(v))) {
    throw UsageError(axis + " values must be positive integers, got " + fmt6(v));
  }
  return static_cast<std::uint64_t>(v);
}

// Replicates the pilot set once per node; node i starts i * stagger later.
std::vector<pilot::PilotDescription> node_pilots(const Scenario& s, std::uint64_t nodes) {
  std::vector<pilot::PilotDescription> out;
  for (std::uint64_t i = 0; i < nodes; ++i) {
    for (auto p : s.pilots) {
      p.startup_delay += static_cast<double>(i) * s.sweep.stagger_seconds;
      if (!p.name.empty()) p.name += "@node" + std::to_string(i);
      out.push_back(std::move(p));
    }
  }
  return out;
}

int cmd_sweep(const SweepArgs& a, const Globals& g, std::ostream& out) {
  Scenario s = load(a.scenario, g);
  SweepAxis axis;
  if (!a.axis.empty()) {
    axis = parse_sweep_axis(a.axis);
  } else if (s.sweep.axis) {
    axis = *s.sweep.axis;
  } else {
    throw UsageError("no sweep axis: pass --axis or set sweep.axis in the scenario");
  }
  const auto& values = a.values.empty() ? s.sweep.values : a.values;
  if (values.empty()) throw UsageError("no sweep values: pass --values or set sweep.values");

  std::ostringstream csv;
  switch (axis) {
    case SweepAxis::workers: {
      csv << "workers,makespan_s,throughput,completed,failed\n";
      const auto w = build_workload(s);
      for (const double v : values) {
        auto pilots = s.pilots;
        for (auto& p : pilots) p.slots = static_cast<int>(positive_int(v, "workers"));
        const auto r = simulate(s, w, pilots).report;
        csv << positive_int(v, "workers") << ',' << fmt6(r.makespan) << ',' << fmt6(r.throughput)
            << ',' << r.completed_tasks << ',' << r.failed_tasks << '\n';
      }
      break;
    }
    case SweepAxis::tasks: {
      csv << "tasks,makespan_s,throughput,completed,failed\n";
      for (const double v : values) {
        const auto n = positive_int(v, "tasks");
        const auto w = build_workload(s, static_cast<int>(n));
        const auto r = simulate(s, w, s.pilots).report;
        csv << n << ',' << fmt6(r.makespan) << ',' << fmt6(r.throughput) << ','
            << r.completed_tasks << ',' << r.failed_tasks << '\n';
      }
      break;
    }
    case SweepAxis::nodes: {
      csv << "nodes,runtime_s,speedup,efficiency,completed,failed\n";
      const auto w = build_workload(s);
      const auto base = simulate(s, w, node_pilots(s, 1)).report;
      if (base.completed_tasks != base.total_tasks) {
        throw UsageError("single-node baseline did not complete every task");
      }
      for (const double v : values) {
        const auto n = positive_int(v, "nodes");
        const auto r = n == 1 ? base : simulate(s, w, node_pilots(s, n)).report;
        const double eff = sim::scaling_efficiency(base.runtime, r.runtime, static_cast<int>(n));
        csv << n << ',' << fmt6(r.runtime) << ',' << fmt6(base.runtime / r.runtime) << ','
            << fmt6(eff) << ',' << r.completed_tasks << ',' << r.failed_tasks << '\n';
      }
      break;
    }
    case SweepAxis::cuts: {
      auto profiles = s.sweep.profiles;
      for (const auto& f : a.profiles) profiles.push_back(load_profile(f));
      if (profiles.empty()) throw UsageError("cuts sweep needs profiles (sweep.profiles or --profile)");
      csv << "profile,k,n_sub,tasks,rounds,predicted_speedup,memory_feasible\n";
      for (std::size_t i = 0; i < profiles.size(); ++i) {
        const auto& p = profiles[i];
        const std::string label = p.label.empty() ? "profile" + std::to_string(i) : p.label;
        for (const double v : values) {
          const auto k = static_cast<int>(positive_int(v, "cuts"));
          const auto plan = perfmodel::CutPlan::derived(s.sweep.n, k, s.sweep.family);
          csv << label << ',' << k << ',' << plan.n_sub() << ',' << plan.n_tasks() << ','
              << perfmodel::rounds(p.workers, k) << ',' << fmt6(perfmodel::speedup(plan, p))
              << ',' << (perfmodel::memory_feasible(plan.n_sub(), p) ? 1 : 0) << '\n';
        }
      }
      break;
    }
  }
  if (a.output.empty()) {
    out << csv.str();
  } else {
    write_file(fs::path(g.out_dir) / a.output, csv.str());
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pilot-based quantum-classical workload simulator and cut advisor", "qpilot"};
  app.require_subcommand(1);
  Globals g;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Override the scenario seed");
  app.add_option("--out-dir", g.out_dir, "Directory for output files")->capture_default_str();
  app.add_flag("--quiet", g.quiet, "Suppress summaries");

  std::string run_file;
  auto* run = app.add_subcommand("run", "Simulate a scenario; write report JSON and trace CSV");
  run->add_option("scenario", run_file, "Scenario JSON")->required();

  CalibrateArgs cal;
  auto* calibrate = app.add_subcommand("calibrate", "Fit eta_max and p from speedup samples");
  calibrate->add_option("samples", cal.samples, "CSV: n,n_sub,k,workers,speedup")->required();
  calibrate->add_option("-o,--output", cal.output, "Profile JSON (default: stdout)");
  calibrate->add_option("--kind", cal.kind, "cpu or gpu")->capture_default_str();
  calibrate->add_option("--workers", cal.workers, "Workers (default: largest in samples)");
  calibrate->add_option("--mem-bytes", cal.mem_bytes, "Memory per worker in bytes");
  calibrate->add_option("--mem-gib", cal.mem_gib, "Memory per worker in GiB");
  calibrate->add_option("--label", cal.label, "Profile label");

  RecommendArgs rec;
  auto* recommend = app.add_subcommand("recommend", "Recommend a cut count for an n-qubit circuit");
  recommend->add_option("--n", rec.n, "Circuit width")->required();
  recommend->add_option("--family", rec.family, "linear or generic")->capture_default_str();
  recommend->add_option("--profile", rec.profile, "Profile JSON")->required();
  recommend->add_option("--k-max", rec.k_max, "Largest cut count")->capture_default_str();
  recommend->add_option("--workers", rec.workers, "Override the profile's worker count");

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Cut-selection accuracy on labelled cases");
  evaluate->add_option("cases", ev.cases, "Case or measurement CSV")->required();
  evaluate->add_option("--profile", ev.profile, "Profile JSON to evaluate");
  evaluate->add_option("--split", ev.split, "Train fraction; calibrate on it, test on the rest");
  evaluate->add_option("--k-max", ev.k_max, "Largest cut count")->capture_default_str();
  evaluate->add_option("--family", ev.family, "linear or generic")->capture_default_str();
  evaluate->add_option("--gpu-mem-gib", ev.gpu_mem_gib, "GPU memory per worker");
  evaluate->add_option("--cpu-mem-gib", ev.cpu_mem_gib, "CPU memory per worker");

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "Emit a CSV series over one axis");
  sweep->add_option("scenario", sw.scenario, "Scenario JSON")->required();
  sweep->add_option("--axis", sw.axis, "workers, nodes, cuts or tasks");
  sweep->add_option("--values", sw.values, "Axis values")->delimiter(',');
  sweep->add_option("--profile", sw.profiles, "Profile JSON for the cuts axis");
  sweep->add_option("-o,--output", sw.output, "CSV file (default: stdout)");

  for (auto* sub : {run, calibrate, recommend, evaluate, sweep}) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  if (*seed_opt) g.seed = seed;

  try {
    if (*run) return cmd_run(run_file, g, out);
    if (*calibrate) return cmd_calibrate(cal, g, out);
    if (*recommend) return cmd_recommend(rec, out);
    if (*evaluate) return cmd_evaluate(ev, g, out);
    if (*sweep) return cmd_sweep(sw, g, out);
  } catch (const std::exception& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "error: " << msg << "\n";
    return 1;
  }
  return 1;
}

}  // namespace qpilot::cli
