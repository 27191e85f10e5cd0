#include "scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "qpilot/motifs/generators.hpp"
#include "qpilot/motifs/workload_io.hpp"
#include "qpilot/perfmodel/calibration.hpp"

namespace qpilot::cli {

using nlohmann::json;

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::workers: return "workers";
    case SweepAxis::nodes: return "nodes";
    case SweepAxis::cuts: return "cuts";
    case SweepAxis::tasks: return "tasks";
  }
  return "?";
}

SweepAxis parse_sweep_axis(std::string_view text) {
  if (text == "workers") return SweepAxis::workers;
  if (text == "nodes") return SweepAxis::nodes;
  if (text == "cuts") return SweepAxis::cuts;
  if (text == "tasks") return SweepAxis::tasks;
  throw ScenarioError("unknown sweep axis '" + std::string(text) +
                      "' (expected workers, nodes, cuts or tasks)");
}

namespace {

// A JSON object being read field by field. Every key must be consumed or
// listed as allowed; finish() reports the first leftover key.
class Fields {
 public:
  Fields(const json& doc, std::string path) : doc_(doc), path_(std::move(path)) {
    if (!doc_.is_object()) fail(path_, "expected an object");
  }

  [[noreturn]] static void fail(const std::string& where, const std::string& what) {
    throw ScenarioError((where.empty() ? std::string("scenario") : where) + ": " + what);
  }

  std::string at(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return doc_.contains(key);
  }

  const json& raw(const std::string& key) {
    if (!has(key)) fail(at(key), "required field missing");
    return doc_.at(key);
  }

  template <typename T>
  T get(const std::string& key) {
    const json& v = raw(key);
    return convert<T>(v, at(key));
  }

  template <typename T>
  T get_or(const std::string& key, T fallback) {
    if (!has(key)) return fallback;
    return convert<T>(doc_.at(key), at(key));
  }

  template <typename T>
  std::optional<T> maybe(const std::string& key) {
    if (!has(key) || doc_.at(key).is_null()) return std::nullopt;
    return convert<T>(doc_.at(key), at(key));
  }

  void finish() const {
    for (const auto& [key, _] : doc_.items()) {
      if (!seen_.contains(key)) fail(at(key), "unknown field");
    }
  }

  template <typename T>
  static T convert(const json& v, const std::string& where) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) fail(where, "expected true or false");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) fail(where, "expected an integer");
      if (std::is_unsigned_v<T> && v.is_number_integer() && !v.is_number_unsigned()) {
        fail(where, "expected a non-negative integer");
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) fail(where, "expected a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) fail(where, "expected a string");
    }
    return v.get<T>();
  }

 private:
  const json& doc_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename F>
auto guarded(const std::string& where, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::exception& e) {
    Fields::fail(where, e.what());
  }
}

ResourceClass read_class(Fields& f, const std::string& key, ResourceClass fallback) {
  if (!f.has(key)) return fallback;
  const auto text = f.get<std::string>(key);
  return guarded(f.at(key), [&] { return parse_resource_class(text); });
}

pilot::QueueDelayModel read_queue_delay(const json& doc, const std::string& path) {
  Fields f(doc, path);
  const auto dist = f.get_or<std::string>("distribution", "exponential");
  pilot::QueueDelayModel m;
  m.kind = guarded(f.at("distribution"), [&] { return pilot::parse_queue_delay_kind(dist); });
  switch (m.kind) {
    case pilot::QueueDelayModel::Kind::constant:
      m = pilot::QueueDelayModel::constant(f.get<double>("seconds"));
      break;
    case pilot::QueueDelayModel::Kind::uniform:
      m = pilot::QueueDelayModel::uniform(f.get<double>("lo"), f.get<double>("hi"));
      break;
    case pilot::QueueDelayModel::Kind::exponential:
      m = pilot::QueueDelayModel::exponential(f.get_or<double>("mean", 60.0));
      break;
  }
  f.finish();
  guarded(path, [&] {
    m.validate();
    return 0;
  });
  return m;
}

void read_pilots(const json& doc, Scenario& s) {
  if (!doc.is_array()) Fields::fail("pilots", "expected a list");
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string path = "pilots[" + std::to_string(i) + "]";
    Fields f(doc[i], path);
    pilot::PilotDescription d;
    d.name = f.get_or<std::string>("name", "");
    d.resource_class = read_class(f, "resource_class", ResourceClass::cpu);
    d.slots = f.get_or<int>("slots", 1);
    if (f.has("mem_per_slot_bytes") && f.has("mem_per_slot_gib")) {
      Fields::fail(path, "give mem_per_slot_bytes or mem_per_slot_gib, not both");
    }
    if (auto b = f.maybe<std::uint64_t>("mem_per_slot_bytes")) d.mem_per_slot_bytes = *b;
    if (auto g = f.maybe<double>("mem_per_slot_gib")) {
      if (!(*g >= 0.0 && *g < 1e9)) Fields::fail(f.at("mem_per_slot_gib"), "out of range");
      d.mem_per_slot_bytes = static_cast<std::uint64_t>(*g * 1073741824.0);
    }
    d.startup_delay =
        f.get_or<double>("startup_delay", pilot::default_startup_delay(d.resource_class));
    d.walltime = f.maybe<double>("walltime");
    if (f.has("access_mode")) {
      const auto text = f.get<std::string>("access_mode");
      d.access_mode = guarded(f.at("access_mode"), [&] { return pilot::parse_access_mode(text); });
    }
    if (f.has("queue_delay")) d.queue_delay = read_queue_delay(f.raw("queue_delay"), f.at("queue_delay"));
    d.session_setup_delay = f.get_or<double>("session_setup_delay", 0.0);
    const int count = f.get_or<int>("count", 1);
    if (count < 1) Fields::fail(f.at("count"), "must be >= 1");
    f.finish();
    guarded(path, [&] {
      d.validate();
      return 0;
    });
    for (int c = 0; c < count; ++c) {
      auto copy = d;
      if (count > 1 && !copy.name.empty()) copy.name += "-" + std::to_string(c);
      s.pilots.push_back(std::move(copy));
    }
  }
  if (s.pilots.empty()) throw ScenarioError("no pilots defined");
}

void read_sim(const json& doc, Scenario& s) {
  Fields f(doc, "sim");
  if (f.has("overhead")) {
    Fields o(f.raw("overhead"), "sim.overhead");
    s.sim.overhead.base_seconds = o.get_or<double>("base_seconds", s.sim.overhead.base_seconds);
    s.sim.overhead.per_backlog_seconds =
        o.get_or<double>("per_backlog_seconds", s.sim.overhead.per_backlog_seconds);
    o.finish();
    guarded("sim.overhead", [&] {
      s.sim.overhead.validate();
      return 0;
    });
  }
  if (f.has("costs")) {
    const json& costs = f.raw("costs");
    if (!costs.is_object()) Fields::fail("sim.costs", "expected an object");
    for (const auto& [key, value] : costs.items()) {
      const std::string path = "sim.costs." + key;
      const auto rc = guarded(path, [&] { return parse_resource_class(key); });
      if (rc == ResourceClass::any) Fields::fail(path, "expected CPU, GPU or QPU");
      auto& c = s.sim.costs.for_class(rc);
      Fields cf(value, path);
      c.statevector_seconds = cf.get_or<double>("statevector_seconds", c.statevector_seconds);
      c.reference_qubits = cf.get_or<int>("reference_qubits", c.reference_qubits);
      c.seconds_per_layer = cf.get_or<double>("seconds_per_layer", c.seconds_per_layer);
      c.default_depth = cf.get_or<int>("default_depth", c.default_depth);
      cf.finish();
      guarded(path, [&] {
        c.validate();
        return 0;
      });
    }
  }
  s.sim.retries = f.get_or<int>("retries", 0);
  if (s.sim.retries < 0) Fields::fail("sim.retries", "must be >= 0");
  s.sim.throughput_includes_startup = f.get_or<bool>("throughput_includes_startup", false);
  f.finish();
}

perfmodel::ResourceProfile read_profile(const json& item, const std::string& path,
                                        const std::filesystem::path& base) {
  return guarded(path, [&] {
    if (item.is_string()) {
      const auto file = base / item.get<std::string>();
      std::ifstream in(file);
      if (!in) throw std::runtime_error("cannot read profile '" + file.string() + "'");
      std::stringstream ss;
      ss << in.rdbuf();
      return perfmodel::profile_from_json(ss.str());
    }
    return perfmodel::profile_from_json(item.dump());
  });
}

void read_sweep(const json& doc, Scenario& s) {
  Fields f(doc, "sweep");
  if (f.has("axis")) s.sweep.axis = parse_sweep_axis(f.get<std::string>("axis"));
  if (f.has("values")) {
    const json& v = f.raw("values");
    if (!v.is_array()) Fields::fail("sweep.values", "expected a list of numbers");
    for (std::size_t i = 0; i < v.size(); ++i) {
      s.sweep.values.push_back(
          Fields::convert<double>(v[i], "sweep.values[" + std::to_string(i) + "]"));
    }
  }
  s.sweep.stagger_seconds = f.get_or<double>("stagger_seconds", 0.0);
  if (!(s.sweep.stagger_seconds >= 0.0)) Fields::fail("sweep.stagger_seconds", "must be >= 0");
  if (f.has("profiles")) {
    const json& v = f.raw("profiles");
    if (!v.is_array()) Fields::fail("sweep.profiles", "expected a list");
    for (std::size_t i = 0; i < v.size(); ++i) {
      s.sweep.profiles.push_back(
          read_profile(v[i], "sweep.profiles[" + std::to_string(i) + "]", s.base_dir));
    }
  }
  s.sweep.n = f.get_or<int>("n", s.sweep.n);
  if (f.has("family")) {
    const auto text = f.get<std::string>("family");
    s.sweep.family = guarded("sweep.family", [&] { return perfmodel::parse_circuit_family(text); });
  }
  f.finish();
}

const std::set<std::string>& generator_keys(motifs::Motif motif) {
  static const std::set<std::string> b1 = {"n_circuits", "qubits", "n_qubits", "resource_class",
                                           "depth", "fixed_seconds"};
  static const std::set<std::string> b3 = {"n", "k", "family", "subexperiment_class",
                                           "reconstruction_class", "reconstruction_seconds"};
  static const std::set<std::string> c1 = {"stages"};
  static const std::set<std::string> c2 = {"iterations",     "n_qubits",    "depth",
                                           "classical_seconds", "quantum_class",
                                           "classical_class"};
  switch (motif) {
    case motifs::Motif::circuit_execution: return b1;
    case motifs::Motif::circuit_cutting: return b3;
    case motifs::Motif::pipeline: return c1;
    case motifs::Motif::sequential_vqa: return c2;
  }
  return b1;
}

void read_workload(const json& doc, Scenario& s) {
  if (!doc.is_object()) Fields::fail("workload", "expected an object");
  auto& w = s.workload;
  json params = json::object();
  for (const auto& [key, value] : doc.items()) {
    if (key == "motif") {
      const auto text = Fields::convert<std::string>(value, "workload.motif");
      w.motif = guarded("workload.motif", [&] {
        // Accept both the short and the labelled spelling.
        for (const auto m : {motifs::Motif::circuit_execution, motifs::Motif::circuit_cutting,
                             motifs::Motif::pipeline, motifs::Motif::sequential_vqa}) {
          const auto full = motifs::to_string(m);
          if (text == full || (full.size() > 3 && text == full.substr(3))) return m;
        }
        return motifs::parse_motif(text);
      });
    } else if (key == "file") {
      w.file = s.base_dir / Fields::convert<std::string>(value, "workload.file");
    } else if (key == "jitter") {
      w.jitter = Fields::convert<double>(value, "workload.jitter");
      if (!(w.jitter >= 0.0 && w.jitter < 1.0)) Fields::fail("workload.jitter", "must lie in [0, 1)");
    } else {
      params[key] = value;
    }
  }
  if (w.motif.has_value() == w.file.has_value()) {
    Fields::fail("workload", "give exactly one of 'motif' or 'file'");
  }
  if (w.file) {
    if (!params.empty()) Fields::fail("workload." + params.begin().key(), "unknown field");
    return;
  }
  const auto& allowed = generator_keys(*w.motif);
  for (const auto& [key, _] : params.items()) {
    if (!allowed.contains(key)) Fields::fail("workload." + key, "unknown field");
  }
  w.params = std::move(params);
}

std::string slurp(const std::filesystem::path& file, const std::string& what) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ScenarioError("cannot read " + what + " '" + file.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("invalid JSON: ") + e.what());
  }
  Scenario s;
  s.base_dir = base_dir;
  Fields f(doc, "");
  s.name = f.get_or<std::string>("name", "");
  s.seed = f.get_or<std::uint64_t>("seed", 0);
  if (f.has("policy")) {
    const auto text2 = f.get<std::string>("policy");
    s.policy = guarded("policy", [&] { return pilot::parse_scheduling_policy(text2); });
  }
  if (!f.has("pilots")) throw ScenarioError("no pilots defined");
  read_pilots(f.raw("pilots"), s);
  read_workload(f.raw("workload"), s);
  if (f.has("sim")) read_sim(f.raw("sim"), s);
  if (f.has("outputs")) {
    Fields o(f.raw("outputs"), "outputs");
    s.report_path = o.get_or<std::string>("report", s.report_path);
    s.trace_path = o.get_or<std::string>("trace", s.trace_path);
    o.finish();
  }
  if (f.has("sweep")) read_sweep(f.raw("sweep"), s);
  f.finish();
  // Build once so generator parameter errors surface at load time.
  (void)build_workload(s);
  return s;
}

Scenario load_scenario(const std::filesystem::path& file) {
  return parse_scenario(slurp(file, "scenario"), file.parent_path());
}

motifs::WorkloadSpec build_workload(const Scenario& s, std::optional<int> task_count) {
  const auto& w = s.workload;
  motifs::WorkloadSpec spec;
  if (w.file) {
    if (task_count) throw ScenarioError("workload: a workload file has no size parameter to sweep");
    const auto text = slurp(*w.file, "workload");
    spec = guarded("workload.file", [&] { return motifs::workload_from_json(json::parse(text)); });
  } else {
    Fields f(w.params, "workload");
    switch (*w.motif) {
      case motifs::Motif::circuit_execution: {
        int n_circuits = task_count.value_or(f.get_or<int>("n_circuits", 1));
        motifs::QubitRange range;
        if (f.has("qubits") && f.has("n_qubits")) {
          Fields::fail("workload", "give qubits or n_qubits, not both");
        }
        if (f.has("qubits")) {
          Fields q(f.raw("qubits"), "workload.qubits");
          range.lo = q.get<int>("lo");
          range.hi = q.get_or<int>("hi", range.lo);
          range.step = q.get_or<int>("step", 1);
          q.finish();
        } else {
          range.lo = range.hi = f.get_or<int>("n_qubits", 20);
        }
        const auto rc = read_class(f, "resource_class", ResourceClass::cpu);
        motifs::CircuitExecutionOptions opt;
        opt.depth = f.get_or<int>("depth", opt.depth);
        opt.fixed_seconds = f.maybe<double>("fixed_seconds");
        f.finish();
        spec = guarded("workload", [&] {
          return motifs::gen_circuit_execution(n_circuits, range, rc, opt);
        });
        break;
      }
      case motifs::Motif::circuit_cutting: {
        if (task_count) throw ScenarioError("workload: the tasks axis does not apply to circuit cutting");
        const int n = f.get<int>("n");
        const int k = f.get<int>("k");
        auto family = perfmodel::CircuitFamily::linear;
        if (f.has("family")) {
          const auto text = f.get<std::string>("family");
          family = guarded("workload.family", [&] { return perfmodel::parse_circuit_family(text); });
        }
        motifs::CircuitCuttingOptions opt;
        opt.subexperiment_class = read_class(f, "subexperiment_class", ResourceClass::any);
        opt.reconstruction_class = read_class(f, "reconstruction_class", ResourceClass::any);
        opt.reconstruction_seconds = f.get_or<double>("reconstruction_seconds", 1.0);
        f.finish();
        spec = guarded("workload", [&] { return motifs::gen_circuit_cutting(n, k, family, opt); });
        break;
      }
      case motifs::Motif::pipeline: {
        const json& stages = f.raw("stages");
        if (!stages.is_array()) Fields::fail("workload.stages", "expected a list");
        std::vector<motifs::StageSpec> specs;
        for (std::size_t i = 0; i < stages.size(); ++i) {
          const std::string path = "workload.stages[" + std::to_string(i) + "]";
          Fields st(stages[i], path);
          motifs::StageSpec stage;
          stage.name = st.get_or<std::string>("name", "stage" + std::to_string(i));
          stage.n_tasks = task_count.value_or(st.get_or<int>("n_tasks", 1));
          stage.resource_class = read_class(st, "resource_class", ResourceClass::any);
          if (st.has("cost")) {
            const json& c = st.raw("cost");
            stage.cost = guarded(st.at("cost"), [&] { return motifs::cost_from_json(c); });
          }
          st.finish();
          specs.push_back(std::move(stage));
        }
        f.finish();
        spec = guarded("workload", [&] { return motifs::gen_pipeline(specs); });
        break;
      }
      case motifs::Motif::sequential_vqa: {
        const int iterations = task_count.value_or(f.get_or<int>("iterations", 1));
        perfmodel::CircuitSpec circuit;
        circuit.n_qubits = f.get<int>("n_qubits");
        circuit.depth = f.get_or<int>("depth", 10);
        motifs::VqaOptions opt;
        opt.classical_seconds = f.get_or<double>("classical_seconds", opt.classical_seconds);
        opt.quantum_class = read_class(f, "quantum_class", ResourceClass::any);
        opt.classical_class = read_class(f, "classical_class", ResourceClass::any);
        f.finish();
        spec = guarded("workload", [&] {
          return motifs::gen_sequential_vqa(iterations, circuit, opt);
        });
        break;
      }
    }
  }
  if (w.jitter > 0.0) motifs::apply_jitter(spec, w.jitter, s.seed);
  return spec;
}

}  // namespace qpilot::cli
