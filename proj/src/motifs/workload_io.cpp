#include "qpilot/motifs/workload_io.hpp"

#include <set>
#include <stdexcept>
#include <string>

namespace qpilot::motifs {

using nlohmann::json;

namespace {

void require_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw std::invalid_argument(where + ": expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.contains(it.key())) {
      throw std::invalid_argument(where + ": unknown key '" + it.key() + "'");
    }
  }
}

}  // namespace

json cost_to_json(const CostModel& cost) {
  return std::visit(
      [](const auto& c) -> json {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, StatevectorCost>) {
          return {{"model", "statevector"}, {"n_qubits", c.n_qubits}};
        } else if constexpr (std::is_same_v<T, QpuCost>) {
          return {{"model", "qpu"}, {"n_qubits", c.n_qubits}, {"depth", c.depth}, {"gates", c.gates}};
        } else {
          return {{"model", "fixed"}, {"seconds", c.seconds}};
        }
      },
      cost);
}

CostModel cost_from_json(const json& doc) {
  const auto model = doc.at("model").get<std::string>();
  if (model == "statevector") {
    require_keys(doc, {"model", "n_qubits"}, "statevector cost");
    return StatevectorCost{doc.at("n_qubits").get<int>()};
  }
  if (model == "qpu") {
    require_keys(doc, {"model", "n_qubits", "depth", "gates"}, "qpu cost");
    const int n = doc.at("n_qubits").get<int>();
    const int depth = doc.at("depth").get<int>();
    return QpuCost{n, depth, doc.value("gates", depth * n)};
  }
  if (model == "fixed") {
    require_keys(doc, {"model", "seconds"}, "fixed cost");
    return FixedCost{doc.at("seconds").get<double>()};
  }
  throw std::invalid_argument("unknown cost model '" + model + "'");
}

json workload_to_json(const WorkloadSpec& workload) {
  json tasks = json::array();
  json edges = json::array();
  for (const auto& t : workload.tasks) {
    tasks.push_back({{"id", t.id},
                     {"name", t.name},
                     {"kind", std::string(to_string(t.kind))},
                     {"resource_class", std::string(to_string(t.resource_class))},
                     {"cost", cost_to_json(t.cost)},
                     {"mem_bytes", t.mem_bytes},
                     {"jitter", t.jitter}});
    for (const auto d : t.deps) edges.push_back(json::array({d, t.id}));
  }
  json metadata = json::object();
  for (const auto& [k, v] : workload.metadata) metadata[k] = v;
  return {{"motif", std::string(to_string(workload.motif))},
          {"metadata", metadata},
          {"tasks", tasks},
          {"edges", edges}};
}

WorkloadSpec workload_from_json(const json& doc) {
  require_keys(doc, {"motif", "metadata", "tasks", "edges"}, "workload");
  WorkloadSpec w;
  w.motif = parse_motif(doc.at("motif").get<std::string>());
  if (doc.contains("metadata")) {
    for (auto it = doc["metadata"].begin(); it != doc["metadata"].end(); ++it) {
      w.metadata[it.key()] = it.value().get<std::string>();
    }
  }
  for (const auto& jt : doc.at("tasks")) {
    require_keys(jt, {"id", "name", "kind", "resource_class", "cost", "mem_bytes", "jitter"},
                 "task");
    TaskSpec t;
    t.id = jt.at("id").get<TaskId>();
    t.name = jt.value("name", std::string{});
    t.kind = parse_task_kind(jt.at("kind").get<std::string>());
    t.resource_class = parse_resource_class(jt.value("resource_class", std::string("any")));
    t.cost = cost_from_json(jt.at("cost"));
    t.mem_bytes = jt.contains("mem_bytes") ? jt["mem_bytes"].get<std::uint64_t>()
                                           : statevector_bytes(t.cost);
    t.jitter = jt.value("jitter", 1.0);
    w.tasks.push_back(std::move(t));
  }
  if (doc.contains("edges")) {
    for (const auto& e : doc["edges"]) {
      if (!e.is_array() || e.size() != 2) {
        throw std::invalid_argument("workload: edges must be [dependency, dependent] pairs");
      }
      const auto from = e[0].get<TaskId>();
      const auto to = e[1].get<TaskId>();
      if (to >= w.tasks.size()) {
        throw std::invalid_argument("workload: edge to unknown task " + std::to_string(to));
      }
      w.tasks[to].deps.push_back(from);
    }
  }
  validate(w);
  return w;
}

}  // namespace qpilot::motifs
