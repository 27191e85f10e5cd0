#include <doctest.h>

#include <algorithm>
#include <set>

#include "qpilot/motifs/generators.hpp"
#include "qpilot/motifs/workload.hpp"
#include "qpilot/motifs/workload_io.hpp"

using namespace qpilot;
using namespace qpilot::motifs;

namespace {

// Each task depends on exactly its predecessor, so no two tasks can run together.
bool is_chain(const WorkloadSpec& w) {
  for (std::size_t i = 1; i < w.tasks.size(); ++i) {
    if (w.tasks[i].deps != std::vector<TaskId>{static_cast<TaskId>(i - 1)}) return false;
  }
  return w.tasks.empty() || w.tasks[0].deps.empty();
}

}  // namespace

TEST_CASE("circuit execution") {
  const auto w = gen_circuit_execution(1024, {2, 28, 1}, ResourceClass::cpu);
  CHECK(w.tasks.size() == 1024);
  CHECK(edge_count(w) == 0);
  std::set<int> widths;
  for (const auto& t : w.tasks) {
    const auto& sv = std::get<StatevectorCost>(t.cost);
    CHECK(sv.n_qubits >= 2);
    CHECK(sv.n_qubits <= 28);
    CHECK(t.mem_bytes == (std::uint64_t{16} << sv.n_qubits));
    widths.insert(sv.n_qubits);
  }
  CHECK(widths.size() == 27);
  validate(w);

  CHECK(gen_circuit_execution(1, {5, 5, 1}, ResourceClass::gpu).tasks.size() == 1);

  const auto same = gen_circuit_execution(4, {3, 3, 1}, ResourceClass::cpu);
  for (const auto& t : same.tasks) CHECK(t.cost == same.tasks[0].cost);

  const auto qpu = gen_circuit_execution(6, {2, 12, 5}, ResourceClass::qpu);
  for (const auto& t : qpu.tasks) {
    const auto& c = std::get<QpuCost>(t.cost);
    CHECK(c.depth == 10);
    CHECK(t.mem_bytes == 0);
  }
  CHECK_THROWS(gen_circuit_execution(4, {5, 3, 1}, ResourceClass::cpu));
  CHECK_THROWS(gen_circuit_execution(0, {5, 5, 1}, ResourceClass::cpu));
}

TEST_CASE("circuit cutting") {
  const auto w = gen_circuit_cutting(36, 2, perfmodel::CircuitFamily::linear);
  REQUIRE(w.tasks.size() == 82);
  for (std::size_t i = 0; i < 81; ++i) {
    CHECK(std::get<StatevectorCost>(w.tasks[i].cost).n_qubits == 12);
    CHECK(w.tasks[i].deps.empty());
    CHECK(w.tasks[i].kind == TaskKind::quantum_circuit);
  }
  const auto& recon = w.tasks.back();
  CHECK(recon.kind == TaskKind::reconstruction);
  CHECK(recon.deps.size() == 81);
  CHECK(edge_count(w) == 81);

  CHECK(gen_circuit_cutting(20, 1, perfmodel::CircuitFamily::linear).tasks.size() == 10);
  const auto big = gen_circuit_cutting(34, 5, perfmodel::CircuitFamily::linear);
  CHECK(big.tasks.size() == 59050);
  CHECK(big.tasks.back().deps.size() == 59049);
  CHECK_THROWS(gen_circuit_cutting(5, 5, perfmodel::CircuitFamily::linear));
  CHECK_THROWS(gen_circuit_cutting(5, 0, perfmodel::CircuitFamily::linear));
  CHECK_THROWS(gen_circuit_cutting(40, 8, perfmodel::CircuitFamily::linear));
}

TEST_CASE("pipeline") {
  std::vector<StageSpec> three = {{"a", 10, ResourceClass::cpu, FixedCost{1}},
                                  {"b", 10, ResourceClass::gpu, StatevectorCost{20}},
                                  {"c", 10, ResourceClass::cpu, FixedCost{2}}};
  const auto w = gen_pipeline(three);
  CHECK(w.tasks.size() == 32);
  const auto barriers = std::count_if(w.tasks.begin(), w.tasks.end(), [](const TaskSpec& t) {
    return t.kind == TaskKind::stage_barrier;
  });
  CHECK(barriers == 2);
  // Every stage-b task comes after every stage-a task in topological order.
  const auto order = topological_order(w);
  std::vector<std::size_t> pos(w.tasks.size());
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
  std::size_t last_a = 0, first_b = w.tasks.size();
  for (const auto& t : w.tasks) {
    if (t.name.rfind("a-", 0) == 0) last_a = std::max(last_a, pos[t.id]);
    if (t.name.rfind("b-", 0) == 0) first_b = std::min(first_b, pos[t.id]);
  }
  CHECK(last_a < first_b);

  std::vector<StageSpec> one = {{"only", 1, ResourceClass::cpu, FixedCost{1}}};
  const auto single = gen_pipeline(one);
  CHECK(single.tasks.size() == 1);

  std::vector<StageSpec> two = {{"sweep", 60000, ResourceClass::cpu, FixedCost{1}},
                                {"bfgs", 60000, ResourceClass::cpu, FixedCost{1}}};
  const auto big = gen_pipeline(two);
  CHECK(big.tasks.size() == 120001);
  CHECK(edge_count(big) == 120000);
  CHECK_THROWS(gen_pipeline(std::vector<StageSpec>{}));
}

TEST_CASE("sequential vqa") {
  const auto one = gen_sequential_vqa(1, {13, 4, perfmodel::CircuitFamily::linear});
  CHECK(one.tasks.size() == 2);
  const auto w = gen_sequential_vqa(50, {13, 4, perfmodel::CircuitFamily::linear});
  CHECK(w.tasks.size() == 100);
  CHECK(longest_path(w) == 100);
  CHECK(is_chain(w));
  const auto three = gen_sequential_vqa(3, {13, 4, perfmodel::CircuitFamily::linear});
  for (const auto& t : three.tasks) {
    if (t.kind == TaskKind::quantum_circuit) {
      CHECK(std::get<StatevectorCost>(t.cost).n_qubits == 13);
    } else {
      CHECK(t.kind == TaskKind::classical_compute);
    }
  }
}

TEST_CASE("validation catches cycles and bad tasks") {
  auto w = gen_sequential_vqa(2, {5, 1, perfmodel::CircuitFamily::linear});
  w.tasks[0].deps.push_back(3);
  CHECK_THROWS_AS(validate(w), CycleError);
  CHECK_THROWS_AS(topological_order(w), CycleError);

  auto bad = gen_circuit_execution(2, {5, 5, 1}, ResourceClass::cpu);
  bad.tasks[1].mem_bytes = 1;
  CHECK_THROWS(validate(bad));
  bad = gen_circuit_execution(2, {5, 5, 1}, ResourceClass::cpu);
  bad.tasks[1].deps.push_back(7);
  CHECK_THROWS(validate(bad));
}

TEST_CASE("jitter is seeded per task") {
  auto a = gen_circuit_execution(50, {10, 10, 1}, ResourceClass::cpu);
  auto b = a;
  auto c = a;
  apply_jitter(a, 0.2, 9);
  apply_jitter(b, 0.2, 9);
  apply_jitter(c, 0.2, 10);
  CHECK(a == b);
  CHECK_FALSE(a == c);
  for (const auto& t : a.tasks) {
    CHECK(t.jitter >= 0.8);
    CHECK(t.jitter <= 1.2);
  }
  apply_jitter(a, 0.0, 9);
  for (const auto& t : a.tasks) CHECK(t.jitter == 1.0);
  CHECK_THROWS(apply_jitter(a, 1.0, 1));
}

TEST_CASE("workload JSON round trip") {
  std::vector<StageSpec> stages = {{"a", 3, ResourceClass::cpu, FixedCost{1.5}},
                                   {"b", 2, ResourceClass::qpu, QpuCost{5, 7, 35}}};
  auto w = gen_pipeline(stages);
  apply_jitter(w, 0.1, 4);
  const auto doc = workload_to_json(w);
  CHECK(doc.at("edges").size() == edge_count(w));
  const auto back = workload_from_json(nlohmann::json::parse(doc.dump()));
  CHECK(back == w);

  auto broken = doc;
  broken["extra"] = 1;
  CHECK_THROWS(workload_from_json(broken));
  auto cyclic = doc;
  cyclic["edges"].push_back({4, 0});
  CHECK_THROWS(workload_from_json(cyclic));
}
