#include <doctest.h>

#include <set>
#include <sstream>

#include "../support/oracle.hpp"
#include "qpilot/perfmodel/accuracy.hpp"

using namespace qpilot::perfmodel;

TEST_CASE("synthetic benchmark shape") {
  const auto rows = oracle::synthetic_benchmark(1, 0.1);
  CHECK(rows.size() == 165);
  std::size_t gpu = 0;
  for (const auto& r : rows) gpu += r.kind == BackendKind::gpu;
  CHECK(gpu == 80);
}

TEST_CASE("labels use the best measured k per configuration") {
  std::vector<Measurement> rows = {
      {BackendKind::gpu, "A", 36, 18, 1, 8, 10.0}, {BackendKind::gpu, "A", 36, 12, 2, 8, 30.0},
      {BackendKind::gpu, "A", 36, 9, 3, 8, 30.0},  {BackendKind::gpu, "B", 36, 18, 1, 8, 50.0},
      {BackendKind::gpu, "B", 36, 12, 2, 8, 40.0},
  };
  const auto cases = label_measurements(rows);
  REQUIRE(cases.size() == 5);
  CHECK(cases[0].k_opt == 2);  // tie between k=2 and k=3 goes to 2
  CHECK(cases[2].k_opt == 2);
  CHECK(cases[3].k_opt == 1);
}

TEST_CASE("a model scored against its own noise-free labels is perfect") {
  const auto rows = oracle::synthetic_benchmark(4, 0.0);
  std::vector<Measurement> cpu;
  for (const auto& r : rows) {
    if (r.device == "CPU") cpu.push_back(r);
  }
  const auto cases = label_measurements(cpu);
  ResourceProfile truth;
  truth.kind = BackendKind::cpu;
  truth.mem_per_worker_bytes = 2ULL << 30;
  truth.eta_max = 0.6;
  truth.p = 0.75;
  CHECK(cut_selection_accuracy(truth, cases) == 1.0);
  CHECK_THROWS(cut_selection_accuracy(truth, std::vector<LabeledCase>{}));
}

TEST_CASE("stratified split keeps proportions per stratum and is seeded") {
  const auto rows = oracle::synthetic_benchmark(2, 0.1);
  const auto a = stratified_split(rows, 0.7, 5);
  const auto b = stratified_split(rows, 0.7, 5);
  const auto c = stratified_split(rows, 0.7, 6);
  CHECK(a.train == b.train);
  CHECK(a.train != c.train);
  CHECK(a.train.size() + a.test.size() == rows.size());
  std::set<std::size_t> all(a.train.begin(), a.train.end());
  all.insert(a.test.begin(), a.test.end());
  CHECK(all.size() == rows.size());
  // Strata sizes: GPU n=34 and n=36 have 40 rows, CPU n=36 45, CPU n=34 40.
  CHECK(a.train.size() == 28 + 28 + 32 + 28);
  CHECK_THROWS(stratified_split(rows, 1.0, 1));
}

TEST_CASE("split evaluation reports general and device models") {
  const auto rows = oracle::synthetic_benchmark(3, 0.1);
  const auto r = evaluate_split(rows, 0.7, 3);
  CHECK(r.train_rows == 116);
  CHECK(r.test_rows == 49);
  REQUIRE(r.general_all);
  REQUIRE(r.general_gpu);
  REQUIRE(r.general_cpu);
  REQUIRE(r.specific_gpu);
  REQUIRE(r.specific_cpu);
  CHECK(*r.general_all >= 0.0);
  CHECK(*r.general_all <= 1.0);
}

TEST_CASE("evaluation CSV formats") {
  std::stringstream cases("kind,n,workers,k_opt\ngpu,36,8,2\ncpu,36,224,2\n");
  const auto in = read_evaluation_csv(cases);
  CHECK(in.measurements.empty());
  REQUIRE(in.cases.size() == 2);
  CHECK(in.cases[1].workers == 224);

  const auto rows = oracle::synthetic_benchmark(1, 0.1);
  std::stringstream ss;
  write_measurements_csv(ss, rows);
  const auto back = read_evaluation_csv(ss);
  CHECK(back.measurements.size() == rows.size());
  CHECK(back.cases.size() == rows.size());

  std::stringstream empty("kind,n,workers,k_opt\n");
  CHECK_THROWS(read_evaluation_csv(empty));
  std::stringstream unknown("a,b\n1,2\n");
  CHECK_THROWS(read_evaluation_csv(unknown));
}
