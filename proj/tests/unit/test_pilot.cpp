#include <doctest.h>

#include "qpilot/pilot/manager.hpp"
#include "qpilot/pilot/pilot.hpp"

using namespace qpilot;
using namespace qpilot::pilot;

namespace {

PilotDescription desc(ResourceClass rc, int slots, std::uint64_t mem = kUnlimitedMemory) {
  PilotDescription d;
  d.resource_class = rc;
  d.slots = slots;
  d.mem_per_slot_bytes = mem;
  return d;
}

motifs::TaskSpec task(TaskId id, ResourceClass rc = ResourceClass::any, std::vector<TaskId> deps = {},
                      std::uint64_t mem = 0) {
  motifs::TaskSpec t;
  t.id = id;
  t.resource_class = rc;
  t.deps = std::move(deps);
  t.mem_bytes = mem;
  return t;
}

const SimTime t0{};

}  // namespace

TEST_CASE("pilot descriptions are validated") {
  CHECK_NOTHROW(desc(ResourceClass::cpu, 4).validate());
  CHECK_THROWS(desc(ResourceClass::cpu, 0).validate());
  CHECK_THROWS(desc(ResourceClass::any, 1).validate());
  auto d = desc(ResourceClass::cpu, 1);
  d.startup_delay = -1;
  CHECK_THROWS(d.validate());
  d = desc(ResourceClass::cpu, 1);
  d.access_mode = AccessMode::session;
  CHECK_THROWS(d.validate());
  d = desc(ResourceClass::qpu, 2);
  d.access_mode = AccessMode::shared_remote;
  CHECK_THROWS(d.validate());
  d.slots = 1;
  CHECK_NOTHROW(d.validate());
  d.queue_delay = QueueDelayModel::uniform(5, 1);
  CHECK_THROWS(d.validate());
  d = desc(ResourceClass::cpu, 1);
  d.walltime = 0.0;
  CHECK_THROWS(d.validate());
}

TEST_CASE("default startup delays") {
  CHECK(default_startup_delay(ResourceClass::cpu) == 37.0);
  CHECK(default_startup_delay(ResourceClass::gpu) == 37.0);
  CHECK(default_startup_delay(ResourceClass::qpu) == 0.0);
}

TEST_CASE("qpu access delays") {
  Rng rng(1);
  auto d = desc(ResourceClass::qpu, 1);
  CHECK(qpu_access_delay(d, false, rng) == 0.0);
  d.access_mode = AccessMode::shared_remote;
  d.queue_delay = QueueDelayModel::constant(30);
  CHECK(qpu_access_delay(d, false, rng) == 30.0);
  d.queue_delay = QueueDelayModel::exponential(60);
  Rng a(77), b(77);
  for (int i = 0; i < 20; ++i) {
    const double x = qpu_access_delay(d, false, a);
    CHECK(x == qpu_access_delay(d, false, b));
    CHECK(x >= 0.0);
  }
  d.queue_delay = QueueDelayModel::uniform(2, 4);
  for (int i = 0; i < 20; ++i) {
    const double x = qpu_access_delay(d, false, rng);
    CHECK(x >= 2.0);
    CHECK(x <= 4.0);
  }
  d.access_mode = AccessMode::session;
  d.session_setup_delay = 12;
  CHECK(qpu_access_delay(d, false, rng) == 12.0);
  CHECK(qpu_access_delay(d, true, rng) == 0.0);
}

TEST_CASE("dispatch overhead grows with backlog") {
  DispatchOverheadModel m;
  CHECK(m.seconds(0) == m.base_seconds);
  CHECK(m.seconds(1000) > m.seconds(10));
  m.base_seconds = -1;
  CHECK_THROWS(m.validate());
}

TEST_CASE("pilot lifecycle and walltime") {
  PilotManager m;
  auto d = desc(ResourceClass::cpu, 1);
  d.walltime = 100;
  const auto id = m.submit_pilot(d, t0);
  CHECK(m.pilot(id).state == PilotState::pending);
  m.submit_task(task(0), Pool{}, t0);
  CHECK(m.dispatch(SchedulingPolicy::least_loaded, t0).empty());
  m.activate_pilot(id, SimTime::from_seconds(37));
  CHECK(m.pilot(id).state == PilotState::active);
  CHECK_THROWS(m.activate_pilot(id, SimTime::from_seconds(38)));
  // Past expiry the pilot no longer accepts work even before it is marked done.
  CHECK(m.dispatch(SchedulingPolicy::least_loaded, SimTime::from_seconds(150)).empty());
  CHECK(m.dispatch(SchedulingPolicy::least_loaded, SimTime::from_seconds(50)).size() == 1);
}

TEST_CASE("direct targets and errors") {
  PilotManager m;
  m.submit_pilot(desc(ResourceClass::cpu, 2), t0);
  m.submit_pilot(desc(ResourceClass::gpu, 2), t0);
  m.activate_pilot(0, t0);
  m.activate_pilot(1, t0);
  CHECK_THROWS(m.submit_task(task(0), PilotId{5}, t0));
  CHECK_THROWS(m.submit_task(task(0, ResourceClass::gpu), PilotId{0}, t0));
  m.submit_task(task(0, ResourceClass::cpu), PilotId{0}, t0);
  m.submit_task(task(1), PilotId{1}, t0);
  const auto b = m.dispatch(SchedulingPolicy::least_loaded, t0);
  REQUIRE(b.size() == 2);
  CHECK(b[0] == Binding{0, 0});
  CHECK(b[1] == Binding{1, 1});
  CHECK_THROWS(m.submit_task(task(5), Pool{}, t0));           // id out of order
  CHECK_THROWS(m.submit_task(task(2, ResourceClass::any, {9}), Pool{}, t0));
}

TEST_CASE("round robin spreads over idle pilots in id order") {
  PilotManager m;
  for (int i = 0; i < 3; ++i) m.activate_pilot(m.submit_pilot(desc(ResourceClass::cpu, 4), t0), t0);
  for (TaskId i = 0; i < 3; ++i) m.submit_task(task(i), Pool{}, t0);
  const auto b = m.dispatch(SchedulingPolicy::round_robin, t0);
  REQUIRE(b.size() == 3);
  for (TaskId i = 0; i < 3; ++i) CHECK(b[i] == Binding{i, i});
}

TEST_CASE("least loaded picks the emptiest pilot") {
  PilotManager m;
  for (int i = 0; i < 3; ++i) m.activate_pilot(m.submit_pilot(desc(ResourceClass::cpu, 4), t0), t0);
  // Loads (2, 0, 1) through direct targets.
  TaskId next = 0;
  for (PilotId p : {0u, 0u, 2u}) m.submit_task(task(next++), p, t0);
  m.dispatch(SchedulingPolicy::least_loaded, t0);
  CHECK(m.pilot(0).busy_slots == 2);
  CHECK(m.pilot(2).busy_slots == 1);
  m.submit_task(task(next), Pool{}, t0);
  const auto b = m.dispatch(SchedulingPolicy::least_loaded, t0);
  REQUIRE(b.size() == 1);
  CHECK(b[0].pilot == 1);
}

TEST_CASE("least loaded binds to the idle one of two pilots") {
  PilotManager m;
  m.activate_pilot(m.submit_pilot(desc(ResourceClass::cpu, 1), t0), t0);
  m.activate_pilot(m.submit_pilot(desc(ResourceClass::cpu, 1), t0), t0);
  m.submit_task(task(0), PilotId{0}, t0);
  m.dispatch(SchedulingPolicy::least_loaded, t0);
  m.submit_task(task(1), Pool{}, t0);
  const auto b = m.dispatch(SchedulingPolicy::least_loaded, t0);
  REQUIRE(b.size() == 1);
  CHECK(b[0].pilot == 1);
}

TEST_CASE("memory-aware placement") {
  PilotManager m;
  m.activate_pilot(m.submit_pilot(desc(ResourceClass::gpu, 4, 80'000'000'000ULL), t0), t0);
  m.activate_pilot(m.submit_pilot(desc(ResourceClass::gpu, 4, 180'000'000'000ULL), t0), t0);
  const std::uint64_t need = (std::uint64_t{1} << 33) * 16;
  for (TaskId i = 0; i < 6; ++i) m.submit_task(task(i, ResourceClass::gpu, {}, need), Pool{}, t0);
  const auto b = m.dispatch(SchedulingPolicy::memory_aware_least_loaded, t0);
  CHECK(b.size() == 4);
  for (const auto& x : b) CHECK(x.pilot == 1);
  CHECK(m.ready_tasks().size() == 2);
}

TEST_CASE("dependencies gate readiness and failures cascade") {
  PilotManager m;
  m.activate_pilot(m.submit_pilot(desc(ResourceClass::cpu, 4), t0), t0);
  m.submit_task(task(0), Pool{}, t0);
  m.submit_task(task(1, ResourceClass::any, {0}), Pool{}, t0);
  m.submit_task(task(2, ResourceClass::any, {1}), Pool{}, t0);
  CHECK(m.ready_tasks().size() == 1);
  CHECK(m.backlog() == 3);
  auto b = m.dispatch(SchedulingPolicy::least_loaded, t0);
  REQUIRE(b.size() == 1);
  CHECK(m.backlog() == 2);
  CHECK_THROWS(m.start_task(1, t0));
  m.start_task(0, t0);
  const auto ready = m.finish_task(0, SimTime::from_seconds(1));
  CHECK(ready == std::vector<TaskId>{1});
  b = m.dispatch(SchedulingPolicy::least_loaded, SimTime::from_seconds(1));
  m.start_task(1, SimTime::from_seconds(1));
  const auto failed = m.fail_attempt(1, SimTime::from_seconds(2), "boom");
  CHECK(failed == std::vector<TaskId>{1, 2});
  CHECK(m.task(2).state == TaskState::failed);
  CHECK(m.backlog() == 0);
  CHECK(m.pilot(0).busy_slots == 0);
}

TEST_CASE("walltime expiry fails bound tasks unless retries remain") {
  for (int retries : {0, 1}) {
    PilotManager m(retries);
    auto d = desc(ResourceClass::cpu, 1);
    d.walltime = 10;
    m.activate_pilot(m.submit_pilot(d, t0), t0);
    m.activate_pilot(m.submit_pilot(desc(ResourceClass::cpu, 1), t0), t0);
    m.submit_task(task(0), PilotId{0}, t0);
    m.submit_task(task(1), Pool{}, t0);
    m.dispatch(SchedulingPolicy::least_loaded, t0);
    m.start_task(0, t0);
    const auto out = m.expire_pilot(0, SimTime::from_seconds(10));
    REQUIRE(out.size() == 1);
    CHECK(out[0].task == 0);
    CHECK(out[0].requeued == (retries == 1));
    CHECK(m.task(0).state == (retries == 1 ? TaskState::queued : TaskState::failed));
    CHECK(m.pilot(0).state == PilotState::done);
  }
}

TEST_CASE("unplaceable tasks are diagnosed") {
  PilotManager m;
  m.activate_pilot(m.submit_pilot(desc(ResourceClass::cpu, 1), t0), t0);
  m.submit_task(task(0, ResourceClass::qpu), Pool{}, t0);
  CHECK(m.dispatch(SchedulingPolicy::least_loaded, t0).empty());
  CHECK(m.task(0).state == TaskState::queued);
  const auto failed = m.fail_unfinished(SimTime::from_seconds(5));
  CHECK(failed == std::vector<TaskId>{0});
  CHECK(m.task(0).failure_reason.find("no eligible pilot") != std::string::npos);
}

TEST_CASE("policy names") {
  for (auto p : {SchedulingPolicy::round_robin, SchedulingPolicy::least_loaded,
                 SchedulingPolicy::memory_aware_least_loaded}) {
    CHECK(parse_scheduling_policy(to_string(p)) == p);
  }
  CHECK_THROWS(parse_scheduling_policy("fifo"));
}
