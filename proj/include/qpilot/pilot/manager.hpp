#pragma once

// Pilot-Manager: owns pilots and tasks, and binds ready tasks to pilots at
// dispatch time (late binding). It holds no clock of its own; the simulation
// engine passes the current time into every call.

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qpilot/common/sim_time.hpp"
#include "qpilot/motifs/workload.hpp"
#include "qpilot/pilot/pilot.hpp"

namespace qpilot::pilot {

using motifs::TaskId;

enum class PilotState { pending, active, done, failed };
enum class TaskState { created, queued, running, done, failed };

std::string_view to_string(PilotState state);
std::string_view to_string(TaskState state);

enum class SchedulingPolicy { round_robin, least_loaded, memory_aware_least_loaded };

std::string_view to_string(SchedulingPolicy policy);
SchedulingPolicy parse_scheduling_policy(std::string_view text);

struct Pilot {
  PilotId id = 0;
  PilotDescription description;
  PilotState state = PilotState::pending;
  int busy_slots = 0;
  std::vector<bool> slot_busy;
  SimTime submitted_at;
  std::optional<SimTime> active_since;
  std::optional<SimTime> expires_at;
  std::optional<SimTime> ended_at;
  std::optional<SimTime> session_ready_at;  // session access mode only

  int free_slots() const { return description.slots - busy_slots; }
  bool usable(SimTime now) const {
    return state == PilotState::active && (!expires_at || now < *expires_at);
  }
  bool terminal() const { return state == PilotState::done || state == PilotState::failed; }
};

// Empty member list means every pilot.
struct Pool {
  std::vector<PilotId> members;
};
using TaskTarget = std::variant<PilotId, Pool>;

struct TaskRecord {
  motifs::TaskSpec spec;
  TaskState state = TaskState::created;
  TaskTarget target = Pool{};
  std::optional<PilotId> assigned_pilot;
  std::optional<PilotId> preferred_pilot;  // round-robin rotation slot
  std::optional<int> slot;
  int attempts = 0;
  std::size_t deps_remaining = 0;
  std::vector<TaskId> dependents;
  std::optional<SimTime> submitted_at;
  std::optional<SimTime> bound_at;
  std::optional<SimTime> started_at;
  std::optional<SimTime> finished_at;
  std::string failure_reason;

  bool bound() const { return assigned_pilot.has_value(); }
};

struct Binding {
  TaskId task = 0;
  PilotId pilot = 0;
  friend bool operator==(const Binding&, const Binding&) = default;
};

// Outcome of an interrupted attempt.
struct Interruption {
  TaskId task = 0;
  bool requeued = false;
  std::vector<TaskId> failed;  // the task and its dependents, when not requeued
};

class PilotManager {
 public:
  explicit PilotManager(int retries = 0);

  PilotId submit_pilot(const PilotDescription& desc, SimTime now);
  void activate_pilot(PilotId id, SimTime now);
  // Walltime reached: the pilot is DONE and every task bound to it loses its
  // attempt. Returns those tasks and whether each was requeued.
  std::vector<Interruption> expire_pilot(PilotId id, SimTime now);
  std::vector<Interruption> fail_pilot(PilotId id, SimTime now, const std::string& reason);
  void close_pilots(SimTime now);

  // Dependencies must name already-submitted tasks. Direct targets must match
  // the task's resource class.
  TaskId submit_task(motifs::TaskSpec spec, TaskTarget target, SimTime now);

  // Binds ready tasks in ascending id order to usable pilots with free slots.
  std::vector<Binding> dispatch(SchedulingPolicy policy, SimTime now);

  void start_task(TaskId id, SimTime now);
  // Marks the task DONE and returns dependents that became ready.
  std::vector<TaskId> finish_task(TaskId id, SimTime now);
  // Ends the current attempt. Requeues when retries remain, otherwise fails the
  // task and, transitively, everything depending on it. Returns tasks that
  // reached FAILED as a result (the task itself first, if it did).
  std::vector<TaskId> fail_attempt(TaskId id, SimTime now, const std::string& reason,
                                   bool* requeued = nullptr);
  // Fails every task that has not finished, e.g. at the end of a simulation.
  std::vector<TaskId> fail_unfinished(SimTime now);

  const Pilot& pilot(PilotId id) const { return pilots_.at(id); }
  const TaskRecord& task(TaskId id) const { return tasks_.at(id); }
  std::span<const Pilot> pilots() const { return pilots_; }
  std::span<const TaskRecord> tasks() const { return tasks_; }

  /// Queued, unbound tasks whose dependencies are done, ascending id.
  const std::set<TaskId>& ready_tasks() const { return ready_; }
  /// Queued tasks not yet bound to a pilot, ready or not.
  std::size_t backlog() const { return unbound_queued_; }
  int retries() const { return retries_; }

  /// Candidate pilots of a task: its target filtered by resource class.
  std::vector<PilotId> candidates(const TaskRecord& task) const;
  /// Whether binding `task` to `p` now would be allowed under `policy`.
  bool can_bind(const TaskRecord& task, const Pilot& p, SchedulingPolicy policy, SimTime now) const;

  /// Why a queued task could not run; used for end-of-run diagnostics.
  std::string diagnose(TaskId id) const;

 private:
  std::optional<PilotId> choose_pilot(TaskRecord& task, SchedulingPolicy policy, SimTime now);
  void bind(TaskRecord& task, Pilot& p, SimTime now);
  void release_slot(TaskRecord& task);
  std::vector<Interruption> interrupt_pilot(Pilot& p, SimTime now, const std::string& reason);
  void cascade_failure(TaskId root, SimTime now, std::vector<TaskId>& failed);

  int retries_;
  std::vector<Pilot> pilots_;
  std::vector<TaskRecord> tasks_;
  std::set<TaskId> ready_;
  std::size_t unbound_queued_ = 0;
  std::uint64_t rotation_ = 0;
};

}  // namespace qpilot::pilot
