#include "qpilot/pilot/manager.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace qpilot::pilot {

std::string_view to_string(PilotState state) {
  switch (state) {
    case PilotState::pending: return "PENDING";
    case PilotState::active: return "ACTIVE";
    case PilotState::done: return "DONE";
    case PilotState::failed: return "FAILED";
  }
  return "?";
}

std::string_view to_string(TaskState state) {
  switch (state) {
    case TaskState::created: return "NEW";
    case TaskState::queued: return "QUEUED";
    case TaskState::running: return "RUNNING";
    case TaskState::done: return "DONE";
    case TaskState::failed: return "FAILED";
  }
  return "?";
}

std::string_view to_string(SchedulingPolicy policy) {
  switch (policy) {
    case SchedulingPolicy::round_robin: return "round_robin";
    case SchedulingPolicy::least_loaded: return "least_loaded";
    case SchedulingPolicy::memory_aware_least_loaded: return "memory_aware_least_loaded";
  }
  return "?";
}

SchedulingPolicy parse_scheduling_policy(std::string_view text) {
  if (text == "round_robin") return SchedulingPolicy::round_robin;
  if (text == "least_loaded") return SchedulingPolicy::least_loaded;
  if (text == "memory_aware_least_loaded") return SchedulingPolicy::memory_aware_least_loaded;
  throw std::invalid_argument("unknown scheduling policy '" + std::string(text) + "'");
}

PilotManager::PilotManager(int retries) : retries_(retries) {
  if (retries < 0) throw std::invalid_argument("retries must be >= 0");
}

PilotId PilotManager::submit_pilot(const PilotDescription& desc, SimTime now) {
  desc.validate();
  Pilot p;
  p.id = static_cast<PilotId>(pilots_.size());
  p.description = desc;
  p.slot_busy.assign(static_cast<std::size_t>(desc.slots), false);
  p.submitted_at = now;
  pilots_.push_back(std::move(p));
  return pilots_.back().id;
}

void PilotManager::activate_pilot(PilotId id, SimTime now) {
  Pilot& p = pilots_.at(id);
  if (p.state != PilotState::pending) {
    throw std::logic_error("pilot " + std::to_string(id) + " activated twice");
  }
  p.state = PilotState::active;
  p.active_since = now;
  if (p.description.walltime) p.expires_at = now + SimTime::from_seconds(*p.description.walltime);
}

std::vector<Interruption> PilotManager::interrupt_pilot(Pilot& p, SimTime now,
                                                        const std::string& reason) {
  std::vector<Interruption> out;
  for (auto& t : tasks_) {
    if (t.assigned_pilot != p.id) continue;
    if (t.state != TaskState::queued && t.state != TaskState::running) continue;
    Interruption i;
    i.task = t.spec.id;
    i.failed = fail_attempt(t.spec.id, now, reason, &i.requeued);
    out.push_back(std::move(i));
  }
  p.ended_at = now;
  return out;
}

std::vector<Interruption> PilotManager::expire_pilot(PilotId id, SimTime now) {
  Pilot& p = pilots_.at(id);
  if (p.terminal()) return {};
  p.state = PilotState::done;
  return interrupt_pilot(p, now, "pilot " + std::to_string(id) + " walltime expired");
}

std::vector<Interruption> PilotManager::fail_pilot(PilotId id, SimTime now,
                                                   const std::string& reason) {
  Pilot& p = pilots_.at(id);
  if (p.terminal()) return {};
  p.state = PilotState::failed;
  return interrupt_pilot(p, now, reason);
}

void PilotManager::close_pilots(SimTime now) {
  for (auto& p : pilots_) {
    if (p.terminal()) continue;
    if (p.state == PilotState::active) {
      p.ended_at = p.expires_at ? std::min(*p.expires_at, now) : now;
    }
    p.state = PilotState::done;
  }
}

TaskId PilotManager::submit_task(motifs::TaskSpec spec, TaskTarget target, SimTime now) {
  const auto id = static_cast<TaskId>(tasks_.size());
  if (spec.id != id) {
    throw std::invalid_argument("task ids must be submitted in order; expected " +
                                std::to_string(id) + ", got " + std::to_string(spec.id));
  }
  if (spec.resource_class != ResourceClass::any && spec.kind == motifs::TaskKind::stage_barrier) {
    throw std::invalid_argument("barrier tasks do not occupy a resource class");
  }
  if (const auto* direct = std::get_if<PilotId>(&target)) {
    if (*direct >= pilots_.size()) {
      throw std::invalid_argument("unknown pilot " + std::to_string(*direct));
    }
    const auto offered = pilots_[*direct].description.resource_class;
    if (!class_matches(spec.resource_class, offered)) {
      throw std::invalid_argument("task " + std::to_string(id) + " needs " +
                                  std::string(to_string(spec.resource_class)) + " but pilot " +
                                  std::to_string(*direct) + " is " +
                                  std::string(to_string(offered)));
    }
  } else {
    for (const auto m : std::get<Pool>(target).members) {
      if (m >= pilots_.size()) throw std::invalid_argument("unknown pilot " + std::to_string(m));
    }
  }

  TaskRecord rec;
  rec.spec = std::move(spec);
  rec.target = std::move(target);
  rec.state = TaskState::queued;
  rec.submitted_at = now;
  bool dep_failed = false;
  for (const auto d : rec.spec.deps) {
    if (d >= id) {
      throw std::invalid_argument("task " + std::to_string(id) + " depends on unsubmitted task " +
                                  std::to_string(d));
    }
    tasks_[d].dependents.push_back(id);
    if (tasks_[d].state == TaskState::failed) dep_failed = true;
    if (tasks_[d].state != TaskState::done) ++rec.deps_remaining;
  }
  tasks_.push_back(std::move(rec));
  ++unbound_queued_;
  if (dep_failed) {
    auto& t = tasks_.back();
    t.state = TaskState::failed;
    t.failure_reason = "dependency failed";
    t.finished_at = now;
    --unbound_queued_;
  } else if (tasks_.back().deps_remaining == 0) {
    ready_.insert(id);
  }
  return id;
}

std::vector<PilotId> PilotManager::candidates(const TaskRecord& task) const {
  std::vector<PilotId> out;
  const auto consider = [&](PilotId id) {
    if (class_matches(task.spec.resource_class, pilots_[id].description.resource_class)) {
      out.push_back(id);
    }
  };
  if (const auto* direct = std::get_if<PilotId>(&task.target)) {
    consider(*direct);
  } else {
    const auto& members = std::get<Pool>(task.target).members;
    if (members.empty()) {
      for (const auto& p : pilots_) consider(p.id);
    } else {
      std::vector<PilotId> sorted = members;
      std::sort(sorted.begin(), sorted.end());
      sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
      for (const auto id : sorted) consider(id);
    }
  }
  return out;
}

bool PilotManager::can_bind(const TaskRecord& task, const Pilot& p, SchedulingPolicy policy,
                            SimTime now) const {
  if (!p.usable(now) || p.free_slots() <= 0) return false;
  if (!class_matches(task.spec.resource_class, p.description.resource_class)) return false;
  if (policy == SchedulingPolicy::memory_aware_least_loaded &&
      p.description.mem_per_slot_bytes < task.spec.mem_bytes) {
    return false;
  }
  if (policy == SchedulingPolicy::round_robin && std::holds_alternative<Pool>(task.target)) {
    return task.preferred_pilot == p.id;
  }
  const auto c = candidates(task);
  return std::find(c.begin(), c.end(), p.id) != c.end();
}

std::optional<PilotId> PilotManager::choose_pilot(TaskRecord& task, SchedulingPolicy policy,
                                                  SimTime now) {
  const auto cands = candidates(task);
  if (cands.empty()) return std::nullopt;

  if (policy == SchedulingPolicy::round_robin && std::holds_alternative<Pool>(task.target)) {
    // Rotation is fixed when the task first meets a live pool, regardless of
    // load; it moves on only if the preferred pilot terminates.
    if (!task.preferred_pilot || pilots_[*task.preferred_pilot].terminal()) {
      std::vector<PilotId> live;
      for (const auto id : cands) {
        if (!pilots_[id].terminal()) live.push_back(id);
      }
      if (live.empty()) return std::nullopt;
      task.preferred_pilot = live[rotation_++ % live.size()];
    }
    const Pilot& p = pilots_[*task.preferred_pilot];
    if (p.usable(now) && p.free_slots() > 0) return p.id;
    return std::nullopt;
  }

  std::optional<PilotId> best;
  for (const auto id : cands) {
    const Pilot& p = pilots_[id];
    if (!can_bind(task, p, policy, now)) continue;
    if (!best) {
      best = id;
      continue;
    }
    const Pilot& b = pilots_[*best];
    // Compare busy/slots without division; ties go to the lower id.
    const auto lhs = static_cast<std::int64_t>(p.busy_slots) * b.description.slots;
    const auto rhs = static_cast<std::int64_t>(b.busy_slots) * p.description.slots;
    if (lhs < rhs) best = id;
  }
  return best;
}

void PilotManager::bind(TaskRecord& task, Pilot& p, SimTime now) {
  const auto free = std::find(p.slot_busy.begin(), p.slot_busy.end(), false);
  task.slot = static_cast<int>(free - p.slot_busy.begin());
  *free = true;
  ++p.busy_slots;
  task.assigned_pilot = p.id;
  task.bound_at = now;
  ++task.attempts;
  ready_.erase(task.spec.id);
  --unbound_queued_;
}

void PilotManager::release_slot(TaskRecord& task) {
  if (!task.assigned_pilot) return;
  Pilot& p = pilots_[*task.assigned_pilot];
  if (task.slot) p.slot_busy[static_cast<std::size_t>(*task.slot)] = false;
  --p.busy_slots;
  task.slot.reset();
}

std::vector<Binding> PilotManager::dispatch(SchedulingPolicy policy, SimTime now) {
  std::vector<Binding> out;
  int capacity = 0;
  for (const auto& p : pilots_) {
    if (p.usable(now)) capacity += p.free_slots();
  }
  if (capacity == 0) return out;

  // Copy: binding mutates ready_.
  const std::vector<TaskId> ready(ready_.begin(), ready_.end());
  for (const auto id : ready) {
    TaskRecord& t = tasks_[id];
    if (t.spec.kind == motifs::TaskKind::stage_barrier) continue;
    const auto chosen = choose_pilot(t, policy, now);
    if (!chosen) continue;
    bind(t, pilots_[*chosen], now);
    out.push_back({id, *chosen});
    if (--capacity == 0) break;
  }
  return out;
}

void PilotManager::start_task(TaskId id, SimTime now) {
  TaskRecord& t = tasks_.at(id);
  if (t.state != TaskState::queued) {
    throw std::logic_error("task " + std::to_string(id) + " started from state " +
                           std::string(to_string(t.state)));
  }
  const bool barrier = t.spec.kind == motifs::TaskKind::stage_barrier;
  if (!barrier && !t.bound()) {
    throw std::logic_error("task " + std::to_string(id) + " started before binding");
  }
  if (t.deps_remaining != 0) {
    throw std::logic_error("task " + std::to_string(id) + " started with pending dependencies");
  }
  if (barrier) {
    ready_.erase(id);
    --unbound_queued_;
  }
  t.state = TaskState::running;
  t.started_at = now;
}

std::vector<TaskId> PilotManager::finish_task(TaskId id, SimTime now) {
  TaskRecord& t = tasks_.at(id);
  if (t.state != TaskState::running) {
    throw std::logic_error("task " + std::to_string(id) + " finished from state " +
                           std::string(to_string(t.state)));
  }
  t.state = TaskState::done;
  t.finished_at = now;
  release_slot(t);
  std::vector<TaskId> newly_ready;
  for (const auto d : t.dependents) {
    TaskRecord& dep = tasks_[d];
    if (dep.state != TaskState::queued) continue;
    if (--dep.deps_remaining == 0) {
      ready_.insert(d);
      newly_ready.push_back(d);
    }
  }
  return newly_ready;
}

void PilotManager::cascade_failure(TaskId root, SimTime now, std::vector<TaskId>& failed) {
  std::vector<TaskId> stack(tasks_[root].dependents.begin(), tasks_[root].dependents.end());
  while (!stack.empty()) {
    const TaskId id = stack.back();
    stack.pop_back();
    TaskRecord& t = tasks_[id];
    if (t.state != TaskState::queued) continue;
    // Dependents of an unfinished task are never bound.
    t.state = TaskState::failed;
    t.failure_reason = "dependency " + std::to_string(root) + " failed";
    t.finished_at = now;
    ready_.erase(id);
    --unbound_queued_;
    failed.push_back(id);
    stack.insert(stack.end(), t.dependents.begin(), t.dependents.end());
  }
}

std::vector<TaskId> PilotManager::fail_attempt(TaskId id, SimTime now, const std::string& reason,
                                               bool* requeued) {
  TaskRecord& t = tasks_.at(id);
  if (t.state != TaskState::queued && t.state != TaskState::running) {
    throw std::logic_error("task " + std::to_string(id) + " failed from state " +
                           std::string(to_string(t.state)));
  }
  const bool was_bound = t.bound();
  release_slot(t);
  std::vector<TaskId> failed;
  if (was_bound && t.attempts <= retries_) {
    t.state = TaskState::queued;
    t.assigned_pilot.reset();
    t.preferred_pilot.reset();
    t.bound_at.reset();
    t.started_at.reset();
    t.failure_reason = reason;
    ++unbound_queued_;
    if (t.deps_remaining == 0) ready_.insert(id);
    if (requeued) *requeued = true;
    return failed;
  }
  if (requeued) *requeued = false;
  if (!was_bound) {
    ready_.erase(id);
    --unbound_queued_;
  }
  t.state = TaskState::failed;
  t.failure_reason = reason;
  t.finished_at = now;
  failed.push_back(id);
  cascade_failure(id, now, failed);
  return failed;
}

std::string PilotManager::diagnose(TaskId id) const {
  const TaskRecord& t = tasks_.at(id);
  if (t.deps_remaining > 0) return "dependencies never completed";
  const auto cands = candidates(t);
  if (cands.empty()) {
    return "no eligible pilot for resource class " +
           std::string(to_string(t.spec.resource_class));
  }
  bool memory_ok = false;
  bool alive = false;
  for (const auto id2 : cands) {
    const auto& p = pilots_[id2];
    if (p.description.mem_per_slot_bytes >= t.spec.mem_bytes) memory_ok = true;
    if (p.state == PilotState::active || p.state == PilotState::pending) alive = true;
  }
  if (!memory_ok) return "no eligible pilot with enough memory per slot";
  if (!t.failure_reason.empty()) return t.failure_reason;
  if (!alive) return "all eligible pilots ended before the task could run";
  return "not placed before the simulation ended";
}

std::vector<TaskId> PilotManager::fail_unfinished(SimTime now) {
  std::vector<TaskId> failed;
  for (auto& t : tasks_) {
    if (t.state != TaskState::queued && t.state != TaskState::running) continue;
    const std::string reason = diagnose(t.spec.id);
    const bool was_bound = t.bound();
    release_slot(t);
    if (!was_bound) {
      ready_.erase(t.spec.id);
      --unbound_queued_;
    }
    t.state = TaskState::failed;
    t.failure_reason = reason;
    t.finished_at = now;
    failed.push_back(t.spec.id);
  }
  return failed;
}

}  // namespace qpilot::pilot
