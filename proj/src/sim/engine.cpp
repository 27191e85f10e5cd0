#include "qpilot/sim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qpilot/common/rng.hpp"
#include "qpilot/sim/event_queue.hpp"

namespace qpilot::sim {

using motifs::TaskId;
using pilot::PilotId;
using pilot::PilotManager;
using pilot::TaskState;

void ExecutionCost::validate() const {
  if (!(std::isfinite(statevector_seconds) && statevector_seconds >= 0.0) ||
      !(std::isfinite(seconds_per_layer) && seconds_per_layer >= 0.0)) {
    throw std::invalid_argument("execution cost times must be >= 0");
  }
  if (reference_qubits < 1 || default_depth < 1) {
    throw std::invalid_argument("execution cost reference width and depth must be >= 1");
  }
}

const ExecutionCost& CostConfig::for_class(ResourceClass rc) const {
  switch (rc) {
    case ResourceClass::gpu: return gpu;
    case ResourceClass::qpu: return qpu;
    default: return cpu;
  }
}

ExecutionCost& CostConfig::for_class(ResourceClass rc) {
  return const_cast<ExecutionCost&>(std::as_const(*this).for_class(rc));
}

void CostConfig::validate() const {
  cpu.validate();
  gpu.validate();
  qpu.validate();
}

double service_seconds(const motifs::TaskSpec& task, ResourceClass pilot_class,
                       const CostConfig& costs) {
  const ExecutionCost& c = costs.for_class(pilot_class);
  const bool hardware = pilot_class == ResourceClass::qpu;
  const auto simulate = [&](int n) {
    return c.statevector_seconds * std::exp2(static_cast<double>(n - c.reference_qubits));
  };
  double base = 0.0;
  if (const auto* sv = std::get_if<motifs::StatevectorCost>(&task.cost)) {
    base = hardware ? c.seconds_per_layer * c.default_depth : simulate(sv->n_qubits);
  } else if (const auto* q = std::get_if<motifs::QpuCost>(&task.cost)) {
    base = hardware ? c.seconds_per_layer * q->depth : simulate(q->n_qubits);
  } else {
    base = std::get<motifs::FixedCost>(task.cost).seconds;
  }
  return base * task.jitter;
}

namespace {

constexpr std::uint64_t kQueueDelaySalt = 0x51;

class Simulation {
 public:
  Simulation(const motifs::WorkloadSpec& workload, std::span<const pilot::PilotDescription> pilots,
             SchedulingPolicy policy, std::uint64_t seed, const SimOptions& options)
      : workload_(workload),
        policy_(policy),
        seed_(seed),
        options_(options),
        manager_(options.retries),
        rng_(mix_seed(seed, kQueueDelaySalt)) {
    for (const auto& d : pilots) manager_.submit_pilot(d, SimTime{});
    const auto n_pilots = manager_.pilots().size();
    session_ready_.assign(n_pilots, std::nullopt);
    busy_.assign(n_pilots, SimTime{});
    const auto n_tasks = workload.tasks.size();
    token_.assign(n_tasks, 0);
    running_since_.assign(n_tasks, std::nullopt);
    last_start_.assign(n_tasks, std::nullopt);
    last_pilot_.assign(n_tasks, std::nullopt);
    has_barriers_ = std::any_of(workload.tasks.begin(), workload.tasks.end(), [](const auto& t) {
      return t.kind == motifs::TaskKind::stage_barrier;
    });
  }

  SimResult run() {
    for (const auto& p : manager_.pilots()) {
      queue_.push(SimTime::from_seconds(p.description.startup_delay), EventKind::pilot_active, p.id);
    }
    for (const auto& t : workload_.tasks) {
      manager_.submit_task(t, pilot::Pool{}, SimTime{});
      if (manager_.task(t.id).state == TaskState::queued && t.deps.empty()) {
        trace_.add(SimTime{}, "task_ready", t.id, std::nullopt);
      }
    }
    dispatch(SimTime{});

    while (!queue_.empty() && !all_terminal()) {
      const Event e = queue_.pop();
      now_ = e.time;
      switch (e.kind) {
        case EventKind::pilot_active: on_pilot_active(e.subject); break;
        case EventKind::pilot_expired: on_pilot_expired(e.subject); break;
        case EventKind::task_start: on_task_start(e.subject, e.token); break;
        case EventKind::task_finish: on_task_finish(e.subject, e.token); break;
      }
      dispatch(now_);
    }

    for (const auto id : manager_.fail_unfinished(now_)) {
      const auto& rec = manager_.task(id);
      if (running_since_[id]) add_busy(id);
      trace_.add(now_, "task_failed", id, last_pilot_[id], rec.failure_reason);
    }
    manager_.close_pilots(now_);
    trace_.add(now_, "sim_end", std::nullopt, std::nullopt);
    return finish();
  }

 private:
  bool all_terminal() const { return terminal_count_ == workload_.tasks.size(); }

  void note_failed(const std::vector<TaskId>& failed) {
    for (const auto id : failed) {
      ++terminal_count_;
      if (running_since_[id]) add_busy(id);
      trace_.add(now_, "task_failed", id, last_pilot_[id], manager_.task(id).failure_reason);
    }
  }

  void add_busy(TaskId id) {
    busy_[*last_pilot_[id]] += now_ - *running_since_[id];
    running_since_[id].reset();
  }

  void on_pilot_active(PilotId id) {
    manager_.activate_pilot(id, now_);
    trace_.add(now_, "pilot_active", std::nullopt, id);
    const auto& p = manager_.pilot(id);
    if (p.expires_at) queue_.push(*p.expires_at, EventKind::pilot_expired, id);
  }

  void on_pilot_expired(PilotId id) {
    trace_.add(now_, "pilot_expired", std::nullopt, id);
    for (const auto& i : manager_.expire_pilot(id, now_)) {
      ++token_[i.task];  // pending start/finish events become stale
      if (i.requeued) {
        if (running_since_[i.task]) add_busy(i.task);
        trace_.add(now_, "task_requeued", i.task, id, manager_.task(i.task).failure_reason);
      } else {
        note_failed(i.failed);
      }
    }
  }

  void on_task_start(TaskId id, std::uint64_t token) {
    if (token != token_[id]) return;
    const auto& rec = manager_.task(id);
    const auto& p = manager_.pilot(*rec.assigned_pilot);
    if (p.description.mem_per_slot_bytes < rec.spec.mem_bytes) {
      ++token_[id];
      note_failed(manager_.fail_attempt(
          id, now_, "insufficient memory on pilot " + std::to_string(p.id) + ": needs " +
                        std::to_string(rec.spec.mem_bytes) + " bytes per slot"));
      return;
    }
    manager_.start_task(id, now_);
    running_since_[id] = now_;
    last_start_[id] = now_;
    trace_.add(now_, "task_started", id, p.id, "slot=" + std::to_string(*rec.slot));
    const double service = service_seconds(rec.spec, p.description.resource_class, options_.costs);
    queue_.push(now_ + SimTime::from_seconds(service), EventKind::task_finish, id, token);
  }

  void on_task_finish(TaskId id, std::uint64_t token) {
    if (token != token_[id]) return;
    add_busy(id);
    const auto newly_ready = manager_.finish_task(id, now_);
    ++terminal_count_;
    trace_.add(now_, "task_finished", id, last_pilot_[id]);
    if (!last_finish_ || now_ > *last_finish_) last_finish_ = now_;
    for (const auto r : newly_ready) trace_.add(now_, "task_ready", r, std::nullopt);
  }

  // Barriers complete as soon as they are ready and never touch a pilot.
  void complete_barriers() {
    bool progressed = has_barriers_;
    while (progressed) {
      progressed = false;
      const auto& ready = manager_.ready_tasks();
      for (const auto id : ready) {
        if (manager_.task(id).spec.kind != motifs::TaskKind::stage_barrier) continue;
        manager_.start_task(id, now_);
        trace_.add(now_, "task_started", id, std::nullopt, "barrier");
        const auto newly_ready = manager_.finish_task(id, now_);
        ++terminal_count_;
        trace_.add(now_, "task_finished", id, std::nullopt, "barrier");
        for (const auto r : newly_ready) trace_.add(now_, "task_ready", r, std::nullopt);
        progressed = true;
        break;  // ready set changed
      }
    }
  }

  void dispatch(SimTime now) {
    now_ = now;
    complete_barriers();
    const auto bindings = manager_.dispatch(policy_, now);
    const auto remaining = manager_.backlog();
    for (std::size_t i = 0; i < bindings.size(); ++i) {
      const auto [id, pid] = bindings[i];
      // Tasks still waiting behind this one: the unbound queue plus later
      // bindings of the same round.
      const auto backlog = remaining + (bindings.size() - 1 - i);
      const SimTime begin = std::max(now, dispatcher_free_);
      if (!first_dispatch_) first_dispatch_ = begin;
      dispatcher_free_ = begin + SimTime::from_seconds(options_.overhead.seconds(backlog));
      SimTime start = dispatcher_free_ + access_delay(pid, dispatcher_free_);
      ++token_[id];
      last_pilot_[id] = pid;
      trace_.add(now, "task_bound", id, pid, "slot=" + std::to_string(*manager_.task(id).slot));
      queue_.push(start, EventKind::task_start, id, token_[id]);
    }
    if (options_.after_dispatch) options_.after_dispatch(manager_, policy_, now);
  }

  SimTime access_delay(PilotId pid, SimTime at) {
    const auto& d = manager_.pilot(pid).description;
    switch (d.access_mode) {
      case pilot::AccessMode::dedicated: return SimTime{};
      case pilot::AccessMode::shared_remote:
        return SimTime::from_seconds(pilot::qpu_access_delay(d, false, rng_));
      case pilot::AccessMode::session: {
        auto& ready = session_ready_[pid];
        if (!ready) ready = at + SimTime::from_seconds(d.session_setup_delay);
        return *ready > at ? *ready - at : SimTime{};
      }
    }
    return SimTime{};
  }

  SimResult finish() {
    SimResult out;
    SimReport& r = out.report;
    r.policy = std::string(pilot::to_string(policy_));
    r.seed = seed_;
    r.total_tasks = workload_.tasks.size();
    r.first_dispatch = first_dispatch_;
    r.last_finish = last_finish_;
    r.end_time = now_;
    r.throughput_includes_startup = options_.throughput_includes_startup;
    for (const auto& t : manager_.tasks()) {
      if (t.state == TaskState::done) {
        ++r.completed_tasks;
      } else {
        ++r.failed_tasks;
        r.failures.push_back({t.spec.id, t.failure_reason});
      }
      TaskOutcome o;
      o.id = t.spec.id;
      o.state = t.state;
      o.pilot = t.state == TaskState::done ? t.assigned_pilot : last_pilot_[t.spec.id];
      o.slot = t.slot;
      o.started_at = t.state == TaskState::done ? t.started_at : last_start_[t.spec.id];
      o.finished_at = t.finished_at;
      o.attempts = t.attempts;
      o.failure_reason = t.failure_reason;
      out.tasks.push_back(std::move(o));
    }
    if (last_finish_) {
      r.runtime = last_finish_->seconds();
      r.makespan = first_dispatch_ ? (*last_finish_ - *first_dispatch_).seconds() : r.runtime;
      if (r.completed_tasks > 0) {
        try {
          r.throughput = throughput(r);
        } catch (const std::domain_error&) {
          r.throughput = 0.0;  // all work finished at the dispatch instant
        }
      }
    }
    for (const auto& p : manager_.pilots()) {
      PilotUsage u;
      u.id = p.id;
      u.name = p.description.name.empty() ? "pilot-" + std::to_string(p.id) : p.description.name;
      u.resource_class = std::string(to_string(p.description.resource_class));
      u.slots = p.description.slots;
      u.busy_seconds = busy_[p.id].seconds();
      if (p.active_since && p.ended_at) u.active_seconds = (*p.ended_at - *p.active_since).seconds();
      const double capacity = u.active_seconds * u.slots;
      u.utilization = capacity > 0.0 ? std::clamp(u.busy_seconds / capacity, 0.0, 1.0) : 0.0;
      r.class_busy_seconds[u.resource_class] += u.busy_seconds;
      r.pilots.push_back(std::move(u));
    }
    // Slots are released on completion, so recover them from the trace.
    for (auto& o : out.tasks) o.slot.reset();
    for (const auto& row : trace_.rows()) {
      if (row.event == "task_started" && row.task && row.detail.rfind("slot=", 0) == 0) {
        out.tasks[*row.task].slot = std::stoi(row.detail.substr(5));
      }
    }
    out.trace = std::move(trace_);
    return out;
  }

  const motifs::WorkloadSpec& workload_;
  SchedulingPolicy policy_;
  std::uint64_t seed_;
  const SimOptions& options_;
  PilotManager manager_;
  Rng rng_;
  EventQueue queue_;
  Trace trace_;
  SimTime now_;
  SimTime dispatcher_free_;
  std::optional<SimTime> first_dispatch_;
  std::optional<SimTime> last_finish_;
  std::size_t terminal_count_ = 0;
  bool has_barriers_ = false;
  std::vector<std::optional<SimTime>> session_ready_;
  std::vector<SimTime> busy_;
  std::vector<std::uint64_t> token_;
  std::vector<std::optional<SimTime>> running_since_;
  std::vector<std::optional<SimTime>> last_start_;
  std::vector<std::optional<PilotId>> last_pilot_;
};

}  // namespace

SimResult run(const motifs::WorkloadSpec& workload,
              std::span<const pilot::PilotDescription> pilots, SchedulingPolicy policy,
              std::uint64_t seed, const SimOptions& options) {
  if (pilots.empty()) throw std::invalid_argument("no pilots defined");
  motifs::validate(workload);
  for (const auto& t : workload.tasks) {
    for (const auto d : t.deps) {
      if (d > t.id) {
        throw std::invalid_argument("task " + std::to_string(t.id) + " depends on later task " +
                                    std::to_string(d) + "; list tasks in dependency order");
      }
    }
  }
  options.overhead.validate();
  options.costs.validate();
  for (const auto& p : pilots) p.validate();
  return Simulation(workload, pilots, policy, seed, options).run();
}

}  // namespace qpilot::sim
