#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "qpilot/common/resource_class.hpp"
#include "qpilot/common/rng.hpp"
#include "qpilot/common/sim_time.hpp"

namespace qpilot::pilot {

using PilotId = std::uint32_t;

inline constexpr std::uint64_t kUnlimitedMemory = std::numeric_limits<std::uint64_t>::max();

// Placeholder-job setup time observed for CPU pilots.
inline constexpr double kDefaultPilotStartupSeconds = 37.0;

/// Startup delay applied when a description leaves it unspecified.
double default_startup_delay(ResourceClass rc);

enum class AccessMode { dedicated, shared_remote, session };

std::string_view to_string(AccessMode mode);
AccessMode parse_access_mode(std::string_view text);

// Waiting time in a multi-tenant cloud queue before a shared QPU runs a task.
struct QueueDelayModel {
  enum class Kind { constant, uniform, exponential };

  Kind kind = Kind::exponential;
  double seconds = 0.0;  // constant
  double lo = 0.0;       // uniform
  double hi = 0.0;
  double mean = 60.0;  // exponential

  static QueueDelayModel constant(double s) { return {Kind::constant, s, 0.0, 0.0, 0.0}; }
  static QueueDelayModel uniform(double a, double b) { return {Kind::uniform, 0.0, a, b, 0.0}; }
  static QueueDelayModel exponential(double m) { return {Kind::exponential, 0.0, 0.0, 0.0, m}; }

  void validate() const;
  double sample(Rng& rng) const;
};

std::string_view to_string(QueueDelayModel::Kind kind);
QueueDelayModel::Kind parse_queue_delay_kind(std::string_view text);

struct PilotDescription {
  std::string name;
  ResourceClass resource_class = ResourceClass::cpu;
  int slots = 1;
  std::uint64_t mem_per_slot_bytes = kUnlimitedMemory;
  double startup_delay = 0.0;
  std::optional<double> walltime;  // unlimited when empty
  AccessMode access_mode = AccessMode::dedicated;
  QueueDelayModel queue_delay;
  double session_setup_delay = 0.0;

  // Throws std::invalid_argument. Shared-remote endpoints expose one slot;
  // non-QPU pilots are always dedicated.
  void validate() const;
};

// Extra wait before a task runs on a QPU pilot.
//   dedicated      0
//   session        the one-time setup delay until the session is open, then 0
//   shared_remote  one draw from the queue-delay model
double qpu_access_delay(const PilotDescription& desc, bool session_open, Rng& rng);

// Per-task dispatch cost o(q) = base + per_backlog * q, q = tasks still waiting
// behind the one being dispatched. Defaults reproduce the zero-compute
// throughput decline from ~418 tasks/s at 256 tasks to ~298 tasks/s at 8192.
struct DispatchOverheadModel {
  double base_seconds = 2.3609e-3;
  double per_backlog_seconds = 2.4236e-7;

  double seconds(std::uint64_t backlog) const {
    return base_seconds + per_backlog_seconds * static_cast<double>(backlog);
  }
  void validate() const;
};

}  // namespace qpilot::pilot
