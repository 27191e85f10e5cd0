#include "qpilot/pilot/pilot.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qpilot::pilot {

double default_startup_delay(ResourceClass rc) {
  return rc == ResourceClass::qpu ? 0.0 : kDefaultPilotStartupSeconds;
}

std::string_view to_string(AccessMode mode) {
  switch (mode) {
    case AccessMode::dedicated: return "dedicated";
    case AccessMode::shared_remote: return "shared_remote";
    case AccessMode::session: return "session";
  }
  return "?";
}

AccessMode parse_access_mode(std::string_view text) {
  if (text == "dedicated") return AccessMode::dedicated;
  if (text == "shared_remote") return AccessMode::shared_remote;
  if (text == "session") return AccessMode::session;
  throw std::invalid_argument("unknown access mode '" + std::string(text) + "'");
}

std::string_view to_string(QueueDelayModel::Kind kind) {
  switch (kind) {
    case QueueDelayModel::Kind::constant: return "constant";
    case QueueDelayModel::Kind::uniform: return "uniform";
    case QueueDelayModel::Kind::exponential: return "exponential";
  }
  return "?";
}

QueueDelayModel::Kind parse_queue_delay_kind(std::string_view text) {
  if (text == "constant") return QueueDelayModel::Kind::constant;
  if (text == "uniform") return QueueDelayModel::Kind::uniform;
  if (text == "exponential") return QueueDelayModel::Kind::exponential;
  throw std::invalid_argument("unknown queue delay distribution '" + std::string(text) + "'");
}

namespace {

bool non_negative(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace

void QueueDelayModel::validate() const {
  switch (kind) {
    case Kind::constant:
      if (!non_negative(seconds)) throw std::invalid_argument("queue delay must be >= 0");
      break;
    case Kind::uniform:
      if (!non_negative(lo) || !non_negative(hi) || hi < lo) {
        throw std::invalid_argument("uniform queue delay needs 0 <= lo <= hi");
      }
      break;
    case Kind::exponential:
      if (!non_negative(mean)) throw std::invalid_argument("queue delay mean must be >= 0");
      break;
  }
}

double QueueDelayModel::sample(Rng& rng) const {
  switch (kind) {
    case Kind::constant: return seconds;
    case Kind::uniform: return rng.uniform(lo, hi);
    case Kind::exponential: return mean == 0.0 ? 0.0 : rng.exponential(mean);
  }
  return 0.0;
}

void PilotDescription::validate() const {
  const std::string who = name.empty() ? std::string("pilot") : "pilot '" + name + "'";
  if (resource_class == ResourceClass::any) {
    throw std::invalid_argument(who + ": resource class must be CPU, GPU or QPU");
  }
  if (slots < 1) throw std::invalid_argument(who + ": needs at least one slot");
  if (!non_negative(startup_delay)) throw std::invalid_argument(who + ": negative startup delay");
  if (walltime && !(std::isfinite(*walltime) && *walltime > 0.0)) {
    throw std::invalid_argument(who + ": walltime must be positive");
  }
  if (resource_class != ResourceClass::qpu && access_mode != AccessMode::dedicated) {
    throw std::invalid_argument(who + ": only QPU pilots support shared or session access");
  }
  if (access_mode == AccessMode::shared_remote && slots != 1) {
    throw std::invalid_argument(who + ": a shared remote QPU endpoint has exactly one slot");
  }
  if (!non_negative(session_setup_delay)) {
    throw std::invalid_argument(who + ": negative session setup delay");
  }
  queue_delay.validate();
}

double qpu_access_delay(const PilotDescription& desc, bool session_open, Rng& rng) {
  switch (desc.access_mode) {
    case AccessMode::dedicated: return 0.0;
    case AccessMode::session: return session_open ? 0.0 : desc.session_setup_delay;
    case AccessMode::shared_remote: return desc.queue_delay.sample(rng);
  }
  return 0.0;
}

void DispatchOverheadModel::validate() const {
  if (!non_negative(base_seconds) || !non_negative(per_backlog_seconds)) {
    throw std::invalid_argument("dispatch overhead parameters must be >= 0");
  }
}

}  // namespace qpilot::pilot
