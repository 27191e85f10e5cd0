#pragma once

#include <cstdint>
#include <queue>
#include <vector>

#include "qpilot/common/sim_time.hpp"

namespace qpilot::sim {

enum class EventKind { pilot_active, pilot_expired, task_start, task_finish };

struct Event {
  SimTime time;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::pilot_active;
  std::uint32_t subject = 0;  // pilot id for pilot events, task id otherwise
  std::uint64_t token = 0;    // attempt token; stale task events are ignored
};

// Min-queue ordered by (time, seq). seq is assigned on insertion, so equal
// times pop in insertion order.
class EventQueue {
 public:
  void push(SimTime time, EventKind kind, std::uint32_t subject, std::uint64_t token = 0);
  Event pop();
  const Event& top() const { return heap_.top(); }
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.seq > b.seq;
    }
  };
  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  std::uint64_t next_seq_ = 0;
};

}  // namespace qpilot::sim
