#include "qpilot/sim/event_queue.hpp"

#include <stdexcept>

namespace qpilot::sim {

void EventQueue::push(SimTime time, EventKind kind, std::uint32_t subject, std::uint64_t token) {
  heap_.push(Event{time, next_seq_++, kind, subject, token});
}

Event EventQueue::pop() {
  if (heap_.empty()) throw std::logic_error("pop from empty event queue");
  Event e = heap_.top();
  heap_.pop();
  return e;
}

}  // namespace qpilot::sim
