#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qpilot/common/sim_time.hpp"

namespace qpilot::sim {

struct TraceRow {
  SimTime time;
  std::string event;
  std::optional<std::uint32_t> task;
  std::optional<std::uint32_t> pilot;
  std::string detail;

  friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

// Event log in processing order. CSV columns: time,event,task_id,pilot_id,detail.
// Times are exact nanosecond decimals so two runs compare byte for byte.
class Trace {
 public:
  void add(SimTime time, std::string event, std::optional<std::uint32_t> task,
           std::optional<std::uint32_t> pilot, std::string detail = {});

  const std::vector<TraceRow>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }

  void write_csv(std::ostream& out) const;
  std::string to_csv() const;

 private:
  std::vector<TraceRow> rows_;
};

inline constexpr const char* kTraceHeader = "time,event,task_id,pilot_id,detail";

Trace read_trace_csv(std::istream& in);

// Groups execution intervals into waves: sorted by start, a task opens a new
// wave once it starts no earlier than the first finish of the current wave.
std::size_t count_waves(std::vector<std::pair<SimTime, SimTime>> intervals);

}  // namespace qpilot::sim
