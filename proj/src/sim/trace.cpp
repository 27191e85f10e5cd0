#include "qpilot/sim/trace.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace qpilot::sim {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  return fields;
}

SimTime parse_time(const std::string& s) {
  const auto dot = s.find('.');
  const std::string whole = s.substr(0, dot);
  std::string frac = dot == std::string::npos ? "" : s.substr(dot + 1);
  if (whole.empty() || frac.size() > 9 ||
      whole.find_first_not_of("0123456789") != std::string::npos ||
      frac.find_first_not_of("0123456789") != std::string::npos) {
    throw std::invalid_argument("bad trace time '" + s + "'");
  }
  frac.resize(9, '0');
  return SimTime::from_ns(std::stoll(whole) * 1000000000LL + std::stoll(frac));
}

std::optional<std::uint32_t> parse_id(const std::string& s) {
  if (s.empty()) return std::nullopt;
  if (s.find_first_not_of("0123456789") != std::string::npos) {
    throw std::invalid_argument("bad trace id '" + s + "'");
  }
  return static_cast<std::uint32_t>(std::stoul(s));
}

}  // namespace

void Trace::add(SimTime time, std::string event, std::optional<std::uint32_t> task,
                std::optional<std::uint32_t> pilot, std::string detail) {
  rows_.push_back({time, std::move(event), task, pilot, std::move(detail)});
}

void Trace::write_csv(std::ostream& out) const {
  out << kTraceHeader << '\n';
  for (const auto& r : rows_) {
    out << format_seconds(r.time) << ',' << r.event << ',';
    if (r.task) out << *r.task;
    out << ',';
    if (r.pilot) out << *r.pilot;
    out << ',' << csv_field(r.detail) << '\n';
  }
}

std::string Trace::to_csv() const {
  std::ostringstream out;
  write_csv(out);
  return out.str();
}

Trace read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) {
    throw std::invalid_argument("trace: expected header '" + std::string(kTraceHeader) + "'");
  }
  Trace trace;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 5) {
      throw std::invalid_argument("trace line " + std::to_string(line_no) + ": expected 5 fields");
    }
    trace.add(parse_time(f[0]), f[1], parse_id(f[2]), parse_id(f[3]), f[4]);
  }
  return trace;
}

std::size_t count_waves(std::vector<std::pair<SimTime, SimTime>> intervals) {
  std::sort(intervals.begin(), intervals.end());
  std::size_t waves = 0;
  SimTime wave_end;
  for (const auto& [start, finish] : intervals) {
    if (waves == 0 || start >= wave_end) {
      ++waves;
      wave_end = finish;
    } else {
      wave_end = std::min(wave_end, finish);
    }
  }
  return waves;
}

}  // namespace qpilot::sim
