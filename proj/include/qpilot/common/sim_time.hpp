#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace qpilot {

// Simulated time in integer nanoseconds. Used for both instants and durations;
// integer arithmetic keeps event ordering and trace output exact.
struct SimTime {
  std::int64_t ns = 0;

  static SimTime from_seconds(double seconds);
  constexpr static SimTime from_ns(std::int64_t value) { return SimTime{value}; }

  double seconds() const { return static_cast<double>(ns) * 1e-9; }

  friend constexpr auto operator<=>(SimTime, SimTime) = default;
  friend constexpr SimTime operator+(SimTime a, SimTime b) { return SimTime{a.ns + b.ns}; }
  friend constexpr SimTime operator-(SimTime a, SimTime b) { return SimTime{a.ns - b.ns}; }
  constexpr SimTime& operator+=(SimTime other) {
    ns += other.ns;
    return *this;
  }
};

// Exact decimal rendering ("12.000345678"), no floating-point round trip.
std::string format_seconds(SimTime t);

}  // namespace qpilot
