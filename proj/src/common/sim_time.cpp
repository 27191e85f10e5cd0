#include "qpilot/common/sim_time.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace qpilot {

SimTime SimTime::from_seconds(double seconds) {
  if (!std::isfinite(seconds)) {
    throw std::invalid_argument("simulated time must be finite");
  }
  return SimTime{std::llround(seconds * 1e9)};
}

std::string format_seconds(SimTime t) {
  const bool negative = t.ns < 0;
  const std::uint64_t magnitude =
      negative ? static_cast<std::uint64_t>(-(t.ns + 1)) + 1 : static_cast<std::uint64_t>(t.ns);
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%s%llu.%09llu", negative ? "-" : "",
                static_cast<unsigned long long>(magnitude / 1000000000ULL),
                static_cast<unsigned long long>(magnitude % 1000000000ULL));
  return buf;
}

}  // namespace qpilot
