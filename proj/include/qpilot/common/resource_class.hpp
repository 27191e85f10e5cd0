#pragma once

#include <string>
#include <string_view>

namespace qpilot {

enum class ResourceClass { cpu, gpu, qpu, any };

std::string_view to_string(ResourceClass rc);
ResourceClass parse_resource_class(std::string_view text);

// True when a task requesting `wanted` may run on a pilot of class `offered`.
constexpr bool class_matches(ResourceClass wanted, ResourceClass offered) {
  return wanted == ResourceClass::any || wanted == offered;
}

}  // namespace qpilot
