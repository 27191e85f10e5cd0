#include "qpilot/common/resource_class.hpp"

#include <stdexcept>
#include <string>

namespace qpilot {

std::string_view to_string(ResourceClass rc) {
  switch (rc) {
    case ResourceClass::cpu: return "CPU";
    case ResourceClass::gpu: return "GPU";
    case ResourceClass::qpu: return "QPU";
    case ResourceClass::any: return "any";
  }
  return "?";
}

ResourceClass parse_resource_class(std::string_view text) {
  if (text == "CPU" || text == "cpu") return ResourceClass::cpu;
  if (text == "GPU" || text == "gpu") return ResourceClass::gpu;
  if (text == "QPU" || text == "qpu") return ResourceClass::qpu;
  if (text == "any") return ResourceClass::any;
  throw std::invalid_argument("unknown resource class '" + std::string(text) + "'");
}

}  // namespace qpilot
