#include "inharmonica/format.hpp"

#include <cstdio>

namespace inharmonica::detail {

std::string format_full(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

}  // namespace inharmonica::detail
